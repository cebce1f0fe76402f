#include "mmot/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace mmot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InfeasibleDensity: return "InfeasibleDensity";
    case ErrorCode::ScaleGuard: return "ScaleGuard";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorCode::WrongGeometry: return "WrongGeometry";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

const char* to_string(GeometryKind kind) {
  return kind == GeometryKind::Line1D ? "Line1D" : "RadialSymmetric";
}

const char* to_string(OffsetConvention convention) {
  switch (convention) {
    case OffsetConvention::EqVNormalized: return "EqVNormalized";
    case OffsetConvention::VanishingAtInfinity: return "VanishingAtInfinity";
    case OffsetConvention::Raw: return "Raw";
  }
  return "Raw";
}

Geometry Geometry::radial(int d) {
  if (d < 2) {
    throw Error(ErrorCode::InvalidArgument, "core-model",
                "RadialSymmetric geometry requires dimension >= 2");
  }
  return {GeometryKind::RadialSymmetric, d};
}

CostSpec CostSpec::make(double s, double eta) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::InvalidArgument, "core-model", "Riesz exponent s must be > 0");
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::InvalidArgument, "core-model", "truncation eta must be >= 0");
  }
  return {s, eta};
}

double riesz_cost(double x, double y, const CostSpec& spec) {
  const double r = std::max(std::abs(x - y), spec.eta);
  if (r == 0.0) return kInfiniteCost;
  const double c = spec.s == 1.0 ? 1.0 / r : std::pow(r, -spec.s);
  return std::min(c, kInfiniteCost);
}

double config_cost(std::span<const double> points, const CostSpec& spec) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      total += riesz_cost(points[i], points[j], spec);
    }
  }
  return total;
}

namespace {

[[noreturn]] void infeasible(const std::string& what) {
  throw Error(ErrorCode::InfeasibleDensity, "core-model", what);
}

}  // namespace

Density::Density(Geometry geometry, std::vector<double> nodes,
                 std::vector<double> weights, int particle_count)
    : geometry_(geometry),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      particle_count_(particle_count) {
  if (particle_count_ < 2) infeasible("particle count N must be >= 2");
  if (nodes_.size() != weights_.size()) infeasible("nodes and weights differ in length");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i])) infeasible("non-finite node");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) infeasible("nodes must be strictly increasing");
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      infeasible("weight at row " + std::to_string(i) + " is negative or non-finite");
    }
  }
  if (geometry_.kind == GeometryKind::RadialSymmetric && !nodes_.empty() && nodes_.front() < 0.0) {
    infeasible("radial nodes must be >= 0");
  }
  const auto positive = std::count_if(weights_.begin(), weights_.end(),
                                      [](double w) { return w > 0.0; });
  if (positive < 2) infeasible("at least two atoms must carry positive weight");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - particle_count_) > 1e-12 * particle_count_) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total << " but N = " << particle_count_;
    throw Error(ErrorCode::MassMismatch, "core-model", os.str());
  }
}

Density Density::renormalized(Geometry geometry, std::vector<double> nodes,
                              std::vector<double> weights, int particle_count) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) infeasible("total weight must be positive");
  for (double& w : weights) w *= particle_count / total;
  return Density(geometry, std::move(nodes), std::move(weights), particle_count);
}

std::vector<double> Density::marginal() const {
  std::vector<double> mu(weights_);
  for (double& w : mu) w /= particle_count_;
  return mu;
}

Density mirror_to_line(const Density& density) {
  if (density.geometry().kind == GeometryKind::Line1D) return density;
  const auto& r = density.nodes();
  const auto& w = density.weights();
  std::vector<double> nodes;
  std::vector<double> weights;
  for (std::size_t i = r.size(); i-- > 0;) {
    if (r[i] == 0.0) continue;
    nodes.push_back(-r[i]);
    weights.push_back(0.5 * w[i]);
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    nodes.push_back(r[i]);
    weights.push_back(r[i] == 0.0 ? w[i] : 0.5 * w[i]);
  }
  return Density::renormalized(Geometry::line(), std::move(nodes), std::move(weights),
                               density.particle_count());
}

std::optional<std::size_t> find_node(std::span<const double> nodes, double x) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  std::optional<std::size_t> best;
  double best_gap = tol;
  for (auto cand : {it, it == nodes.begin() ? it : std::prev(it)}) {
    if (cand == nodes.end()) continue;
    const double gap = std::abs(*cand - x);
    if (gap <= best_gap) {
      best_gap = gap;
      best = static_cast<std::size_t>(cand - nodes.begin());
    }
  }
  return best;
}

std::size_t checked_pow(std::size_t m, int k) {
  std::size_t out = 1;
  for (int i = 0; i < k; ++i) {
    if (m != 0 && out > std::numeric_limits<std::size_t>::max() / m) {
      return std::numeric_limits<std::size_t>::max();
    }
    out *= m;
  }
  return out;
}

TransportPlan::TransportPlan(std::vector<PlanAtom> support, Density marginal_ref)
    : support_(std::move(support)), marginal_ref_(std::move(marginal_ref)) {
  const auto n = static_cast<std::size_t>(marginal_ref_.particle_count());
  for (const auto& atom : support_) {
    if (atom.points.size() != n) {
      throw Error(ErrorCode::InvalidArgument, "core-model",
                  "configuration length differs from N");
    }
    if (!(atom.weight > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "core-model", "plan weights must be positive");
    }
  }
}

double TransportPlan::total_weight() const {
  double total = 0.0;
  for (const auto& atom : support_) total += atom.weight;
  return total;
}

double TransportPlan::marginal_error() const {
  const auto& nodes = marginal_ref_.nodes();
  const auto mu = marginal_ref_.marginal();
  const int n = particle_count();
  double worst = 0.0;
  for (int slot = 0; slot < n; ++slot) {
    std::vector<double> acc(nodes.size(), 0.0);
    for (const auto& atom : support_) {
      auto idx = find_node(nodes, atom.points[slot]);
      if (!idx) return std::numeric_limits<double>::infinity();
      acc[*idx] += atom.weight;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      worst = std::max(worst, std::abs(acc[i] - mu[i]));
    }
  }
  return worst;
}

double TransportPlan::cost(const CostSpec& spec) const {
  double total = 0.0;
  for (const auto& atom : support_) total += atom.weight * config_cost(atom.points, spec);
  return total;
}

TransportPlan TransportPlan::symmetrized() const {
  const int n = particle_count();
  std::vector<int> perm(n);
  std::map<Configuration, double> merged;
  std::size_t count = 0;
  std::iota(perm.begin(), perm.end(), 0);
  do {
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double scale = 1.0 / static_cast<double>(count);
  for (const auto& atom : support_) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      Configuration c(n);
      for (int i = 0; i < n; ++i) c[i] = atom.points[perm[i]];
      merged[c] += atom.weight * scale;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  std::vector<PlanAtom> support;
  support.reserve(merged.size());
  for (auto& [points, weight] : merged) support.push_back({points, weight});
  return TransportPlan(std::move(support), marginal_ref_);
}

PotentialField::PotentialField(Geometry geometry, std::vector<double> nodes,
                               std::vector<double> values, OffsetConvention convention)
    : geometry_(geometry),
      nodes_(std::move(nodes)),
      values_(std::move(values)),
      convention_(convention) {
  if (nodes_.size() != values_.size() || nodes_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "core-model",
                "potential nodes and values must be nonempty and equal length");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "core-model",
                  "potential nodes must be strictly increasing");
    }
  }
}

double PotentialField::interpolate(double x) const {
  if (x <= nodes_.front()) return values_.front();
  if (x >= nodes_.back()) return values_.back();
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const auto hi = static_cast<std::size_t>(it - nodes_.begin());
  const auto lo = hi - 1;
  const double t = (x - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

double PotentialField::operator()(double x) const {
  if (geometry_.kind == GeometryKind::RadialSymmetric) x = std::abs(x);
  const bool outside = x < nodes_.front() || x > nodes_.back();
  if (outside && tail_ && x != 0.0) {
    return tail_->a + tail_->b * std::pow(std::abs(x), -tail_->s);
  }
  return interpolate(x);
}

double PotentialField::evaluate_strict(double x) const {
  if (geometry_.kind == GeometryKind::RadialSymmetric) x = std::abs(x);
  const bool outside = x < nodes_.front() || x > nodes_.back();
  if (outside && !tail_) {
    throw Error(ErrorCode::OutOfDomain, "potential",
                "point " + std::to_string(x) + " lies outside the potential grid");
  }
  return (*this)(x);
}

PotentialField PotentialField::shifted(double constant) const {
  auto values = values_;
  for (double& v : values) v += constant;
  PotentialField out(geometry_, nodes_, std::move(values), convention_);
  if (tail_) out.tail_ = TailModel{tail_->a + constant, tail_->b, tail_->s};
  return out;
}

PotentialField PotentialField::with_values(std::vector<double> values,
                                           OffsetConvention convention) const {
  return PotentialField(geometry_, nodes_, std::move(values), convention);
}

PotentialField PotentialField::with_tail(TailModel tail) const {
  PotentialField out = *this;
  out.tail_ = tail;
  return out;
}

double CostMatrix::max_finite() const {
  double best = 0.0;
  for (double c : data_) {
    if (c < kInfiniteCost) best = std::max(best, c);
  }
  return best;
}

CostMatrix build_cost_tensor(std::span<const double> nodes, const CostSpec& spec) {
  const std::size_t m = nodes.size();
  std::vector<double> data(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double c = riesz_cost(nodes[i], nodes[j], spec);
      data[i * m + j] = c;
      data[j * m + i] = c;
    }
  }
  return CostMatrix(m, std::move(data));
}

CostMatrix build_cost_tensor(const Density& density, const CostSpec& spec) {
  return build_cost_tensor(density.nodes(), spec);
}

}  // namespace mmot
