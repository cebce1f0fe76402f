#include "mmot/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmot/grid_search.hpp"

namespace mmot {

namespace {

bool is_radial(const PotentialField& v) {
  return v.geometry().kind == GeometryKind::RadialSymmetric;
}

// Index of the first nonnegative node of the line view of a radial field.
std::size_t positive_offset(const PotentialField& radial) {
  const auto& r = radial.nodes();
  return r.front() > 0.0 ? r.size() : r.size() - 1;
}

Configuration to_points(const std::vector<double>& nodes, std::span<const std::size_t> idx) {
  Configuration c(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) c[i] = nodes[idx[i]];
  return c;
}

void check_scale(std::size_t m, int k, std::size_t cap) {
  if (multiset_count(m, k) > cap) {
    throw Error(ErrorCode::ScaleGuard, "potential",
                "grid search over " + std::to_string(k) + "-point configurations exceeds the cap");
  }
}

}  // namespace

double total_energy(const Configuration& c, const PotentialField& v, const CostSpec& spec) {
  double e = c.size() >= 2 ? config_cost(c, spec) : 0.0;
  for (double r : c) e += v.evaluate_strict(is_radial(v) ? std::abs(r) : r);
  return e;
}

PotentialField line_view(const PotentialField& v) {
  if (!is_radial(v)) return v;
  const auto& r = v.nodes();
  const auto& val = v.values();
  std::vector<double> nodes;
  std::vector<double> values;
  nodes.reserve(2 * r.size());
  values.reserve(2 * r.size());
  for (std::size_t i = r.size(); i-- > 0;) {
    if (r[i] > 0.0) {
      nodes.push_back(-r[i]);
      values.push_back(val[i]);
    }
  }
  nodes.insert(nodes.end(), r.begin(), r.end());
  values.insert(values.end(), val.begin(), val.end());
  PotentialField out(Geometry::line(), std::move(nodes), std::move(values), v.convention());
  return v.tail() ? out.with_tail(*v.tail()) : out;
}

PotentialField radial_restriction(const PotentialField& line, int dimension,
                                  const std::vector<double>& radii) {
  std::vector<double> values(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto plus = find_node(line.nodes(), radii[i]);
    const auto minus = find_node(line.nodes(), -radii[i]);
    if (!plus || !minus) {
      throw Error(ErrorCode::InvalidArgument, "potential",
                  "radius " + std::to_string(radii[i]) + " is not mirrored on the line grid");
    }
    values[i] = 0.5 * (line.values()[*minus] + line.values()[*plus]);
  }
  return PotentialField(Geometry::radial(dimension), radii, std::move(values), line.convention());
}

EnergyLevel evaluate_EK(const PotentialField& v, int k, const CostSpec& spec,
                        std::size_t max_multisets) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "potential", "K must be at least 1");
  const PotentialField line = line_view(v);
  const auto& x = line.nodes();
  check_scale(x.size(), k, max_multisets);
  const auto cost = build_cost_tensor(x, spec);
  const auto best = grid_minimize(cost, line.values(), k);
  EnergyLevel level;
  level.value = best.value;
  level.argmin = to_points(x, best.argmin);
  level.attained = true;
  for (std::size_t i : best.argmin) {
    if (i < 2 || i + 3 > x.size()) level.attained = false;
  }
  return level;
}

EnergyLadder energy_ladder(const PotentialField& v, int n, const CostSpec& spec,
                           double tolerance) {
  EnergyLadder ladder;
  ladder.tolerance = tolerance;
  for (int k = 1; k <= n; ++k) {
    auto level = evaluate_EK(v, k, spec);
    ladder.values.push_back(level.value);
    ladder.argmins.push_back(std::move(level.argmin));
    ladder.attained.push_back(level.attained);
  }
  return ladder;
}

SigmaSet find_sigma(const PotentialField& v, int n, const CostSpec& spec, double slack,
                    std::size_t max_multisets) {
  if (slack < 0.0) throw Error(ErrorCode::InvalidArgument, "potential", "slack must be >= 0");
  const PotentialField line = line_view(v);
  const auto& x = line.nodes();
  check_scale(x.size(), n, max_multisets);
  const auto cost = build_cost_tensor(x, spec);
  SigmaSet sigma;
  sigma.energy = grid_minimize(cost, line.values(), n).value;
  sigma.slack = slack;
  grid_enumerate_below(cost, line.values(), n, sigma.energy + slack,
                       [&](std::span<const std::size_t> idx, double) {
                         sigma.configurations.push_back(to_points(x, idx));
                       });
  return sigma;
}

bool sigma_contains(const SigmaSet& sigma, Configuration config) {
  std::sort(config.begin(), config.end());
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (const auto& member : sigma.configurations) {
    if (member.size() == config.size() &&
        std::equal(member.begin(), member.end(), config.begin(), close)) {
      return true;
    }
  }
  return false;
}

std::vector<double> eqv_map(const PotentialField& v, int n, const CostSpec& spec) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "potential", "N must be at least 2");
  const PotentialField line = line_view(v);
  const auto& x = line.nodes();
  const auto& val = line.values();
  const auto cost = build_cost_tensor(x, spec);
  // A radial field maps to an even line field, so only r >= 0 is computed.
  const std::size_t first = is_radial(v) ? positive_offset(v) : 0;
  std::vector<double> out;
  out.reserve(x.size() - first);
  std::vector<double> unary(x.size());
  for (std::size_t i = first; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) unary[j] = val[j] + cost(i, j);
    out.push_back(-grid_minimize(cost, unary, n - 1).value);
  }
  return out;
}

NormalizeResult eqv_normalize(const PotentialField& v, int n, const CostSpec& spec, double tol,
                              std::size_t max_sweeps) {
  if (!(spec.eta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "potential",
                "normalization uses the truncated cost and needs eta > 0");
  }
  check_scale(line_view(v).size(), n - 1, kMaxEnergyMultisets);
  std::vector<double> values = v.values();
  const double top = *std::max_element(values.begin(), values.end());
  for (double& x : values) x -= top;

  NormalizeResult result{.field = v.with_values(values, OffsetConvention::EqVNormalized)};
  // The plain map flips the additive gauge with factor -(N-1); the 1/N step
  // cancels it exactly, so a c-conjugate start converges in one sweep.
  while (result.sweeps < max_sweeps) {
    const auto mapped = eqv_map(result.field, n, spec);
    double change = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double step = (mapped[i] - values[i]) / n;
      values[i] += step;
      change = std::max(change, std::abs(step));
    }
    result.field = result.field.with_values(values, OffsetConvention::EqVNormalized);
    result.residuals.push_back(change);
    ++result.sweeps;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace mmot
