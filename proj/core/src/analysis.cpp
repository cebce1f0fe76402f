#include "mmot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mmot/csv.hpp"

namespace mmot {

double TailFit::relative_error() const {
  return std::abs(coefficient - target) / std::abs(target);
}

namespace {

std::vector<std::size_t> window_nodes(const PotentialField& v, double r_min, double r_max) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = v.nodes()[i];
    if (r > 0.0 && r >= r_min && r <= r_max) idx.push_back(i);
  }
  return idx;
}

double second_largest_norm(const Configuration& c) {
  double first = 0.0;
  double second = 0.0;
  for (double x : c) {
    const double r = std::abs(x);
    if (r > first) {
      second = first;
      first = r;
    } else if (r > second) {
      second = r;
    }
  }
  return second;
}

struct Weighted {
  double second = 0.0;
  double largest = 0.0;
  double weight = 0.0;
};

DissociationReport dissociation(const std::vector<Weighted>& items, std::vector<double> radii) {
  DissociationReport report;
  for (const auto& it : items) {
    report.r_star = std::max(report.r_star, it.second);
    report.max_norm = std::max(report.max_norm, it.largest);
  }
  std::sort(radii.begin(), radii.end());
  report.radii = radii;
  report.pass = true;
  double previous = std::numeric_limits<double>::infinity();
  auto violating_at = [&](double r) {
    double mass = 0.0;
    for (const auto& it : items) {
      if (it.second > r) mass += it.weight;
    }
    return mass;
  };
  for (double r : radii) {
    const double mass = violating_at(r);
    report.violating.push_back(mass);
    if (mass > previous) report.pass = false;
    if (r >= report.r_star && mass != 0.0) report.pass = false;
    previous = mass;
  }
  if (violating_at(report.r_star) != 0.0) report.pass = false;
  return report;
}

// SplitMix64 finaliser; indexing the stream by counter makes any partition of
// the sample range reproduce the serial sequence.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t draw(std::uint64_t seed, std::uint64_t counter) {
  return mix(seed + (counter + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace

TailFit fit_tail(const PotentialField& v, double s, int n, double r_min, double r_max) {
  const auto idx = window_nodes(v, r_min, r_max);
  if (idx.size() < 4) {
    throw Error(ErrorCode::WindowTooSmall, "analysis",
                "tail window holds " + std::to_string(idx.size()) + " nodes; need at least 4");
  }
  // Centred normal equations for v = a + b t with t = r^(-s).
  const double count = static_cast<double>(idx.size());
  double t_mean = 0.0;
  double v_mean = 0.0;
  for (std::size_t i : idx) {
    t_mean += std::pow(v.nodes()[i], -s);
    v_mean += v.values()[i];
  }
  t_mean /= count;
  v_mean /= count;
  double stt = 0.0;
  double stv = 0.0;
  for (std::size_t i : idx) {
    const double dt = std::pow(v.nodes()[i], -s) - t_mean;
    stt += dt * dt;
    stv += dt * (v.values()[i] - v_mean);
  }
  TailFit fit;
  fit.r_min = r_min;
  fit.r_max = r_max;
  fit.nodes_used = idx.size();
  fit.exponent = s;
  fit.coefficient = stv / stt;
  const double a = v_mean - fit.coefficient * t_mean;
  fit.offset = -a;
  fit.target = -(n - 1.0);
  double sq = 0.0;
  for (std::size_t i : idx) {
    const double e = v.values()[i] - (a + fit.coefficient * std::pow(v.nodes()[i], -s));
    sq += e * e;
  }
  fit.residual = std::sqrt(sq / count);
  return fit;
}

TailFit fit_tail(const PotentialField& v, double s, int n) {
  const double r = std::max(std::abs(v.nodes().front()), std::abs(v.nodes().back()));
  return fit_tail(v, s, n, 0.5 * r, 0.9 * r);
}

void write_tail_csv(std::ostream& out, const PotentialField& v, const TailFit& fit) {
  CsvWriter csv(out, {"r", "v", "model"});
  for (std::size_t i : window_nodes(v, fit.r_min, fit.r_max)) {
    const double r = v.nodes()[i];
    csv.row({r, v.values()[i], -fit.offset + fit.coefficient * std::pow(r, -fit.exponent)});
  }
}

DissociationReport check_dissociation(const TransportPlan& plan, std::vector<double> radii) {
  std::vector<Weighted> items;
  for (const auto& atom : plan.support()) {
    double largest = 0.0;
    for (double x : atom.points) largest = std::max(largest, std::abs(x));
    items.push_back({second_largest_norm(atom.points), largest, atom.weight});
  }
  return dissociation(items, std::move(radii));
}

DissociationReport check_dissociation(const SigmaSet& sigma, std::vector<double> radii) {
  std::vector<Weighted> items;
  for (const auto& c : sigma.configurations) {
    double largest = 0.0;
    for (double x : c) largest = std::max(largest, std::abs(x));
    items.push_back({second_largest_norm(c), largest, 1.0});
  }
  return dissociation(items, std::move(radii));
}

double swap_violation(const Configuration& x, const Configuration& y, std::size_t slot,
                      const CostSpec& spec) {
  Configuration xs = x;
  Configuration ys = y;
  std::swap(xs[slot], ys[slot]);
  return config_cost(x, spec) + config_cost(y, spec) - config_cost(xs, spec) -
         config_cost(ys, spec);
}

MonotonicityAudit audit_cyclical_monotonicity(const TransportPlan& plan, const CostSpec& spec,
                                              std::size_t num_samples, std::uint64_t seed) {
  const auto& support = plan.support();
  const std::size_t size = support.size();
  MonotonicityAudit audit;
  audit.worst_violation = -std::numeric_limits<double>::infinity();
  if (size < 2) {
    audit.worst_violation = 0.0;
    return audit;
  }
  auto check = [&](std::size_t i, std::size_t j) {
    for (std::size_t slot = 0; slot < support[i].points.size(); ++slot) {
      const double v = swap_violation(support[i].points, support[j].points, slot, spec);
      audit.worst_violation = std::max(audit.worst_violation, v);
      if (v > kSwapThreshold && audit.violating_pairs.size() < kMaxRecordedViolations) {
        audit.violating_pairs.push_back({i, j, slot, v});
      }
    }
    ++audit.samples_checked;
  };
  const std::size_t pairs = size * (size - 1) / 2;
  if (pairs <= num_samples) {
    audit.exhaustive = true;
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = i + 1; j < size; ++j) check(i, j);
    }
  } else {
    for (std::size_t t = 0; t < num_samples; ++t) {
      const std::uint64_t a = draw(seed, 2 * t);
      const std::uint64_t b = draw(seed, 2 * t + 1);
      const std::size_t i = a % size;
      const std::size_t j = (i + 1 + b % (size - 1)) % size;
      check(std::min(i, j), std::max(i, j));
    }
  }
  return audit;
}

CorruptedPlan corrupt_plan(const TransportPlan& plan, const CostSpec& spec) {
  const auto& support = plan.support();
  double best = 0.0;
  std::size_t bi = 0;
  std::size_t bj = 0;
  std::size_t bslot = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    for (std::size_t j = i + 1; j < support.size(); ++j) {
      for (std::size_t slot = 0; slot < support[i].points.size(); ++slot) {
        // Raising the cost means the reverse swap of the result violates.
        const double rise = -swap_violation(support[i].points, support[j].points, slot, spec);
        if (rise > best && rise < 0.5 * kInfiniteCost) {
          best = rise;
          bi = i;
          bj = j;
          bslot = slot;
        }
      }
    }
  }
  if (!(best > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "analysis", "no coordinate exchange raises the cost");
  }
  const double moved = std::min(support[bi].weight, support[bj].weight);
  Configuration x = support[bi].points;
  Configuration y = support[bj].points;
  std::swap(x[bslot], y[bslot]);
  std::vector<PlanAtom> atoms;
  for (std::size_t k = 0; k < support.size(); ++k) {
    PlanAtom a = support[k];
    if (k == bi || k == bj) a.weight -= moved;
    if (a.weight > 0.0) atoms.push_back(std::move(a));
  }
  atoms.push_back({x, moved});
  atoms.push_back({y, moved});
  const std::size_t count = atoms.size();
  CorruptedPlan out{
      .plan = TransportPlan(std::move(atoms), plan.marginal_ref()),
      .first = count - 2,
      .second = count - 1,
      .slot = bslot,
  };
  out.expected_violation = config_cost(x, spec) + config_cost(y, spec) -
                           config_cost(support[bi].points, spec) -
                           config_cost(support[bj].points, spec);
  return out;
}

BindingLadder binding_ladder(const PotentialField& v, int n, const CostSpec& spec,
                             double rel_equal, double rel_strict) {
  BindingLadder out;
  out.ladder = energy_ladder(v, n, spec);
  const auto& e = out.ladder.values;
  const double scale = std::abs(e.front());
  out.tol_equal = rel_equal * scale;
  out.tol_strict = rel_strict * scale;
  out.ladder.tolerance = out.tol_equal;
  out.equal_gap = std::abs(e[n - 1] - e[n - 2]);
  out.equal_pass = out.equal_gap <= out.tol_equal;
  out.strict_pass = true;
  for (int k = 2; k <= n - 1; ++k) {
    const double margin = e[k - 2] - e[k - 1] - out.tol_strict;
    out.margins.push_back(margin);
    if (!(margin > 0.0)) out.strict_pass = false;
  }
  out.monotone_pass = true;
  for (int k = 2; k <= n; ++k) {
    if (e[k - 1] > e[k - 2] + out.tol_equal) out.monotone_pass = false;
  }
  out.shape_pass = e.front() < 0.0;
  return out;
}

PotentialField vanishing_gauge(const PotentialField& normalized, int n, const CostSpec& spec) {
  const double limit = evaluate_EK(normalized, n - 1, spec).value;
  const PotentialField shifted = normalized.shifted(limit);
  return shifted.with_values(shifted.values(), OffsetConvention::VanishingAtInfinity);
}

double min_separation(const TransportPlan& plan) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& atom : plan.support()) {
    const auto& p = atom.points;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i + 1; j < p.size(); ++j) best = std::min(best, std::abs(p[i] - p[j]));
    }
  }
  return best;
}

}  // namespace mmot
