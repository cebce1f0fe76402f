#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mmot/grid_search.hpp"
#include "mmot/solvers.hpp"

namespace mmot {

namespace {

// Position inside one quantile interval of length 1/N, stored both as the
// distance from the interval start and to its end. Each is summed from the
// nearer side of the distribution so atoms deep in either tail keep their
// (tiny) masses.
struct Position {
  double lo = 0.0;
  double hi = 0.0;
};

struct Event {
  Position at;
  int chain = 0;
  std::size_t from = 0;
  std::size_t to = 0;
};

constexpr double kSnap = 1e-13;

}  // namespace

SolveResult seidl_map_1d(const Density& density, const CostSpec& spec) {
  if (density.geometry().kind != GeometryKind::Line1D) {
    throw Error(ErrorCode::WrongGeometry, "solvers",
                "the explicit 1D construction requires Line1D geometry");
  }
  const int n = density.particle_count();
  const auto& nodes = density.nodes();
  const auto mu = density.marginal();
  const std::size_t m = nodes.size();
  const double width = 1.0 / n;

  // prefix[j] = mass strictly left of atom j; suffix[j] = mass of atoms >= j.
  std::vector<double> prefix(m + 1, 0.0);
  std::vector<double> suffix(m + 1, 0.0);
  for (std::size_t j = 0; j < m; ++j) prefix[j + 1] = prefix[j] + mu[j];
  for (std::size_t j = m; j-- > 0;) suffix[j] = suffix[j + 1] + mu[j];

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < m; ++j) {
    if (mu[j] > 0.0) active.push_back(j);
  }

  // Position of the right edge of atom j inside interval k.
  auto edge_in = [&](std::size_t j, int k) {
    Position p;
    p.lo = prefix[j + 1] - k * width;
    p.hi = suffix[j + 1] - (n - k - 1) * width;
    if (k == 0) p.lo = prefix[j + 1];
    if (k == n - 1) p.hi = suffix[j + 1];
    return p;
  };
  auto before = [&](const Position& a, const Position& b) {
    const bool a_low = a.lo <= 0.5 * width;
    const bool b_low = b.lo <= 0.5 * width;
    if (a_low && b_low) return a.lo < b.lo;
    if (!a_low && !b_low) return a.hi > b.hi;
    return a_low;
  };
  auto gap = [&](const Position& a, const Position& b) {
    if (a.lo > 0.5 * width && b.lo > 0.5 * width) return a.hi - b.hi;
    return b.lo - a.lo;
  };

  // Per chain: the atom occupied at local position 0 and the ordered events.
  // An atom straddling the boundary k/N is shared by chains k-1 and k. When
  // the boundary falls exactly between atoms, chain k starts on the last atom
  // of chain k-1 and leaves it at position 0; this zero-mass step links the
  // chains for the dual while adding nothing to the plan.
  std::vector<std::size_t> start(static_cast<std::size_t>(n));
  std::vector<Event> events;
  for (int k = 0; k < n; ++k) {
    const double boundary = k * width;
    std::size_t first = active.size();
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t j = active[a];
      // The first interval starts with the mass itself: no snap needed.
      const double right = k == 0 ? prefix[j + 1] : prefix[j + 1] - boundary;
      if (right > (k == 0 ? 0.0 : kSnap)) {
        first = a;
        break;
      }
    }
    if (first == active.size()) {
      throw Error(ErrorCode::InfeasibleDensity, "solvers", "quantile boundary beyond the mass");
    }
    std::size_t a = first;
    const double left_gap = prefix[active[first]] - boundary;
    if (k > 0 && std::abs(left_gap) <= kSnap && first > 0) {
      start[k] = active[first - 1];
      events.push_back({Position{0.0, width}, k, active[first - 1], active[first]});
    } else {
      start[k] = active[first];
    }
    // Walk right until the interval end is reached. The last interval ends
    // with the mass itself, so its suffix sums are exact and need no snap.
    const double end_snap = k == n - 1 ? 0.0 : kSnap;
    while (a + 1 < active.size()) {
      const std::size_t j = active[a];
      const Position edge = edge_in(j, k);
      if (edge.hi <= end_snap) break;
      events.push_back({edge, k, j, active[a + 1]});
      ++a;
    }
  }
  std::stable_sort(events.begin(), events.end(), [&](const Event& e1, const Event& e2) {
    if (before(e1.at, e2.at)) return true;
    if (before(e2.at, e1.at)) return false;
    return e1.chain < e2.chain;
  });

  // Walk the merged events. Every configuration, including zero-mass ones,
  // contributes one difference equation v(to) - v(from) = c(before) - c(after).
  std::vector<std::size_t> current = start;
  auto config_of = [&](const std::vector<std::size_t>& idx) {
    Configuration c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) c[k] = nodes[idx[k]];
    return c;
  };
  std::vector<PlanAtom> base;
  std::vector<double> v(m, std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> known(m, false);
  struct Link {
    std::size_t from, to;
    double delta;
  };
  std::vector<Link> links;

  Position prev{0.0, width};
  double cost_now = config_cost(config_of(current), spec);
  for (const auto& e : events) {
    const double w = gap(prev, e.at);
    if (w > 0.0) base.push_back({config_of(current), w * n});
    prev = e.at;
    current[e.chain] = e.to;
    const double cost_next = config_cost(config_of(current), spec);
    links.push_back({e.from, e.to, cost_now - cost_next});
    cost_now = cost_next;
  }
  {
    const double w = gap(prev, Position{width, 0.0});
    if (w > 0.0) base.push_back({config_of(current), w * n});
  }

  // Links form a path through all active atoms; propagate until stable. A
  // linking step that lands on a coincident configuration carries no finite
  // equation, which splits the path into components with free offsets.
  std::vector<int> component(m, -1);
  int components = 0;
  for (std::size_t seed : active) {
    if (component[seed] >= 0) continue;
    v[seed] = 0.0;
    known[seed] = true;
    component[seed] = components;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& l : links) {
        if (!(std::abs(l.delta) < 0.5 * kInfiniteCost)) continue;
        if (known[l.from] && !known[l.to] && component[l.from] == components) {
          v[l.to] = v[l.from] + l.delta;
          known[l.to] = true;
          component[l.to] = components;
          changed = true;
        } else if (known[l.to] && !known[l.from] && component[l.to] == components) {
          v[l.from] = v[l.to] - l.delta;
          known[l.from] = true;
          component[l.from] = components;
          changed = true;
        }
      }
    }
    ++components;
  }

  // Offsets: every configuration in the support must satisfy sum v + c = 0.
  // With a single component this only fixes the gauge; otherwise take the
  // minimum-norm least-squares solution over the component offsets.
  std::vector<std::vector<std::size_t>> support_idx{start};
  for (const auto& e : events) {
    support_idx.push_back(support_idx.back());
    support_idx.back()[e.chain] = e.to;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(support_idx.size()),
                                            components);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(support_idx.size()));
  Eigen::Index rows = 0;
  for (const auto& idx : support_idx) {
    const double c = config_cost(config_of(idx), spec);
    if (c >= kInfiniteCost) continue;
    double s = c;
    for (std::size_t k : idx) {
      s += v[k];
      a(rows, component[k]) += 1.0;
    }
    rhs(rows++) = -s;
  }
  const Eigen::VectorXd offset =
      a.topRows(rows).completeOrthogonalDecomposition().solve(rhs.head(rows));
  for (std::size_t j : active) v[j] += offset(component[j]);
  std::vector<std::string> diagnostics;
  if (components > 1) {
    diagnostics.push_back("dual assembled from " + std::to_string(components) +
                          " disconnected chain components");
  }

  // Atoms without mass (or unreached) get the c-transform of the rest.
  {
    const auto cost = build_cost_tensor(nodes, spec);
    std::vector<double> unary(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (known[i]) continue;
      for (std::size_t j = 0; j < m; ++j) {
        unary[j] = known[j] ? v[j] + cost(i, j) : kInfiniteCost;
      }
      v[i] = -grid_minimize(cost, unary, n - 1).value;
    }
  }

  TransportPlan plan = TransportPlan(std::move(base), density).symmetrized();
  SolveResult result{
      .plan = plan,
      .primal_value = plan.cost(spec),
      .dual_potential = PotentialField(density.geometry(), nodes, v, OffsetConvention::Raw),
      .method = SolveMethod::Seidl1D,
      .diagnostics = diagnostics,
  };
  const double e = grid_min_energy(nodes, v, n, spec);
  if (std::isfinite(e) && e < 0.0) {
    if (-e > 1e-9 * (1.0 + std::abs(result.primal_value))) {
      result.diagnostics.push_back("dual feasibility restored by shifting " + std::to_string(e));
    }
    std::vector<double> shifted = v;
    for (double& x : shifted) x -= e / n;
    result.dual_potential = result.dual_potential.with_values(shifted, OffsetConvention::Raw);
  }
  double dual = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    dual -= result.dual_potential.values()[i] * density.weights()[i];
  }
  result.tolerances.dual_objective = dual;
  result.tolerances.duality_gap = std::abs(result.primal_value - dual);
  result.tolerances.marginal_error = result.plan.marginal_error();
  result.tolerances.iterations = events.size();
  for (const auto& atom : result.plan.support()) {
    if (config_cost(atom.points, spec) >= kInfiniteCost) {
      result.diagnostics.push_back("plan carries weight on a coincident-point configuration");
      break;
    }
  }
  return result;
}

}  // namespace mmot
