#include <algorithm>
#include <cmath>
#include <limits>

#include "mmot/grid_search.hpp"
#include "mmot/simplex.hpp"
#include "mmot/solvers.hpp"

namespace mmot {

const char* to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::ExactLP: return "ExactLP";
    case SolveMethod::Sinkhorn: return "Sinkhorn";
    case SolveMethod::Seidl1D: return "Seidl1D";
  }
  return "Unknown";
}

double grid_min_energy(std::span<const double> nodes, std::span<const double> v, int n,
                       const CostSpec& spec) {
  if (multiset_count(nodes.size(), n) > 200'000'000) {
    return std::numeric_limits<double>::infinity();
  }
  const auto cost = build_cost_tensor(nodes, spec);
  return grid_minimize(cost, v, n).value;
}

namespace {

// Columns are ordered N-tuples of node indices in mixed radix (slot 0 most
// significant). Rows are the slot marginals; the row of node 0 is dropped
// for every slot but the first since each slot's rows sum to the same total.
class MultimarginalModel final : public LinearProgramModel {
 public:
  MultimarginalModel(const CostMatrix& scaled_cost, std::vector<double> mu, int n)
      : cost_(scaled_cost), mu_(std::move(mu)), n_(n), m_(mu_.size()) {
    columns_ = checked_pow(m_, n_);
    rows_ = m_ + static_cast<std::size_t>(n_ - 1) * (m_ - 1);
    rhs_.reserve(rows_);
    for (int k = 0; k < n_; ++k) {
      for (std::size_t i = (k == 0 ? 0 : 1); i < m_; ++i) rhs_.push_back(mu_[i]);
    }
    slot_duals_.assign(static_cast<std::size_t>(n_), std::vector<double>(m_, 0.0));
    index_.resize(static_cast<std::size_t>(n_));
  }

  std::size_t num_rows() const override { return rows_; }
  std::size_t num_columns() const override { return columns_; }
  std::span<const double> rhs() const override { return rhs_; }

  // Row of (slot, node), or SIZE_MAX for a dropped row.
  std::size_t row_of(int slot, std::size_t node) const {
    if (slot == 0) return node;
    if (node == 0) return std::numeric_limits<std::size_t>::max();
    return m_ + static_cast<std::size_t>(slot - 1) * (m_ - 1) + (node - 1);
  }

  std::vector<std::size_t> decode(std::size_t column) const {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n_));
    for (int k = n_ - 1; k >= 0; --k) {
      idx[k] = column % m_;
      column /= m_;
    }
    return idx;
  }

  double cost(std::size_t column) const override {
    const auto idx = decode(column);
    double c = 0.0;
    for (int a = 0; a < n_; ++a) {
      for (int b = a + 1; b < n_; ++b) c += cost_(idx[a], idx[b]);
    }
    return c;
  }

  void column(std::size_t column, std::vector<SparseEntry>& out) const override {
    out.clear();
    const auto idx = decode(column);
    for (int k = 0; k < n_; ++k) {
      const auto r = row_of(k, idx[k]);
      if (r != std::numeric_limits<std::size_t>::max()) out.push_back({r, 1.0});
    }
  }

  PricingResult price(std::span<const double> duals, PricingRule rule, double tol,
                      bool zero_costs) const override {
    for (int k = 0; k < n_; ++k) {
      for (std::size_t i = 0; i < m_; ++i) {
        const auto r = row_of(k, i);
        slot_duals_[k][i] = r == std::numeric_limits<std::size_t>::max() ? 0.0 : duals[r];
      }
    }
    PricingResult best;
    scan(0, 0, 0.0, 0.0, rule, tol, zero_costs, best);
    return best;
  }

 private:
  // Returns true to abort the scan (Bland found a column).
  bool scan(int depth, std::size_t base, double partial_cost, double partial_dual,
            PricingRule rule, double tol, bool zero_costs, PricingResult& best) const {
    const auto& y = slot_duals_[depth];
    for (std::size_t i = 0; i < m_; ++i) {
      double c = partial_cost;
      for (int d = 0; d < depth; ++d) c += cost_(index_[d], i);
      const double dual = partial_dual + y[i];
      const std::size_t col = base * m_ + i;
      if (depth == n_ - 1) {
        const double reduced = (zero_costs ? 0.0 : c) - dual;
        if (reduced < -tol && (!best.found || reduced < best.reduced_cost)) {
          best = {true, col, reduced};
          if (rule == PricingRule::Bland) return true;
        }
      } else {
        index_[depth] = i;
        if (scan(depth + 1, col, c, dual, rule, tol, zero_costs, best)) return true;
      }
    }
    return false;
  }

  const CostMatrix& cost_;
  std::vector<double> mu_;
  int n_;
  std::size_t m_;
  std::size_t columns_ = 0;
  std::size_t rows_ = 0;
  std::vector<double> rhs_;
  mutable std::vector<std::vector<double>> slot_duals_;
  mutable std::vector<std::size_t> index_;
};

}  // namespace

SolveResult solve_exact_lp(const Density& density, const CostSpec& spec,
                           const LpOptions& options) {
  const std::size_t m = density.size();
  const int n = density.particle_count();
  if (checked_pow(m, n) > options.max_columns) {
    throw Error(ErrorCode::ScaleGuard, "solvers",
                "m^N = " + std::to_string(m) + "^" + std::to_string(n) +
                    " exceeds the exact LP guard");
  }
  const auto cost = build_cost_tensor(density, spec);
  double scale = cost.max_finite();
  if (!(scale > 0.0)) scale = 1.0;
  std::vector<double> scaled(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = cost(i, j);
      scaled[i * m + j] = c >= kInfiniteCost ? options.sentinel_factor : c / scale;
    }
  }
  const CostMatrix scaled_cost(m, std::move(scaled));
  const MultimarginalModel model(scaled_cost, density.marginal(), n);

  const auto lp = solve_simplex(model);
  if (lp.status == SimplexStatus::Infeasible) {
    throw Error(ErrorCode::InfeasibleDensity, "solvers", "marginal constraints are infeasible");
  }
  if (lp.status != SimplexStatus::Optimal) {
    throw Error(ErrorCode::NoConvergence, "solvers",
                std::string("simplex stopped: ") + to_string(lp.status));
  }

  const auto& nodes = density.nodes();
  std::vector<PlanAtom> support;
  double mass = 0.0;
  for (const auto& entry : lp.primal) {
    if (entry.value <= 1e-15) continue;
    const auto idx = model.decode(entry.row);
    Configuration points(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) points[k] = nodes[idx[k]];
    support.push_back({std::move(points), entry.value});
    mass += entry.value;
  }
  for (auto& atom : support) atom.weight /= mass;
  TransportPlan plan = TransportPlan(std::move(support), density).symmetrized();

  // Symmetrised slot multipliers, in original cost units.
  std::vector<double> v(m, 0.0);
  for (int k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = model.row_of(k, i);
      if (r != std::numeric_limits<std::size_t>::max()) v[i] -= lp.duals[r] * scale / n;
    }
  }

  SolveResult result{
      .plan = plan,
      .primal_value = plan.cost(spec),
      .dual_potential = PotentialField(density.geometry(), nodes, v, OffsetConvention::Raw),
      .method = SolveMethod::ExactLP,
  };
  double dual = 0.0;
  for (std::size_t i = 0; i < m; ++i) dual -= v[i] * density.weights()[i];
  result.tolerances.dual_objective = dual;
  result.tolerances.duality_gap = std::abs(result.primal_value - dual);
  result.tolerances.marginal_error = result.plan.marginal_error();
  result.tolerances.iterations = lp.iterations;
  result.tolerances.converged = true;
  for (const auto& atom : result.plan.support()) {
    if (config_cost(atom.points, spec) >= kInfiniteCost && atom.weight >= 1e-9) {
      result.diagnostics.push_back("plan carries weight on a coincident-point configuration");
      break;
    }
  }
  if (lp.bland_iterations > 0) {
    result.diagnostics.push_back("degenerate pivots resolved with Bland's rule (" +
                                 std::to_string(lp.bland_iterations) + " iterations)");
  }
  return result;
}

}  // namespace mmot
