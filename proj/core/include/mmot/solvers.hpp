#pragma once

// Optimal plans for the symmetric multimarginal Riesz problem on an atomic
// density: exact LP, log-domain entropic scaling, and the explicit 1D
// quantile-shift construction used as an independent oracle.

#include <cstddef>
#include <string>
#include <vector>

#include "mmot/model.hpp"

namespace mmot {

enum class SolveMethod { ExactLP, Sinkhorn, Seidl1D };

const char* to_string(SolveMethod method);

struct SolveTolerances {
  double marginal_error = 0.0;
  /// |primal - dual objective| where the dual objective is -sum_x v(x) rho(x)
  /// for a potential with E_N(v) >= 0 on the grid.
  double duality_gap = 0.0;
  double dual_objective = 0.0;
  bool converged = true;
  std::size_t iterations = 0;
  double final_residual = 0.0;
};

struct SolveResult {
  TransportPlan plan;
  double primal_value = 0.0;
  /// Raw potential: sum_i v(x_i) + c(x) >= 0 on every grid configuration.
  PotentialField dual_potential;
  SolveMethod method = SolveMethod::ExactLP;
  SolveTolerances tolerances;
  std::vector<std::string> diagnostics;
  /// Primal value after each epsilon stage (entropic solver only).
  std::vector<double> stage_values;
};

struct LpOptions {
  /// Upper bound on m^N.
  std::size_t max_columns = 1'000'000;
  /// Pair cost used for coincident points when eta = 0, as a multiple of
  /// the largest finite pair cost on the grid.
  double sentinel_factor = 1e4;
};

SolveResult solve_exact_lp(const Density& density, const CostSpec& spec,
                           const LpOptions& options = {});

struct SinkhornOptions {
  /// Decreasing entropic temperatures in absolute cost units.
  std::vector<double> epsilon_schedule;
  std::size_t max_iters = 5000;
  /// Target for the L1 marginal residual of the entropic plan.
  double tol = 1e-9;
  /// Upper bound on m^N (one sweep visits every configuration).
  std::size_t max_configurations = 20'000'000;
  double keep_threshold = 1e-12;
  /// History length of the Anderson mixing; 0 gives the plain relaxed update.
  std::size_t anderson_depth = 5;
};

/// Median over distinct node pairs of the pair cost (finite entries only).
double median_pair_cost(const Density& density, const CostSpec& spec);

/// Schedule factors * median_pair_cost.
std::vector<double> scaled_schedule(const Density& density, const CostSpec& spec,
                                    const std::vector<double>& factors);

SolveResult solve_sinkhorn_mm(const Density& density, const CostSpec& spec,
                              const SinkhornOptions& options);

/// Requires Line1D geometry. Atoms straddling a quantile boundary k/N are
/// split so the plan is exact on the grid.
SolveResult seidl_map_1d(const Density& density, const CostSpec& spec = CostSpec{1.0, 0.0});

/// Exhaustive grid search for min over grid^N of sum_i v(x_i) + c(x),
/// used to certify dual feasibility. Returns +inf when m^N exceeds the cap.
double grid_min_energy(std::span<const double> nodes, std::span<const double> v, int n,
                       const CostSpec& spec);

}  // namespace mmot
