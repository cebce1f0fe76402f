#pragma once

// Canonical Kantorovich potential and the ground-state energies E_K(v).
// Radial fields are evaluated on their mirrored signed line, the same
// geometry the solvers work on.

#include <cstddef>
#include <vector>

#include "mmot/model.hpp"

namespace mmot {

/// sum_i v(r_i) + config_cost(c). Throws OutOfDomain for points beyond the
/// grid when v has no tail model.
double total_energy(const Configuration& c, const PotentialField& v, const CostSpec& spec);

/// Line1D view of v: radial fields are extended evenly to negative radii.
PotentialField line_view(const PotentialField& v);

/// Radial field on the given radii from a potential on their signed line:
/// the even part (v(-r) + v(r)) / 2. Radii must be nodes of the line field.
PotentialField radial_restriction(const PotentialField& line, int dimension,
                                  const std::vector<double>& radii);

struct EnergyLevel {
  double value = 0.0;
  Configuration argmin;
  /// False when a minimiser sits within two grid cells of the grid edge.
  bool attained = false;
};

/// Default cap on the number of K-multisets searched by evaluate_EK.
inline constexpr std::size_t kMaxEnergyMultisets = 500'000'000;

/// Exact minimum of total_energy over K-point grid configurations (K = 1 is
/// min v). Ties resolve to the lexicographically smallest configuration.
/// Throws ScaleGuard when the multiset count exceeds max_multisets.
EnergyLevel evaluate_EK(const PotentialField& v, int k, const CostSpec& spec,
                        std::size_t max_multisets = kMaxEnergyMultisets);

struct EnergyLadder {
  /// values[K-1] = E_K(v).
  std::vector<double> values;
  std::vector<Configuration> argmins;
  std::vector<bool> attained;
  double tolerance = 0.0;
};

EnergyLadder energy_ladder(const PotentialField& v, int n, const CostSpec& spec,
                           double tolerance = 0.0);

struct SigmaSet {
  /// Sorted configurations, one per multiset.
  std::vector<Configuration> configurations;
  double energy = 0.0;
  double slack = 0.0;
};

/// All grid N-configurations with total energy <= E_N(v) + slack.
SigmaSet find_sigma(const PotentialField& v, int n, const CostSpec& spec, double slack,
                    std::size_t max_multisets = kMaxEnergyMultisets);

/// True when the sorted configuration is in the set (coordinates compared
/// with relative tolerance 1e-12).
bool sigma_contains(const SigmaSet& sigma, Configuration config);

struct NormalizeResult {
  PotentialField field;
  /// Sup-norm of the update at each sweep.
  std::vector<double> residuals;
  bool converged = false;
  std::size_t sweeps = 0;
};

/// Relaxed fixed-point iteration v <- v + (T(v) - v) / N where
/// T(v)(x) = -min over (N-1)-point grid configurations y of
/// sum v(y_i) + c(x, y). The fixed point satisfies E_N(v) = 0. The input is
/// first shifted so its maximum is 0. Requires eta > 0.
NormalizeResult eqv_normalize(const PotentialField& v, int n, const CostSpec& spec,
                              double tol = 1e-10, std::size_t max_sweeps = 200);

/// One application of the map T on the grid values of v.
std::vector<double> eqv_map(const PotentialField& v, int n, const CostSpec& spec);

}  // namespace mmot
