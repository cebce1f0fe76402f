#pragma once

// Coulomb case s = d - 2: the charge whose attractive potential is v, and
// the inverse map from a radial charge back to its potential.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mmot/model.hpp"

namespace mmot {

/// d (d - 2) pi^(d/2) / Gamma(d/2 + 1), so that -Laplacian |x|^(2-d) = c_d delta.
/// Throws BadDimension for d < 3.
double cd_constant(int d);

/// Area of the unit sphere in R^d.
double sphere_area(int d);

struct DualCharge {
  int dimension = 3;
  std::vector<double> radii;
  /// Radial profile of the charge density.
  std::vector<double> density_values;
  /// Mass inside each radius (piecewise-linear profile integrated exactly).
  std::vector<double> cumulative_mass;
  double total_mass = 0.0;
  bool mollified = false;
  /// Most negative profile value (0 when the profile is nonnegative).
  double min_value = 0.0;
  /// Nodes where the profile is below -tol_positivity.
  std::size_t negative_nodes = 0;
  double tol_positivity = 0.0;
};

/// Builds a charge from a radial profile, filling the cumulative fields.
DualCharge make_charge(int d, std::vector<double> radii, std::vector<double> profile,
                       double tol_positivity = 1e-6);

struct DualChargeOptions {
  /// Three-point moving average of the profile, endpoints untouched.
  bool mollify = false;
  double tol_positivity = 1e-6;
};

/// profile = Laplacian(v) / c_d with the radial Laplacian v'' + (d-1) v' / r
/// from quadratic divided differences (cubic one-sided at the ends, even extension
/// about r = 0 when the grid starts near the origin). Constants map to an
/// exactly zero profile. Throws WrongGeometry (not radial in dimension d),
/// BadDimension, GridTooCoarse (< 5 nodes).
DualCharge compute_dual_charge(const PotentialField& v, int d,
                               const DualChargeOptions& options = {});

/// Shell decomposition U(r) = -[Q(r) / r^(d-2) + int_{s>r} s^(2-d) dQ(s)]
/// with the piecewise-linear profile integrated exactly against both weights.
PotentialField potential_from_charge(const DualCharge& charge);

/// Rows r, profile, cumulative mass.
void write_charge_csv(std::ostream& out, const DualCharge& charge);

}  // namespace mmot
