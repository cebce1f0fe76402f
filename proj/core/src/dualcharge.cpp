#include "mmot/dualcharge.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <ostream>

#include "mmot/csv.hpp"

namespace mmot {

namespace {

void require_dimension(int d) {
  if (d < 3) {
    throw Error(ErrorCode::BadDimension, "dualcharge",
                "the Coulomb dual charge needs d >= 3, got " + std::to_string(d));
  }
}

struct Derivatives {
  double first = 0.0;
  double second = 0.0;
};

// Quadratic through (x0,f0), (x1,f1), (x2,f2) differentiated at x. Divided
// differences vanish exactly on constant data.
Derivatives quadratic_at(double x0, double x1, double x2, double f0, double f1, double f2,
                         double x) {
  const double d01 = (f1 - f0) / (x1 - x0);
  const double d12 = (f2 - f1) / (x2 - x1);
  const double d012 = (d12 - d01) / (x2 - x0);
  return {d01 + d012 * ((x - x0) + (x - x1)), 2.0 * d012};
}

// Cubic through four points, for second-order one-sided derivatives at an
// end of the grid.
Derivatives cubic_at(const double* x, const double* f, double at) {
  const double d01 = (f[1] - f[0]) / (x[1] - x[0]);
  const double d12 = (f[2] - f[1]) / (x[2] - x[1]);
  const double d23 = (f[3] - f[2]) / (x[3] - x[2]);
  const double d012 = (d12 - d01) / (x[2] - x[0]);
  const double d123 = (d23 - d12) / (x[3] - x[1]);
  const double d0123 = (d123 - d012) / (x[3] - x[0]);
  const double u0 = at - x[0];
  const double u1 = at - x[1];
  const double u2 = at - x[2];
  return {d01 + d012 * (u0 + u1) + d0123 * (u0 * u1 + u0 * u2 + u1 * u2),
          2.0 * d012 + 2.0 * d0123 * (u0 + u1 + u2)};
}

// Integral over [a, b] of s^p g(s) for g linear between g_a and g_b,
// expanded in s = a + t so every term is nonnegative.
double linear_moment(double a, double b, double g_a, double g_b, int p) {
  const double h = b - a;
  double left = 0.0;
  double right = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= p; ++k) {
    const double term = binom * std::pow(a, p - k) * std::pow(h, k + 1) / (k + 2.0);
    left += term / (k + 1.0);
    right += term;
    binom = binom * (p - k) / (k + 1.0);
  }
  return g_a * left + g_b * right;
}

}  // namespace

double cd_constant(int d) {
  require_dimension(d);
  const double half = 0.5 * d;
  return d * (d - 2.0) * std::pow(boost::math::constants::pi<double>(), half) /
         boost::math::tgamma(half + 1.0);
}

double sphere_area(int d) {
  const double half = 0.5 * d;
  return 2.0 * std::pow(boost::math::constants::pi<double>(), half) / boost::math::tgamma(half);
}

DualCharge make_charge(int d, std::vector<double> radii, std::vector<double> profile,
                       double tol_positivity) {
  require_dimension(d);
  if (radii.size() != profile.size() || radii.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "dualcharge", "radii and profile must match");
  }
  DualCharge charge;
  charge.dimension = d;
  charge.tol_positivity = tol_positivity;
  const double area = sphere_area(d);
  charge.cumulative_mass.assign(radii.size(), 0.0);
  for (std::size_t i = 1; i < radii.size(); ++i) {
    charge.cumulative_mass[i] =
        charge.cumulative_mass[i - 1] +
        area * linear_moment(radii[i - 1], radii[i], profile[i - 1], profile[i], d - 1);
  }
  charge.total_mass = charge.cumulative_mass.back();
  for (double p : profile) {
    charge.min_value = std::min(charge.min_value, p);
    if (p < -tol_positivity) ++charge.negative_nodes;
  }
  charge.radii = std::move(radii);
  charge.density_values = std::move(profile);
  return charge;
}

DualCharge compute_dual_charge(const PotentialField& v, int d, const DualChargeOptions& options) {
  require_dimension(d);
  if (v.geometry().kind != GeometryKind::RadialSymmetric || v.geometry().dimension != d) {
    throw Error(ErrorCode::WrongGeometry, "dualcharge",
                "the dual charge needs a radial potential in dimension " + std::to_string(d));
  }
  const auto& r = v.nodes();
  const auto& f = v.values();
  const std::size_t m = r.size();
  if (m < 5) throw Error(ErrorCode::GridTooCoarse, "dualcharge", "need at least 5 grid nodes");

  const double c_d = cd_constant(d);
  std::vector<double> profile(m);
  for (std::size_t i = 0; i < m; ++i) {
    double lap = 0.0;
    if (i == 0 && r[0] == 0.0) {
      // Even extension: v'(0) = 0 and (d-1) v'/r -> (d-1) v''(0).
      const double second = 2.0 * (f[1] - f[0]) / (r[1] * r[1]);
      lap = d * second;
    } else if (i == 0 && r[0] <= r[1] - r[0]) {
      // Near the origin: mirror node -r0 carries the value at r0.
      const auto q = quadratic_at(-r[0], r[0], r[1], f[0], f[0], f[1], r[0]);
      lap = q.second + (d - 1) * q.first / r[0];
    } else if (i == 0) {
      const auto q = cubic_at(&r[0], &f[0], r[0]);
      lap = q.second + (d - 1) * q.first / r[0];
    } else if (i + 1 == m) {
      const auto q = cubic_at(&r[m - 4], &f[m - 4], r[i]);
      lap = q.second + (d - 1) * q.first / r[i];
    } else {
      const auto q = quadratic_at(r[i - 1], r[i], r[i + 1], f[i - 1], f[i], f[i + 1], r[i]);
      lap = q.second + (d - 1) * q.first / r[i];
    }
    profile[i] = lap / c_d;
  }
  if (options.mollify) {
    std::vector<double> smooth = profile;
    for (std::size_t i = 1; i + 1 < m; ++i) {
      smooth[i] = (profile[i - 1] + profile[i] + profile[i + 1]) / 3.0;
    }
    profile = std::move(smooth);
  }
  auto charge = make_charge(d, r, std::move(profile), options.tol_positivity);
  charge.mollified = options.mollify;
  return charge;
}

PotentialField potential_from_charge(const DualCharge& charge) {
  const int d = charge.dimension;
  const auto& r = charge.radii;
  const auto& q = charge.cumulative_mass;
  const std::size_t m = r.size();
  const double area = sphere_area(d);
  // s^(2-d) dQ(s) = area * s * profile(s) ds, regular at the origin.
  std::vector<double> outer(m, 0.0);
  for (std::size_t i = m - 1; i-- > 0;) {
    outer[i] = outer[i + 1] + area * linear_moment(r[i], r[i + 1], charge.density_values[i],
                                                   charge.density_values[i + 1], 1);
  }
  std::vector<double> u(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double inner = r[i] > 0.0 ? q[i] / std::pow(r[i], d - 2) : 0.0;
    u[i] = -(inner + outer[i]);
  }
  return PotentialField(Geometry::radial(d), r, std::move(u), OffsetConvention::VanishingAtInfinity);
}

void write_charge_csv(std::ostream& out, const DualCharge& charge) {
  CsvWriter csv(out, {"r", "profile", "cumulative_mass"});
  for (std::size_t i = 0; i < charge.radii.size(); ++i) {
    csv.row({charge.radii[i], charge.density_values[i], charge.cumulative_mass[i]});
  }
}

}  // namespace mmot
