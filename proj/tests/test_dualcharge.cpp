#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "mmot/analysis.hpp"
#include "mmot/dualcharge.hpp"
#include "mmot/error.hpp"

using namespace mmot;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double a, double b, std::size_t m) {
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = a + (b - a) * i / (m - 1.0);
  return x;
}

double bump(double r) { return r < 1.0 ? std::pow(1.0 - r * r, 4) : 0.0; }

// Max profile error of the charge -> potential -> charge round trip.
double round_trip_error(int d, std::size_t m) {
  const auto r = linspace(0.0, 2.0, m);
  std::vector<double> g;
  for (double x : r) g.push_back(bump(x));
  const auto charge = make_charge(d, r, g);
  const auto back = compute_dual_charge(potential_from_charge(charge), d);
  double err = 0.0;
  for (std::size_t i = 0; i < m; ++i) err = std::max(err, std::abs(back.density_values[i] - g[i]));
  return err;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an mmot::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("cd_constant closed forms") {
  CHECK(cd_constant(3) == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(cd_constant(3) == doctest::Approx(12.566370614359172).epsilon(1e-15));
  CHECK(cd_constant(4) == doctest::Approx(4 * kPi * kPi).epsilon(1e-15));
  CHECK(cd_constant(6) == doctest::Approx(4 * kPi * kPi * kPi).epsilon(1e-15));
  CHECK(code_of([] { cd_constant(2); }) == ErrorCode::BadDimension);
  CHECK(sphere_area(3) == doctest::Approx(4 * kPi));
}

TEST_CASE("the fundamental solution is harmonic away from the origin") {
  double previous_mass = std::numeric_limits<double>::infinity();
  for (std::size_t m : {491, 981, 1961}) {
    const auto r = linspace(1.0, 50.0, m);
    std::vector<double> v;
    for (double x : r) v.push_back(-2.0 / x);
    const auto charge = compute_dual_charge(PotentialField(Geometry::radial(3), r, v), 3);
    // Interior stencils are exact up to rounding; the one-sided end stencils
    // carry the discretization error.
    for (std::size_t i = 3; i + 3 < m; ++i) CHECK(std::abs(charge.density_values[i]) < 1e-10);
    CHECK(std::abs(charge.total_mass) < 0.02);
    CHECK(std::abs(charge.total_mass) < previous_mass);
    previous_mass = std::abs(charge.total_mass);
  }
}

TEST_CASE("constants have zero charge") {
  const PotentialField flat(Geometry::radial(3), linspace(0, 4, 9), std::vector<double>(9, -3.0));
  const auto charge = compute_dual_charge(flat, 3);
  for (double p : charge.density_values) CHECK(p == 0.0);
  CHECK(charge.total_mass == 0.0);
}

TEST_CASE("round trip recovers a smooth profile at second order") {
  for (int d : {3, 4}) {
    double previous = round_trip_error(d, 101);
    CHECK(previous < 1e-2);
    for (std::size_t m : {201, 401}) {
      const double err = round_trip_error(d, m);
      CHECK(std::log2(previous / err) > 1.8);
      previous = err;
    }
  }
}

TEST_CASE("point-like charge has a Newtonian potential outside its bin") {
  const auto r = linspace(0.0, 10.0, 1001);
  std::vector<double> g(r.size(), 0.0);
  g[0] = 1.0;
  const auto charge = make_charge(3, r, g);
  const double q = charge.total_mass;
  CHECK(q > 0.0);
  const auto u = potential_from_charge(charge);
  for (std::size_t i = 10; i < r.size(); i += 50) {
    CHECK(u.values()[i] == doctest::Approx(-q / r[i]).epsilon(1e-9));
  }
}

TEST_CASE("far field of a compact charge carries its total mass") {
  for (int d : {3, 5}) {
    const auto r = linspace(0.0, 20.0, 801);
    std::vector<double> g;
    for (double x : r) g.push_back(bump(x));
    const auto charge = make_charge(d, r, g);
    const auto u = potential_from_charge(charge);
    const auto fit = fit_tail(u, d - 2.0, 2, 10.0, 18.0);
    CHECK(fit.coefficient == doctest::Approx(-charge.total_mass).epsilon(1e-9));
    CHECK(std::abs(fit.offset) < 1e-9);
  }
}

TEST_CASE("compute_dual_charge preconditions") {
  const PotentialField line(Geometry::line(), linspace(0, 1, 8), std::vector<double>(8, 0.0));
  CHECK(code_of([&] { compute_dual_charge(line, 3); }) == ErrorCode::WrongGeometry);
  const PotentialField radial(Geometry::radial(3), linspace(0, 1, 8), std::vector<double>(8, 0.0));
  CHECK(code_of([&] { compute_dual_charge(radial, 4); }) == ErrorCode::WrongGeometry);
  const PotentialField coarse(Geometry::radial(3), linspace(0, 1, 4), std::vector<double>(4, 0.0));
  CHECK(code_of([&] { compute_dual_charge(coarse, 3); }) == ErrorCode::GridTooCoarse);
}

TEST_CASE("positivity diagnostics and mollifier") {
  const auto r = linspace(0.0, 4.0, 41);
  std::vector<double> g;
  for (double x : r) g.push_back(std::cos(3 * x));
  const auto charge = make_charge(3, r, g, 1e-6);
  CHECK(charge.negative_nodes > 0);
  CHECK(charge.min_value < 0.0);
  std::vector<double> v;
  for (double x : r) v.push_back(x * x);
  const PotentialField field(Geometry::radial(3), r, v);
  DualChargeOptions options;
  options.mollify = true;
  const auto mollified = compute_dual_charge(field, 3, options);
  CHECK(mollified.mollified);
  // Laplacian of r^2 in 3D is 6 everywhere.
  for (double p : mollified.density_values) CHECK(p == doctest::Approx(6.0 / (4 * kPi)));
  std::ostringstream out;
  write_charge_csv(out, mollified);
  CHECK(out.str().rfind("r,profile,cumulative_mass\n", 0) == 0);
}
