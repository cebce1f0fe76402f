#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mmot/analysis.hpp"
#include "mmot/error.hpp"
#include "mmot/ingest.hpp"
#include "mmot/solvers.hpp"

using namespace mmot;

namespace {

const CostSpec kCoulomb{1.0, 0.0};

std::vector<double> linspace(double a, double b, std::size_t m) {
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = a + (b - a) * i / (m - 1.0);
  return x;
}

template <class F>
PotentialField sampled(const std::vector<double>& nodes, F f) {
  std::vector<double> values;
  for (double x : nodes) values.push_back(f(x));
  return PotentialField(Geometry::line(), nodes, values);
}

}  // namespace

TEST_CASE("fit_tail recovers an exact model") {
  const auto v = sampled(linspace(0, 50, 201), [](double r) { return 5.0 - 2.0 / r; });
  const auto fit = fit_tail(v, 1.0, 3, 10.0, 45.0);
  CHECK(fit.coefficient == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(fit.offset == doctest::Approx(-5.0).epsilon(1e-10));
  CHECK(fit.residual < 1e-10);
  CHECK(fit.target == doctest::Approx(-2.0));
  CHECK(fit.relative_error() < 1e-10);
}

TEST_CASE("fit_tail converges to the leading coefficient as the window recedes") {
  const auto v = sampled(linspace(0, 200, 2001),
                         [](double r) { return -2.0 / r + 7.0 / std::pow(r, 3); });
  double previous = std::numeric_limits<double>::infinity();
  for (double r_min : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double err = std::abs(fit_tail(v, 1.0, 3, r_min, 4 * r_min).coefficient + 2.0);
    CHECK(err < previous);
    previous = err;
  }
  // The r^-3 term biases the coefficient by O(r_min^-2).
  CHECK(previous < 1e-2);
}

TEST_CASE("fit_tail default window and errors") {
  const auto v = sampled(linspace(0, 40, 81), [](double r) { return -1.0 / std::max(r, 1.0); });
  const auto fit = fit_tail(v, 1.0, 2);
  CHECK(fit.r_min == doctest::Approx(20.0));
  CHECK(fit.r_max == doctest::Approx(36.0));
  CHECK(fit.coefficient == doctest::Approx(-1.0));
  try {
    fit_tail(v, 1.0, 2, 30.0, 31.0);
    FAIL("expected WindowTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowTooSmall);
  }
  std::ostringstream out;
  write_tail_csv(out, v, fit);
  CHECK(out.str().rfind("r,v,model\n", 0) == 0);
}

TEST_CASE("check_dissociation examples") {
  const Density density(Geometry::line(), {-10.0, 0.0, 1.0, 10.0}, {0.5, 0.5, 0.5, 0.5}, 2);
  // Two points at norm 10 in one configuration.
  const TransportPlan adversarial({{{-10.0, 10.0}, 0.3}, {{0.0, 1.0}, 0.7}}, density);
  const auto report = check_dissociation(adversarial, {5.0});
  CHECK(report.violating[0] == doctest::Approx(0.3));
  CHECK(report.r_star == doctest::Approx(10.0));

  const TransportPlan inside({{{0.0, 1.0}, 1.0}}, density);
  const auto contained = check_dissociation(inside, {1.0, 5.0});
  CHECK(contained.violating == std::vector<double>{0.0, 0.0});
}

TEST_CASE("exact plans on exponential tails dissociate") {
  const Density density = make_exponential(1.0, 8.0, 32, 3);
  const auto solved = solve_exact_lp(density, kCoulomb);
  const auto report = check_dissociation(solved.plan, linspace(1, 8, 8));
  CHECK(report.pass);
  CHECK(report.r_star < report.max_norm);
  for (std::size_t k = 0; k < report.radii.size(); ++k) {
    if (report.radii[k] >= report.r_star) CHECK(report.violating[k] == 0.0);
  }
}

TEST_CASE("swap_violation: swapping a slot with itself is neutral") {
  const Configuration x{0.0, 1.0, 3.0};
  for (std::size_t slot = 0; slot < 3; ++slot) {
    CHECK(swap_violation(x, x, slot, kCoulomb) == 0.0);
  }
}

TEST_CASE("audit passes on optimal plans and catches a corruption") {
  const Density density = make_exponential(1.0, 8.0, 24, 2);
  const auto solved = solve_exact_lp(density, kCoulomb);
  const auto audit = audit_cyclical_monotonicity(solved.plan, kCoulomb, 10000, 42);
  CHECK(audit.exhaustive);
  CHECK(audit.worst_violation <= 1e-9);
  CHECK(audit.violating_pairs.empty());

  const auto corrupted = corrupt_plan(solved.plan, kCoulomb);
  CHECK(corrupted.plan.marginal_error() < 1e-12);
  const auto& s = corrupted.plan.support();
  const Configuration& x = s[corrupted.first].points;
  const Configuration& y = s[corrupted.second].points;
  Configuration xs = x;
  Configuration ys = y;
  std::swap(xs[corrupted.slot], ys[corrupted.slot]);
  // Four config_cost calls give the hand value of the swap test.
  const double by_hand =
      config_cost(x, kCoulomb) + config_cost(y, kCoulomb) - config_cost(xs, kCoulomb) -
      config_cost(ys, kCoulomb);
  CHECK(std::abs(by_hand - corrupted.expected_violation) < 1e-12);
  CHECK(corrupted.expected_violation > 0.0);

  const auto bad = audit_cyclical_monotonicity(corrupted.plan, kCoulomb, 10000, 42);
  CHECK(bad.worst_violation >= corrupted.expected_violation - 1e-12);
  const bool found = std::any_of(bad.violating_pairs.begin(), bad.violating_pairs.end(),
                                 [&](const SwapViolation& p) {
                                   return p.first == corrupted.first &&
                                          p.second == corrupted.second &&
                                          p.slot == corrupted.slot;
                                 });
  CHECK(found);
}

TEST_CASE("sampled audit is deterministic per seed") {
  const Density density = make_uniform(0.0, 1.0, 64, 3);
  const auto solved = seidl_map_1d(density, kCoulomb);
  const auto a = audit_cyclical_monotonicity(solved.plan, kCoulomb, 50, 7);
  const auto b = audit_cyclical_monotonicity(solved.plan, kCoulomb, 50, 7);
  CHECK_FALSE(a.exhaustive);
  CHECK(a.samples_checked == 50);
  CHECK(a.worst_violation == b.worst_violation);
}

TEST_CASE("min_separation examples") {
  const Density two(Geometry::line(), {0.0, 1.0}, {1.0, 1.0}, 2);
  CHECK(min_separation(TransportPlan({{{0.0, 1.0}, 0.5}, {{1.0, 0.0}, 0.5}}, two)) == 1.0);
  CHECK(min_separation(TransportPlan({{{1.0, 1.0}, 0.5}, {{0.0, 0.0}, 0.5}}, two)) == 0.0);
  const auto seidl = seidl_map_1d(make_uniform(0.0, 1.0, 64, 2), kCoulomb);
  CHECK(min_separation(seidl.plan) == doctest::Approx(0.5));
}

TEST_CASE("binding ladder on a synthetic plateau potential") {
  const auto nodes = linspace(-20, 20, 81);
  const auto v = sampled(nodes, [](double r) { return -1.0 / std::max(std::abs(r), 1.0); });
  const auto ladder = binding_ladder(v, 2, kCoulomb);
  CHECK(ladder.ladder.values[0] == doctest::Approx(-1.0));
  // Brute force over ordered pairs of distinct nodes.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (i == j) continue;
      best = std::min(best, v.values()[i] + v.values()[j] + riesz_cost(nodes[i], nodes[j], kCoulomb));
    }
  }
  CHECK(ladder.ladder.values[1] == doctest::Approx(best).epsilon(1e-12));
  CHECK(ladder.ladder.values[1] <= ladder.ladder.values[0]);
}

TEST_CASE("binding ladder flags the degenerate zero potential") {
  const auto v = sampled(linspace(-5, 5, 21), [](double) { return 0.0; });
  const auto ladder = binding_ladder(v, 3, CostSpec{1.0, 0.5});
  CHECK(ladder.ladder.values[0] == 0.0);
  CHECK_FALSE(ladder.shape_pass);
  CHECK_FALSE(ladder.pass());
}

TEST_CASE("binding ladder on a computed N = 3 potential") {
  const Density density = make_exponential(1.0, 40.0, 256, 3);
  const auto solved = seidl_map_1d(density, kCoulomb);
  const CostSpec spec{1.0, min_separation(solved.plan) / 2};
  const auto normalized = eqv_normalize(solved.dual_potential, 3, spec);
  REQUIRE(normalized.converged);
  const auto gauged = vanishing_gauge(normalized.field, 3, spec);
  CHECK(gauged.convention() == OffsetConvention::VanishingAtInfinity);
  const auto ladder = binding_ladder(gauged, 3, spec);
  CHECK(ladder.equal_pass);
  CHECK(ladder.strict_pass);
  CHECK(ladder.monotone_pass);
  CHECK(ladder.margins.at(0) > 0.0);
}
