#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mmot/csv.hpp"
#include "mmot/error.hpp"
#include "mmot/ingest.hpp"
#include "mmot/model.hpp"

using namespace mmot;

namespace {

// Direct pair sum, written independently of config_cost.
double pair_sum(const std::vector<double>& p, double s, double eta) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double d = std::max(std::abs(p[i] - p[j]), eta);
      total += 1.0 / std::pow(d, s);
    }
  }
  return total;
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

TEST_CASE("riesz_cost examples") {
  CHECK(riesz_cost(0.0, 1.0, CostSpec{1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(riesz_cost(0.0, 0.1, CostSpec{1.0, 0.5}) == doctest::Approx(2.0));
  CHECK(riesz_cost(0.0, 0.0, CostSpec{1.0, 0.0}) == kInfiniteCost);
  CHECK(riesz_cost(2.0, -2.0, CostSpec{2.0, 0.0}) == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("config_cost examples") {
  const std::vector<double> a{0.0, 1.0, 2.0};
  CHECK(config_cost(a, CostSpec{1.0, 0.0}) == doctest::Approx(2.5));
  const std::vector<double> b{0.0, 1.0};
  CHECK(config_cost(b, CostSpec{2.0, 0.0}) == doctest::Approx(1.0));
  const std::vector<double> c{0.0, 0.1, 1.0};
  CHECK(config_cost(c, CostSpec{1.0, 0.5}) == doctest::Approx(2.0 + 1.0 + 1.0 / 0.9));
  const std::vector<double> d{0.3, 0.3, 1.0};
  CHECK(config_cost(d, CostSpec{1.0, 0.0}) >= kInfiniteCost);
}

TEST_CASE("config_cost matches a direct pair sum and is permutation invariant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> expo(0.5, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(2 + trial % 4);
    for (double& x : p) x = coord(rng);
    const CostSpec spec{expo(rng), 0.05};
    const double expected = pair_sum(p, spec.s, spec.eta);
    CHECK(config_cost(p, spec) == doctest::Approx(expected).epsilon(1e-12));
    std::shuffle(p.begin(), p.end(), rng);
    CHECK(config_cost(p, spec) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("CostSpec::make validates") {
  CHECK(code_of([] { CostSpec::make(0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { CostSpec::make(1.0, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(CostSpec::make(2.0, 0.5).eta == 0.5);
}

TEST_CASE("build_cost_tensor examples") {
  const std::vector<double> two{0.0, 1.0};
  const auto c2 = build_cost_tensor(two, CostSpec{1.0, 0.0});
  CHECK(c2(0, 0) == kInfiniteCost);
  CHECK(c2(0, 1) == doctest::Approx(1.0));
  CHECK(c2(1, 0) == doctest::Approx(1.0));
  CHECK(c2(1, 1) == kInfiniteCost);
  const std::vector<double> three{0.0, 1.0, 2.0};
  const auto c3 = build_cost_tensor(three, CostSpec{1.0, 0.0});
  CHECK(c3(0, 1) == doctest::Approx(1.0));
  CHECK(c3(0, 2) == doctest::Approx(0.5));
  CHECK(c3(1, 2) == doctest::Approx(1.0));
  CHECK(c3.max_finite() == doctest::Approx(1.0));
}

TEST_CASE("Density invariants") {
  const Geometry line = Geometry::line();
  CHECK(code_of([&] { Density(line, {0.0, 1.0}, {1.0, 0.5}, 2); }) == ErrorCode::MassMismatch);
  CHECK(code_of([&] { Density(line, {1.0, 0.0}, {1.0, 1.0}, 2); }) ==
        ErrorCode::InfeasibleDensity);
  CHECK(code_of([&] { Density(line, {0.0, 1.0}, {-1.0, 3.0}, 2); }) ==
        ErrorCode::InfeasibleDensity);
  CHECK(code_of([&] { Density(Geometry::radial(3), {-1.0, 1.0}, {1.0, 1.0}, 2); }) ==
        ErrorCode::InfeasibleDensity);
  const auto d = Density::renormalized(line, {0.0, 1.0, 2.0}, {1.0, 1.0, 2.0}, 3);
  CHECK(d.weights()[2] == doctest::Approx(1.5));
  CHECK(d.marginal()[2] == doctest::Approx(0.5));
}

TEST_CASE("mirror_to_line splits radial atoms") {
  const Density radial(Geometry::radial(3), {0.0, 1.0, 2.0}, {0.5, 0.5, 1.0}, 2);
  const Density line = mirror_to_line(radial);
  CHECK(line.geometry().kind == GeometryKind::Line1D);
  const std::vector<double> nodes{-2.0, -1.0, 0.0, 1.0, 2.0};
  const std::vector<double> weights{0.5, 0.25, 0.5, 0.25, 0.5};
  REQUIRE(line.nodes().size() == nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CHECK(line.nodes()[i] == doctest::Approx(nodes[i]));
    CHECK(line.weights()[i] == doctest::Approx(weights[i]));
  }
}

TEST_CASE("TransportPlan marginals, cost and symmetrization") {
  const Density density(Geometry::line(), {0.0, 1.0}, {1.0, 1.0}, 2);
  const TransportPlan plan({{{0.0, 1.0}, 1.0}}, density);
  CHECK(plan.total_weight() == doctest::Approx(1.0));
  // Slot marginals are (1, 0) and (0, 1) against the target (1/2, 1/2).
  CHECK(plan.marginal_error() == doctest::Approx(0.5));
  CHECK(plan.cost(CostSpec{1.0, 0.0}) == doctest::Approx(1.0));
  const TransportPlan sym = plan.symmetrized();
  CHECK(sym.support().size() == 2);
  CHECK(sym.marginal_error() < 1e-15);
  CHECK(sym.cost(CostSpec{1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(code_of([&] { TransportPlan({{{0.0, 1.0}, 0.0}}, density); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("PotentialField interpolation, radial symmetry and domain") {
  const PotentialField v(Geometry::line(), {0.0, 1.0, 2.0}, {0.0, 2.0, 1.0});
  CHECK(v(0.5) == doctest::Approx(1.0));
  CHECK(v(1.5) == doctest::Approx(1.5));
  CHECK(code_of([&] { v.evaluate_strict(3.0); }) == ErrorCode::OutOfDomain);
  const PotentialField r(Geometry::radial(3), {0.0, 1.0}, {-1.0, 0.0});
  CHECK(r(-0.5) == doctest::Approx(-0.5));
  const auto with_tail = v.with_tail(TailModel{0.0, -2.0, 1.0});
  CHECK(with_tail(4.0) == doctest::Approx(-0.5));
  CHECK(v.shifted(1.0).values()[1] == doctest::Approx(3.0));
}

TEST_CASE("ingest builtin families") {
  const Density u = make_uniform(0.0, 1.0, 4, 2);
  REQUIRE(u.size() == 4);
  for (double w : u.weights()) CHECK(w == doctest::Approx(0.5));

  // Weights are cell integrals of exp(-r) over equal cells, scaled to mass 2.
  const Density e = make_exponential(1.0, 20.0, 64, 2);
  REQUIRE(e.size() == 64);
  double total = 0.0;
  for (double w : e.weights()) total += w;
  CHECK(std::abs(total - 2.0) < 1e-12);
  const double h = 20.0 / 64.0;
  const double z = 1.0 - std::exp(-20.0);
  for (std::size_t i = 0; i < 64; ++i) {
    const double cell = std::exp(-h * i) - std::exp(-h * (i + 1));
    CHECK(e.weights()[i] == doctest::Approx(2.0 * cell / z).epsilon(1e-12));
  }
}

TEST_CASE("density CSV round trip and errors") {
  std::istringstream good("coord,weight\n0,1\n1,1\n");
  const Density d = read_density_csv(good, Geometry::line(), 2, false);
  CHECK(d.size() == 2);
  std::ostringstream out;
  write_density_csv(out, d);
  std::istringstream again(out.str());
  const Density back = read_density_csv(again, Geometry::line(), 2, false);
  CHECK(back.weights() == d.weights());
  CHECK(back.nodes() == d.nodes());

  std::istringstream negative("coord,weight\n0,1\n1,-1\n2,2\n");
  try {
    read_density_csv(negative, Geometry::line(), 2, false);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("row") != std::string::npos);
  }
  std::istringstream malformed("coord,weight\n0,abc\n");
  CHECK(code_of([&] { read_density_csv(malformed, Geometry::line(), 2, false); }) ==
        ErrorCode::ParseError);
  std::istringstream light("coord,weight\n0,0.5\n1,0.5\n");
  CHECK(code_of([&] { read_density_csv(light, Geometry::line(), 2, false); }) ==
        ErrorCode::MassMismatch);
  std::istringstream light2("coord,weight\n0,0.5\n1,0.5\n");
  CHECK(read_density_csv(light2, Geometry::line(), 2, true).weights()[0] ==
        doctest::Approx(1.0));
}

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = dist(rng);
    CHECK(std::stod(format_double(x)) == x);
  }
}
