// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mmot/analysis.hpp"
#include "mmot/dualcharge.hpp"
#include "mmot/ingest.hpp"
#include "mmot/potential.hpp"
#include "mmot/solvers.hpp"
#include "mmot_cli/pipeline.hpp"

using namespace mmot;
namespace fs = std::filesystem;

namespace {

const CostSpec kCoulomb{1.0, 0.0};
const std::vector<double> kSchedule{1, 0.3, 0.1, 0.03, 0.01};

struct Instance {
  std::string name;
  Density density;
};

std::vector<Instance> small_instances() {
  return {
      {"uniform m=64 N=2", make_uniform(0.0, 1.0, 64, 2)},
      {"exponential m=64 N=2", make_exponential(1.0, 8.0, 64, 2)},
      {"uniform m=48 N=3", make_uniform(0.0, 1.0, 48, 3)},
      {"exponential m=64 N=3", make_exponential(1.0, 8.0, 64, 3)},
  };
}

bool is_exponential(const Instance& instance) {
  return instance.name.rfind("exponential", 0) == 0;
}

struct Solved {
  Instance instance;
  SolveResult lp;
  double lp_seconds = 0.0;
};

struct Normalized {
  std::string name;
  int n = 2;
  CostSpec spec;
  PotentialField field;
};

class Suite {
 public:
  void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) failures_++;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

CostSpec truncation_for(const TransportPlan& plan) {
  return CostSpec{1.0, 0.5 * min_separation(plan)};
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// 1. LP and the explicit 1D construction agree.
void criterion_1(Suite& suite, const std::vector<Solved>& solved) {
  bool pass = true;
  std::string detail;
  for (const auto& s : solved) {
    const auto seidl = seidl_map_1d(s.instance.density, kCoulomb);
    const double rel = std::abs(seidl.primal_value - s.lp.primal_value) / s.lp.primal_value;
    pass = pass && rel < 1e-6 && s.lp_seconds < 60.0;
    detail += fmt("[%s rel %.1e, lp %.2fs] ", s.instance.name.c_str(), rel, s.lp_seconds);
  }
  suite.report(1, pass, detail);
}

// 2. Entropic values approach the LP value; rounded marginals are exact.
void criterion_2(Suite& suite, const std::vector<Solved>& solved) {
  bool pass = true;
  std::string detail;
  for (const auto& s : solved) {
    SinkhornOptions options;
    options.epsilon_schedule = scaled_schedule(s.instance.density, kCoulomb, kSchedule);
    const auto result = solve_sinkhorn_mm(s.instance.density, kCoulomb, options);
    const double rel = std::abs(result.primal_value - s.lp.primal_value) / s.lp.primal_value;
    const double marg = result.tolerances.marginal_error;
    pass = pass && rel < 0.01 && marg < 1e-8;
    detail += fmt("[%s rel %.1e, marg %.0e] ", s.instance.name.c_str(), rel, marg);
  }
  suite.report(2, pass, detail);
}

// 3. The normalized potential is a fixed point with E_N = 0.
void criterion_3(Suite& suite, const std::vector<Solved>& solved,
                 std::vector<Normalized>& normalized) {
  bool pass = true;
  double worst_energy = 0.0;
  double worst_change = 0.0;
  for (const auto& s : solved) {
    const int n = s.instance.density.particle_count();
    const CostSpec spec = truncation_for(s.lp.plan);
    const auto result = eqv_normalize(s.lp.dual_potential, n, spec);
    const double e1 = evaluate_EK(result.field, 1, spec).value;
    const double en = evaluate_EK(result.field, n, spec).value;
    const auto again = eqv_normalize(result.field, n, spec);
    const double ratio = std::abs(en) / std::abs(e1);
    const double change = sup_diff(again.field.values(), result.field.values());
    worst_energy = std::max(worst_energy, ratio);
    worst_change = std::max(worst_change, change);
    pass = pass && result.converged && ratio < 1e-6 && change < 1e-8;
    normalized.push_back({s.instance.name, n, spec, result.field});
  }
  suite.report(3, pass,
               fmt("max |E_N|/|E_1| %.1e, max re-application change %.1e", worst_energy,
                   worst_change));
}

// 4. Far-field coefficient -(N - 1), improving under grid doubling.
void criterion_4(Suite& suite, std::vector<Normalized>& normalized) {
  bool pass = true;
  std::string detail;
  for (int n : {2, 3}) {
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t m : {256, 512}) {
      const Density density = make_exponential(1.0, 40.0, m, n);
      const auto solved = seidl_map_1d(density, kCoulomb);
      const CostSpec spec = truncation_for(solved.plan);
      const auto result = eqv_normalize(solved.dual_potential, n, spec);
      const auto fit = fit_tail(result.field, 1.0, n, 20.0, 36.0);
      const double rel = fit.relative_error();
      pass = pass && result.converged && rel < 0.1 && rel < previous;
      previous = rel;
      detail += fmt("[N=%d m=%zu b=%.4f rel %.4f] ", n, m, fit.coefficient, rel);
      normalized.push_back({fmt("exponential R=40 m=%zu N=%d", m, n), n, spec, result.field});
    }
  }
  suite.report(4, pass, detail);
}

// 5. Nothing beyond R_star escapes; on unbounded tails one particle ranges further.
void criterion_5(Suite& suite, const std::vector<Solved>& solved) {
  bool pass = true;
  std::string detail;
  for (const auto& s : solved) {
    std::vector<double> radii;
    const double r_max = s.instance.density.nodes().back();
    for (int k = 1; k <= 16; ++k) radii.push_back(r_max * k / 16.0);
    auto report = check_dissociation(s.lp.plan, radii);
    // The mass beyond R_star itself must vanish.
    const auto at_star = check_dissociation(s.lp.plan, {report.r_star});
    const bool zero_beyond = at_star.violating[0] == 0.0;
    const bool strict = !is_exponential(s.instance) || report.r_star < report.max_norm;
    pass = pass && report.pass && zero_beyond && strict;
    detail += fmt("[%s R*=%.3f max=%.3f] ", s.instance.name.c_str(), report.r_star,
                  report.max_norm);
  }
  suite.report(5, pass, detail);
}

// 6. Seeded swap tests on LP plans and a detected corruption.
void criterion_6(Suite& suite, const std::vector<Solved>& solved) {
  bool pass = true;
  double worst = -std::numeric_limits<double>::infinity();
  double mismatch = 0.0;
  for (const auto& s : solved) {
    const auto audit = audit_cyclical_monotonicity(s.lp.plan, kCoulomb, 10000, 12345);
    worst = std::max(worst, audit.worst_violation);
    pass = pass && audit.worst_violation <= 1e-9;
    const auto corrupted = corrupt_plan(s.lp.plan, kCoulomb);
    const auto bad = audit_cyclical_monotonicity(corrupted.plan, kCoulomb, 10000, 12345);
    const auto& support = corrupted.plan.support();
    const double found = swap_violation(support[corrupted.first].points,
                                        support[corrupted.second].points, corrupted.slot, kCoulomb);
    mismatch = std::max(mismatch, std::abs(found - corrupted.expected_violation));
    pass = pass && bad.worst_violation > 1e-9 &&
           std::abs(found - corrupted.expected_violation) <= 1e-12;
  }
  suite.report(6, pass,
               fmt("worst violation on LP plans %.1e, corruption magnitude mismatch %.1e", worst,
                   mismatch));
}

// 7. Binding ladder.
void criterion_7(Suite& suite, const std::vector<Normalized>& normalized) {
  bool pass = true;
  std::string detail;
  for (const auto& v : normalized) {
    const auto gauged = vanishing_gauge(v.field, v.n, v.spec);
    const auto ladder = binding_ladder(gauged, v.n, v.spec);
    pass = pass && ladder.monotone_pass;
    if (v.n == 3 && v.name.find("R=40") != std::string::npos) {
      pass = pass && ladder.equal_pass && ladder.strict_pass;
      detail += fmt("[%s |E3-E2| %.1e, E1-E2 margin %.4f] ", v.name.c_str(), ladder.equal_gap,
                    ladder.margins.at(0));
    }
  }
  detail += fmt("monotone over %zu potentials", normalized.size());
  suite.report(7, pass, detail);
}

double round_trip_error(std::size_t m) {
  std::vector<double> r;
  std::vector<double> g;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = 2.0 * i / (m - 1.0);
    r.push_back(x);
    g.push_back(x < 1.0 ? std::pow(1.0 - x * x, 4) : 0.0);
  }
  const auto back = compute_dual_charge(potential_from_charge(make_charge(3, r, g)), 3);
  double err = 0.0;
  for (std::size_t i = 0; i < m; ++i) err = std::max(err, std::abs(back.density_values[i] - g[i]));
  return err;
}

// 8. Dual charge mass and round-trip order.
void criterion_8(Suite& suite, const fs::path& work) {
  cli::RunConfig config;
  config.density.family = cli::DensityFamily::GaussianRadial;
  config.density.sigma = 1.0;
  config.density.r_max = 10.0;
  config.density.dimension = 3;
  config.grid_size = 512;
  config.particles = 2;
  config.method = SolveMethod::Seidl1D;
  config.analyses.dualcharge = true;
  config.timings = false;
  config.out = work / "radial";
  cli::validate(config);
  cli::run_all(config);
  const auto report = cli::read_json(config.out / "report.json");
  const double mass =
      report["stages"]["dualcharge"]["charge"]["total_mass"].get<double>();
  const bool mass_ok = std::abs(mass - 1.0) <= 0.05;
  const double e1 = round_trip_error(101);
  const double e2 = round_trip_error(201);
  const double e3 = round_trip_error(401);
  const double o1 = std::log2(e1 / e2);
  const double o2 = std::log2(e2 / e3);
  suite.report(8, mass_ok && o1 >= 1.8 && o2 >= 1.8,
               fmt("total mass %.4f (target 1), round-trip orders %.3f %.3f", mass, o1, o2));
}

// 9. Newton constant in three dimensions.
void criterion_9(Suite& suite) {
  const double expected = 4 * std::numbers::pi;
  const double rel = std::abs(cd_constant(3) - expected) / expected;
  suite.report(9, rel <= 1e-12, fmt("relative error %.1e", rel));
}

// 10. Byte-identical reports.
void criterion_10(Suite& suite, const fs::path& work) {
  bool pass = true;
  std::string detail;
  for (SolveMethod method : {SolveMethod::ExactLP, SolveMethod::Sinkhorn, SolveMethod::Seidl1D}) {
    cli::RunConfig config;
    config.density.family = cli::DensityFamily::Exponential;
    config.density.r_max = 8.0;
    config.grid_size = 32;
    config.method = method;
    config.seed = 2024;
    config.audit_samples = 100;
    config.timings = false;
    config.out = work / fmt("det_%s_a", cli::method_flag(method));
    cli::run_all(config);
    const std::string a = read_text(config.out / "report.json");
    config.out = work / fmt("det_%s_b", cli::method_flag(method));
    cli::run_all(config);
    const std::string b = read_text(config.out / "report.json");
    const bool same = !a.empty() && a == b;
    pass = pass && same;
    detail += fmt("[%s %s, %zu bytes] ", cli::method_flag(method), same ? "identical" : "differ",
                  a.size());
  }
  suite.report(10, pass, detail);
}

void guarded(Suite& suite, int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    suite.report(id, false, std::string("error: ") + e.what());
  }
}

}  // namespace

int main() {
  Suite suite;
  const fs::path work = fs::temp_directory_path() / "mmot_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  std::vector<Solved> solved;
  for (auto& instance : small_instances()) {
    const auto start = std::chrono::steady_clock::now();
    auto lp = solve_exact_lp(instance.density, kCoulomb);
    solved.push_back({instance, std::move(lp), seconds_since(start)});
  }
  std::vector<Normalized> normalized;

  guarded(suite, 1, [&] { criterion_1(suite, solved); });
  guarded(suite, 2, [&] { criterion_2(suite, solved); });
  guarded(suite, 3, [&] { criterion_3(suite, solved, normalized); });
  guarded(suite, 4, [&] { criterion_4(suite, normalized); });
  guarded(suite, 5, [&] { criterion_5(suite, solved); });
  guarded(suite, 6, [&] { criterion_6(suite, solved); });
  guarded(suite, 7, [&] { criterion_7(suite, normalized); });
  guarded(suite, 8, [&] { criterion_8(suite, work); });
  guarded(suite, 9, [&] { criterion_9(suite); });
  guarded(suite, 10, [&] { criterion_10(suite, work); });

  std::printf("%d of 10 criteria failed\n", suite.failures());
  return suite.failures() == 0 ? 0 : 1;
}
