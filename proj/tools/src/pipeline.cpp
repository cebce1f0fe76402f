#include "mmot_cli/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "mmot/analysis.hpp"
#include "mmot/dualcharge.hpp"
#include "mmot/ingest.hpp"
#include "mmot/potential.hpp"
#include "mmot/solvers.hpp"

namespace mmot::cli {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// One row of the pass/fail matrix. `operation` names the library call that
// reproduces `value` from the persisted intermediates.
Json check(const std::string& name, const std::string& operation, double value,
           const std::string& relation, double tolerance, bool pass) {
  return {{"name", name},
          {"operation", operation},
          {"value", std::isfinite(value) ? Json(value) : Json(nullptr)},
          {"relation", relation},
          {"tolerance", tolerance},
          {"pass", pass}};
}

Json error_entry(const Error& e) {
  return {{"code", e.qualified_code()}, {"message", e.what()}};
}

Json new_section(const RunConfig&) {
  return {{"checks", Json::array()}, {"errors", Json::array()}, {"diagnostics", Json::array()}};
}

void finish_section(const RunConfig& config, Json& section, const Stopwatch& clock,
                    const std::string& file) {
  if (config.timings) section["seconds"] = clock.seconds();
  write_json(output_file(config, file), section);
}

Density load_density(const RunConfig& config) {
  return read_density_csv(output_file(config, "density.csv"), geometry_of(config),
                          config.particles, false);
}

CostSpec solve_spec(const RunConfig& config) {
  return CostSpec::make(config.riesz_s, config.eta.value_or(0.0));
}

bool unbounded_tail(const RunConfig& config) {
  return config.density.family == DensityFamily::Exponential ||
         config.density.family == DensityFamily::GaussianRadial;
}

}  // namespace

std::filesystem::path output_file(const RunConfig& config, const std::string& name) {
  return config.out / name;
}

Geometry geometry_of(const RunConfig& config) {
  switch (config.density.family) {
    case DensityFamily::GaussianRadial:
      return Geometry::radial(config.density.dimension);
    case DensityFamily::File:
      return config.density.geometry == GeometryKind::RadialSymmetric
                 ? Geometry::radial(config.density.dimension)
                 : Geometry::line();
    default:
      return Geometry::line();
  }
}

Density ingest(const RunConfig& config) {
  const auto& d = config.density;
  switch (d.family) {
    case DensityFamily::Uniform:
      return make_uniform(d.a, d.b, config.grid_size, config.particles);
    case DensityFamily::Exponential:
      return make_exponential(d.rate, d.r_max, config.grid_size, config.particles);
    case DensityFamily::GaussianRadial:
      return make_gaussian_radial(d.sigma, d.r_max, config.grid_size, d.dimension,
                                  config.particles);
    case DensityFamily::File:
      return read_density_csv(d.path, geometry_of(config), config.particles, d.renormalize);
  }
  throw Error(ErrorCode::ConfigError, "cli", "unknown density family");
}

void stage_ingest(const RunConfig& config) {
  std::filesystem::create_directories(config.out);
  const Density density = ingest(config);
  std::ofstream out(output_file(config, "density.csv"));
  if (!out) throw Error(ErrorCode::IoError, "cli", "cannot write density.csv");
  write_density_csv(out, density);
}

void stage_solve(const RunConfig& config) {
  Stopwatch clock;
  const Density density = load_density(config);
  const Density line = mirror_to_line(density);
  const CostSpec spec = solve_spec(config);
  SolveResult result = [&] {
    switch (config.method) {
      case SolveMethod::ExactLP:
        return solve_exact_lp(line, spec);
      case SolveMethod::Sinkhorn: {
        SinkhornOptions options;
        options.epsilon_schedule = scaled_schedule(line, spec, config.sinkhorn_factors);
        return solve_sinkhorn_mm(line, spec, options);
      }
      case SolveMethod::Seidl1D:
        return seidl_map_1d(line, spec);
    }
    throw Error(ErrorCode::ConfigError, "cli", "unknown method");
  }();
  write_plan_csv(output_file(config, "plan.csv"), result.plan);
  write_potential_csv(output_file(config, "raw_potential.csv"), result.dual_potential);

  Json section = new_section(config);
  section["result"] = to_json(result);
  for (const auto& d : result.diagnostics) section["diagnostics"].push_back(d);
  auto& checks = section["checks"];
  const double err = result.tolerances.marginal_error;
  checks.push_back(check("solver.marginal_error", "TransportPlan::marginal_error", err, "<=",
                         config.tol.marginal, err <= config.tol.marginal));
  const double rel_gap =
      result.tolerances.duality_gap / std::max(1.0, std::abs(result.primal_value));
  const double gap_tol = config.method == SolveMethod::Sinkhorn
                             ? config.tol.sinkhorn_gap_relative
                             : config.tol.gap_relative;
  checks.push_back(check("solver.relative_duality_gap", "solvers.solve (primal vs dual objective)",
                         rel_gap, "<=", gap_tol, rel_gap <= gap_tol));
  if (config.method == SolveMethod::Sinkhorn) {
    checks.push_back(check("solver.sinkhorn_converged", "solvers.solve_sinkhorn_mm",
                           result.tolerances.final_residual, "<", 1e-9,
                           result.tolerances.converged));
  }
  finish_section(config, section, clock, "solve.json");
}

namespace {

TransportPlan load_plan(const RunConfig& config, const Density& density) {
  return read_plan_csv(output_file(config, "plan.csv"), mirror_to_line(density));
}

PotentialField load_normalized(const RunConfig& config) {
  return read_potential_csv(output_file(config, "potential.csv"), geometry_of(config),
                            OffsetConvention::EqVNormalized);
}

// Truncation used for the normalized potential and everything after it.
double stored_eta(const RunConfig& config) {
  return read_json(output_file(config, "potential.json")).at("eta").get<double>();
}

double sigma_slack(double e1) { return 1e-9 * (1.0 + std::abs(e1)); }

}  // namespace

void stage_potential(const RunConfig& config) {
  Stopwatch clock;
  const Density density = load_density(config);
  const TransportPlan plan = load_plan(config, density);
  const int n = config.particles;
  Json section = new_section(config);

  double eta = 0.0;
  if (config.eta && *config.eta > 0.0) {
    eta = *config.eta;
    section["eta_source"] = "config";
  } else {
    eta = 0.5 * min_separation(plan);
    section["eta_source"] = "half the plan's minimal separation";
    if (!(eta > 0.0)) {
      section["diagnostics"].push_back(
          "plan has a diagonal point; eta falls back to half the smallest node spacing");
      const auto& x = density.nodes();
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < x.size(); ++i) gap = std::min(gap, x[i] - x[i - 1]);
      eta = 0.5 * gap;
    }
  }
  section["eta"] = eta;
  const CostSpec spec = CostSpec::make(config.riesz_s, eta);

  PotentialField raw = read_potential_csv(output_file(config, "raw_potential.csv"),
                                          Geometry::line(), OffsetConvention::Raw);
  if (density.geometry().kind == GeometryKind::RadialSymmetric) {
    raw = radial_restriction(raw, density.geometry().dimension, density.nodes());
  }
  const auto normalized = eqv_normalize(raw, n, spec, config.tol.normalize, config.tol.max_sweeps);
  write_potential_csv(output_file(config, "potential.csv"), normalized.field);
  section["sweeps"] = normalized.sweeps;
  section["converged"] = normalized.converged;
  section["residuals"] = normalized.residuals;

  auto& checks = section["checks"];
  try {
    const auto e1 = evaluate_EK(normalized.field, 1, spec);
    const auto en = evaluate_EK(normalized.field, n, spec);
    section["E_1"] = e1.value;
    section["E_N"] = en.value;
    const double tol = config.tol.ladder_equal * std::abs(e1.value);
    checks.push_back(check("potential.fixed_point_energy", "potential.evaluate_EK(K=N)",
                           std::abs(en.value), "<=", tol,
                           normalized.converged && std::abs(en.value) <= tol));
    bool monotone = true;
    for (std::size_t i = 1; i < normalized.residuals.size(); ++i) {
      if (normalized.residuals[i] > normalized.residuals[i - 1] + 1e-12) monotone = false;
    }
    checks.push_back(check("potential.residual_non_increasing", "potential.eqv_normalize",
                           normalized.residuals.empty() ? 0.0 : normalized.residuals.back(),
                           "<", config.tol.normalize, monotone && normalized.converged));

    if (config.method != SolveMethod::Sinkhorn) {
      // Exact plans live on the minimisers of E_N.
      const SigmaSet sigma = find_sigma(normalized.field, n, spec, sigma_slack(e1.value));
      std::size_t outside = 0;
      double spread = 0.0;
      for (const auto& atom : plan.support()) {
        if (!sigma_contains(sigma, atom.points)) ++outside;
        spread = std::max(spread,
                          std::abs(total_energy(atom.points, normalized.field, spec) - en.value));
      }
      section["sigma_size"] = sigma.configurations.size();
      checks.push_back(check("potential.support_in_sigma", "potential.find_sigma",
                             static_cast<double>(outside), "==", 0.0, outside == 0));
      checks.push_back(check("potential.support_energy_spread", "potential.total_energy",
                             spread, "<=", tol, spread <= tol));
    }
  } catch (const Error& e) {
    section["errors"].push_back(error_entry(e));
  }
  finish_section(config, section, clock, "potential.json");
}

namespace {

std::vector<double> dissociation_radii(const Density& density) {
  const double r_max = std::abs(density.nodes().back());
  std::vector<double> radii;
  for (int i = 1; i <= 8; ++i) radii.push_back(r_max * i / 8.0);
  return radii;
}

void analyze_tail(const RunConfig& config, const PotentialField& v, double e_limit,
                  Json& section) {
  try {
    const TailFit fit = config.tail_r_min || config.tail_r_max
                            ? fit_tail(v, config.riesz_s, config.particles,
                                       config.tail_r_min.value_or(0.5 * v.nodes().back()),
                                       config.tail_r_max.value_or(0.9 * v.nodes().back()))
                            : fit_tail(v, config.riesz_s, config.particles);
    std::ofstream out(output_file(config, "tailfit.csv"));
    if (!out) throw Error(ErrorCode::IoError, "cli", "cannot write tailfit.csv");
    write_tail_csv(out, v, fit);
    section["tail"] = to_json(fit);
    // The fitted offset and the (N-1)-level energy are two estimates of the
    // same far-field constant; their gap is reported, not judged.
    section["tail"]["offset_vs_level_gap"] = std::abs(fit.offset - e_limit);
    const double rel = fit.relative_error();
    if (unbounded_tail(config)) {
      section["checks"].push_back(check("analysis.tail_coefficient", "analysis.fit_tail", rel,
                                        "<=", config.tol.tail_relative,
                                        rel <= config.tol.tail_relative));
    } else {
      section["diagnostics"].push_back(
          "bounded support: tail fit reported without a pass/fail judgement");
    }
  } catch (const Error& e) {
    if (unbounded_tail(config) || e.code() != ErrorCode::WindowTooSmall) {
      section["errors"].push_back(error_entry(e));
    } else {
      section["diagnostics"].push_back(std::string("tail fit skipped: ") + e.what());
    }
  }
}

void analyze_audit(const RunConfig& config, const TransportPlan& plan, const CostSpec& spec,
                   Json& section) {
  const bool exact = config.method != SolveMethod::Sinkhorn;
  if (config.corrupt_plan) {
    const CorruptedPlan corrupted = corrupt_plan(plan, spec);
    const auto audit =
        audit_cyclical_monotonicity(corrupted.plan, spec, config.audit_samples, config.seed);
    const double found =
        swap_violation(corrupted.plan.support()[corrupted.first].points,
                       corrupted.plan.support()[corrupted.second].points, corrupted.slot, spec);
    section["audit"] = to_json(audit);
    section["audit"]["corruption"] = {{"first", corrupted.first},
                                      {"second", corrupted.second},
                                      {"slot", corrupted.slot},
                                      {"expected_violation", corrupted.expected_violation}};
    const double mismatch = std::abs(found - corrupted.expected_violation);
    section["checks"].push_back(check("analysis.corruption_detected",
                                      "analysis.swap_violation", mismatch, "<=", 1e-12,
                                      mismatch <= 1e-12 && audit.worst_violation > config.tol.swap));
    section["checks"].push_back(check("analysis.cyclical_monotonicity",
                                      "analysis.audit_cyclical_monotonicity",
                                      audit.worst_violation, "<=", config.tol.swap,
                                      audit.worst_violation <= config.tol.swap));
    return;
  }
  const auto audit = audit_cyclical_monotonicity(plan, spec, config.audit_samples, config.seed);
  section["audit"] = to_json(audit);
  if (exact) {
    section["checks"].push_back(check("analysis.cyclical_monotonicity",
                                      "analysis.audit_cyclical_monotonicity",
                                      audit.worst_violation, "<=", config.tol.swap,
                                      audit.worst_violation <= config.tol.swap));
  } else {
    section["diagnostics"].push_back(
        "entropic plan: swap audit reported without a pass/fail judgement");
  }
}

}  // namespace

void stage_analyze(const RunConfig& config) {
  Stopwatch clock;
  const Density density = load_density(config);
  const TransportPlan plan = load_plan(config, density);
  const PotentialField v = load_normalized(config);
  const int n = config.particles;
  const CostSpec spec = CostSpec::make(config.riesz_s, stored_eta(config));
  const CostSpec solve_cost = solve_spec(config);
  Json section = new_section(config);
  auto& checks = section["checks"];

  const double separation = min_separation(plan);
  section["min_separation"] = separation;

  double e_limit = 0.0;
  double e1 = 0.0;
  try {
    e_limit = evaluate_EK(v, n - 1, spec).value;
    e1 = evaluate_EK(v, 1, spec).value;
  } catch (const Error& e) {
    section["errors"].push_back(error_entry(e));
  }

  if (config.analyses.tail) analyze_tail(config, v, e_limit, section);

  if (config.analyses.dissociation) {
    const auto radii = dissociation_radii(density);
    const auto from_plan = check_dissociation(plan, radii);
    section["dissociation"]["plan"] = to_json(from_plan);
    checks.push_back(check("analysis.dissociation_plan", "analysis.check_dissociation(plan)",
                           from_plan.r_star, "<", from_plan.max_norm, from_plan.pass));
    try {
      const SigmaSet sigma = find_sigma(v, n, spec, sigma_slack(e1));
      const auto from_sigma = check_dissociation(sigma, radii);
      section["dissociation"]["sigma"] = to_json(from_sigma);
      section["dissociation"]["sigma_size"] = sigma.configurations.size();
      checks.push_back(check("analysis.dissociation_sigma", "analysis.check_dissociation(sigma)",
                             from_sigma.r_star, "<", from_sigma.max_norm, from_sigma.pass));
    } catch (const Error& e) {
      section["errors"].push_back(error_entry(e));
    }
  }

  if (config.analyses.monotonicity) {
    try {
      analyze_audit(config, plan, solve_cost, section);
    } catch (const Error& e) {
      section["errors"].push_back(error_entry(e));
    }
  }

  if (config.analyses.ladder) {
    try {
      const PotentialField gauged = vanishing_gauge(v, n, spec);
      const auto ladder =
          binding_ladder(gauged, n, spec, config.tol.ladder_equal, config.tol.ladder_strict);
      section["ladder"] = to_json(ladder);
      checks.push_back(check("analysis.ladder_equal_top", "analysis.binding_ladder",
                             ladder.equal_gap, "<=", ladder.tol_equal, ladder.equal_pass));
      double worst_margin = ladder.margins.empty()
                                ? 0.0
                                : *std::min_element(ladder.margins.begin(), ladder.margins.end());
      checks.push_back(check("analysis.ladder_strict_lower", "analysis.binding_ladder",
                             worst_margin, ">", 0.0, ladder.strict_pass));
      checks.push_back(check("analysis.ladder_monotone", "analysis.binding_ladder",
                             ladder.ladder.values.front(), "<", 0.0,
                             ladder.monotone_pass && ladder.shape_pass));
    } catch (const Error& e) {
      section["errors"].push_back(error_entry(e));
    }
  }
  finish_section(config, section, clock, "analysis.json");
}

void stage_dualcharge(const RunConfig& config) {
  Stopwatch clock;
  Json section = new_section(config);
  const int n = config.particles;
  try {
    const PotentialField v = load_normalized(config);
    DualChargeOptions options;
    options.mollify = config.mollify;
    options.tol_positivity = config.tol.positivity;
    const DualCharge charge = compute_dual_charge(v, config.density.dimension, options);
    std::ofstream out(output_file(config, "charge.csv"));
    if (!out) throw Error(ErrorCode::IoError, "cli", "cannot write charge.csv");
    write_charge_csv(out, charge);
    section["charge"] = to_json(charge);
    const double target = n - 1.0;
    const double rel = std::abs(charge.total_mass - target) / target;
    section["checks"].push_back(check("dualcharge.total_mass", "dualcharge.compute_dual_charge",
                                      rel, "<=", config.tol.mass_relative,
                                      rel <= config.tol.mass_relative));
    const double bound = target * (1.0 + config.tol.positivity);
    section["checks"].push_back(check("dualcharge.mass_bound", "dualcharge.compute_dual_charge",
                                      charge.total_mass, "<=", bound,
                                      charge.total_mass <= bound));
    if (charge.negative_nodes > 0) {
      section["diagnostics"].push_back(std::to_string(charge.negative_nodes) +
                                       " nodes with profile below -tol_positivity");
    }
  } catch (const Error& e) {
    section["errors"].push_back(error_entry(e));
  }
  finish_section(config, section, clock, "dualcharge.json");
}

Json build_report(const RunConfig& config) {
  Json report;
  report["config"] = to_json(config);
  Json pass_fail = Json::array();
  Json errors = Json::array();
  Json timings = Json::object();
  Json sections = Json::object();
  const std::vector<std::pair<std::string, std::string>> stages = {
      {"solve", "solve.json"},
      {"potential", "potential.json"},
      {"analyze", "analysis.json"},
      {"dualcharge", "dualcharge.json"}};
  bool all_pass = true;
  for (const auto& [stage, file] : stages) {
    if (stage == "dualcharge" && !config.analyses.dualcharge) continue;
    Json section = read_json(output_file(config, file));
    if (section.contains("seconds")) {
      if (config.timings) timings[stage] = section["seconds"];
      section.erase("seconds");
    }
    for (const auto& row : section["checks"]) {
      pass_fail.push_back(row);
      if (!row["pass"].get<bool>()) all_pass = false;
    }
    for (const auto& e : section["errors"]) {
      Json entry = e;
      entry["stage"] = stage;
      errors.push_back(entry);
      all_pass = false;
    }
    sections[stage] = section;
  }
  report["pass_fail"] = pass_fail;
  report["errors"] = errors;
  report["stages"] = sections;
  if (config.timings) report["timings"] = timings;
  report["all_pass"] = all_pass;
  return report;
}

int stage_report(const RunConfig& config) {
  const Json report = build_report(config);
  write_json(output_file(config, "report.json"), report);
  return report["all_pass"].get<bool>() ? kExitPass : kExitFail;
}

int run_all(const RunConfig& config) {
  stage_ingest(config);
  stage_solve(config);
  stage_potential(config);
  stage_analyze(config);
  if (config.analyses.dualcharge) stage_dualcharge(config);
  return stage_report(config);
}

}  // namespace mmot::cli
