#include "mmot_cli/serialize.hpp"

#include <fstream>

#include "mmot/csv.hpp"

namespace mmot::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cli", "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cli",
                "cannot read " + path.string() + " (run the earlier stages first)");
  }
  return in;
}

// JSON has no infinity; non-finite values are written as null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json to_json(const RunConfig& c) {
  Json density = {
      {"family", to_string(c.density.family)},
      {"renormalize", c.density.renormalize},
  };
  switch (c.density.family) {
    case DensityFamily::File:
      density["path"] = c.density.path.string();
      density["geometry"] = mmot::to_string(c.density.geometry);
      density["dimension"] = c.density.dimension;
      break;
    case DensityFamily::Uniform:
      density["a"] = c.density.a;
      density["b"] = c.density.b;
      break;
    case DensityFamily::Exponential:
      density["rate"] = c.density.rate;
      density["r_max"] = c.density.r_max;
      break;
    case DensityFamily::GaussianRadial:
      density["sigma"] = c.density.sigma;
      density["r_max"] = c.density.r_max;
      density["dimension"] = c.density.dimension;
      break;
  }
  Json tail_window = nullptr;
  if (c.tail_r_min || c.tail_r_max) {
    tail_window = {{"r_min", c.tail_r_min ? Json(*c.tail_r_min) : Json(nullptr)},
                   {"r_max", c.tail_r_max ? Json(*c.tail_r_max) : Json(nullptr)}};
  }
  return {
      {"density", density},
      {"grid_size", c.grid_size},
      {"particles", c.particles},
      {"riesz_s", c.riesz_s},
      {"eta", c.eta ? Json(*c.eta) : Json("auto")},
      {"method", method_flag(c.method)},
      {"sinkhorn_factors", c.sinkhorn_factors},
      {"analyses",
       {{"tail", c.analyses.tail},
        {"dissociation", c.analyses.dissociation},
        {"monotonicity", c.analyses.monotonicity},
        {"ladder", c.analyses.ladder},
        {"dualcharge", c.analyses.dualcharge}}},
      {"seed", c.seed},
      {"audit_samples", c.audit_samples},
      {"tail_window", tail_window},
      {"mollify", c.mollify},
      {"corrupt_plan", c.corrupt_plan},
      {"tolerances",
       {{"marginal", c.tol.marginal},
        {"gap_relative", c.tol.gap_relative},
        {"sinkhorn_gap_relative", c.tol.sinkhorn_gap_relative},
        {"normalize", c.tol.normalize},
        {"max_sweeps", c.tol.max_sweeps},
        {"tail_relative", c.tol.tail_relative},
        {"ladder_equal", c.tol.ladder_equal},
        {"ladder_strict", c.tol.ladder_strict},
        {"swap", c.tol.swap},
        {"mass_relative", c.tol.mass_relative},
        {"positivity", c.tol.positivity}}},
  };
}

Json to_json(const SolveResult& r) {
  return {
      {"method", to_string(r.method)},
      {"primal_value", number(r.primal_value)},
      {"dual_objective", number(r.tolerances.dual_objective)},
      {"duality_gap", number(r.tolerances.duality_gap)},
      {"marginal_error", number(r.tolerances.marginal_error)},
      {"converged", r.tolerances.converged},
      {"iterations", r.tolerances.iterations},
      {"final_residual", number(r.tolerances.final_residual)},
      {"support_size", r.plan.support().size()},
      {"stage_values", r.stage_values},
      {"diagnostics", r.diagnostics},
  };
}

Json to_json(const EnergyLadder& ladder) {
  Json levels = Json::array();
  for (std::size_t k = 0; k < ladder.values.size(); ++k) {
    levels.push_back({{"K", k + 1},
                      {"value", number(ladder.values[k])},
                      {"argmin", ladder.argmins[k]},
                      {"attained", static_cast<bool>(ladder.attained[k])}});
  }
  return {{"levels", levels}, {"tolerance", ladder.tolerance}};
}

Json to_json(const BindingLadder& b) {
  return {
      {"ladder", to_json(b.ladder)},
      {"tol_equal", b.tol_equal},
      {"tol_strict", b.tol_strict},
      {"equal_gap", b.equal_gap},
      {"margins", b.margins},
      {"equal_pass", b.equal_pass},
      {"strict_pass", b.strict_pass},
      {"monotone_pass", b.monotone_pass},
      {"shape_pass", b.shape_pass},
  };
}

Json to_json(const SigmaSet& sigma) {
  return {{"energy", number(sigma.energy)},
          {"slack", sigma.slack},
          {"size", sigma.configurations.size()},
          {"configurations", sigma.configurations}};
}

Json to_json(const TailFit& fit) {
  return {
      {"window", {fit.r_min, fit.r_max}},
      {"nodes_used", fit.nodes_used},
      {"exponent", fit.exponent},
      {"coefficient", fit.coefficient},
      {"offset", fit.offset},
      {"residual", fit.residual},
      {"target", fit.target},
      {"relative_error", fit.relative_error()},
  };
}

Json to_json(const DissociationReport& d) {
  return {
      {"r_star", d.r_star},
      {"max_norm", d.max_norm},
      {"radii", d.radii},
      {"violating", d.violating},
      {"pass", d.pass},
  };
}

Json to_json(const MonotonicityAudit& a) {
  Json pairs = Json::array();
  for (const auto& p : a.violating_pairs) {
    pairs.push_back(
        {{"first", p.first}, {"second", p.second}, {"slot", p.slot}, {"value", p.value}});
  }
  return {
      {"samples_checked", a.samples_checked},
      {"exhaustive", a.exhaustive},
      {"worst_violation", number(a.worst_violation)},
      {"violating_pairs", pairs},
  };
}

Json to_json(const DualCharge& c) {
  return {
      {"dimension", c.dimension},
      {"nodes", c.radii.size()},
      {"total_mass", c.total_mass},
      {"mollified", c.mollified},
      {"min_value", c.min_value},
      {"negative_nodes", c.negative_nodes},
      {"tol_positivity", c.tol_positivity},
  };
}

void write_plan_csv(const std::filesystem::path& path, const TransportPlan& plan) {
  auto out = open_out(path);
  std::vector<std::string> header;
  for (int i = 1; i <= plan.particle_count(); ++i) header.push_back("r" + std::to_string(i));
  header.push_back("weight");
  CsvWriter csv(out, header);
  for (const auto& atom : plan.support()) {
    std::vector<double> row = atom.points;
    row.push_back(atom.weight);
    csv.row(row);
  }
}

TransportPlan read_plan_csv(const std::filesystem::path& path, const Density& marginal) {
  auto in = open_in(path);
  std::vector<std::string> header;
  for (int i = 1; i <= marginal.particle_count(); ++i) header.push_back("r" + std::to_string(i));
  header.push_back("weight");
  const auto table = read_csv(in, header);
  std::vector<PlanAtom> atoms;
  for (const auto& row : table.rows) {
    atoms.push_back({Configuration(row.begin(), row.end() - 1), row.back()});
  }
  return TransportPlan(std::move(atoms), marginal);
}

void write_potential_csv(const std::filesystem::path& path, const PotentialField& v) {
  auto out = open_out(path);
  CsvWriter csv(out, {"r", "v"});
  for (std::size_t i = 0; i < v.size(); ++i) csv.row({v.nodes()[i], v.values()[i]});
}

PotentialField read_potential_csv(const std::filesystem::path& path, Geometry geometry,
                                  OffsetConvention convention) {
  auto in = open_in(path);
  const auto table = read_csv(in, {"r", "v"});
  std::vector<double> nodes;
  std::vector<double> values;
  for (const auto& row : table.rows) {
    nodes.push_back(row[0]);
    values.push_back(row[1]);
  }
  return PotentialField(geometry, std::move(nodes), std::move(values), convention);
}

void write_json(const std::filesystem::path& path, const Json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "cli", path.string() + ": " + e.what());
  }
}

}  // namespace mmot::cli
