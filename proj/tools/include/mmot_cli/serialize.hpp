#pragma once

// JSON views of the core result types and CSV persistence of intermediates.

#include <filesystem>

#include "json.hpp"
#include "mmot/analysis.hpp"
#include "mmot/dualcharge.hpp"
#include "mmot/potential.hpp"
#include "mmot/solvers.hpp"
#include "mmot_cli/config.hpp"

namespace mmot::cli {

using Json = nlohmann::json;

Json to_json(const RunConfig& config);
/// Summary without the support; the support lives in plan.csv.
Json to_json(const SolveResult& result);
Json to_json(const EnergyLadder& ladder);
Json to_json(const BindingLadder& ladder);
Json to_json(const SigmaSet& sigma);
Json to_json(const TailFit& fit);
Json to_json(const DissociationReport& report);
Json to_json(const MonotonicityAudit& audit);
/// Summary without the profile; the profile lives in charge.csv.
Json to_json(const DualCharge& charge);

/// Columns r1..rN, weight.
void write_plan_csv(const std::filesystem::path& path, const TransportPlan& plan);
TransportPlan read_plan_csv(const std::filesystem::path& path, const Density& marginal);

/// Columns r, v.
void write_potential_csv(const std::filesystem::path& path, const PotentialField& v);
PotentialField read_potential_csv(const std::filesystem::path& path, Geometry geometry,
                                  OffsetConvention convention);

void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

}  // namespace mmot::cli
