#pragma once

// Batch pipeline. Every stage reads its inputs from, and writes its outputs
// to, the configured output directory, so any stage can be re-run alone:
//
//   ingest      -> density.csv
//   solve       -> plan.csv, raw_potential.csv, solve.json
//   potential   -> potential.csv, potential.json
//   analyze     -> tailfit.csv, analysis.json
//   dualcharge  -> charge.csv, dualcharge.json
//   report      -> report.json (pass/fail matrix over all stage checks)

#include <filesystem>
#include <string>

#include "mmot/model.hpp"
#include "mmot_cli/config.hpp"
#include "mmot_cli/serialize.hpp"

namespace mmot::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

/// Builds the density described by the config.
Density ingest(const RunConfig& config);

Geometry geometry_of(const RunConfig& config);

void stage_ingest(const RunConfig& config);
void stage_solve(const RunConfig& config);
void stage_potential(const RunConfig& config);
void stage_analyze(const RunConfig& config);
void stage_dualcharge(const RunConfig& config);
/// Writes report.json and returns kExitPass or kExitFail.
int stage_report(const RunConfig& config);

/// All stages in order; returns the report's exit code.
int run_all(const RunConfig& config);

/// The assembled report (as written by stage_report).
Json build_report(const RunConfig& config);

std::filesystem::path output_file(const RunConfig& config, const std::string& name);

}  // namespace mmot::cli
