#pragma once

// Run configuration: a sectioned key-value file plus command-line overrides.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmot/model.hpp"
#include "mmot/solvers.hpp"

namespace mmot::cli {

enum class DensityFamily { File, Uniform, Exponential, GaussianRadial };

struct DensityConfig {
  DensityFamily family = DensityFamily::Uniform;
  std::filesystem::path path;
  /// File inputs only: geometry of the coordinates.
  GeometryKind geometry = GeometryKind::Line1D;
  int dimension = 3;
  double a = 0.0;
  double b = 1.0;
  double rate = 1.0;
  double r_max = 10.0;
  double sigma = 1.0;
  bool renormalize = false;
};

struct AnalysisToggles {
  bool tail = true;
  bool dissociation = true;
  bool monotonicity = true;
  bool ladder = true;
  bool dualcharge = false;
};

struct Tolerances {
  double marginal = 1e-9;
  double gap_relative = 1e-6;
  double sinkhorn_gap_relative = 2e-2;
  double normalize = 1e-10;
  std::size_t max_sweeps = 200;
  double tail_relative = 0.1;
  double ladder_equal = 1e-6;
  double ladder_strict = 1e-8;
  double swap = 1e-9;
  double mass_relative = 0.05;
  double positivity = 1e-6;
};

struct RunConfig {
  DensityConfig density;
  std::size_t grid_size = 64;
  int particles = 2;
  double riesz_s = 1.0;
  /// Empty means auto: solve untruncated, normalize with half the plan's
  /// minimal separation.
  std::optional<double> eta;
  SolveMethod method = SolveMethod::ExactLP;
  std::vector<double> sinkhorn_factors{1.0, 0.3, 0.1, 0.03, 0.01};
  AnalysisToggles analyses;
  std::uint64_t seed = 0;
  std::size_t audit_samples = 10000;
  std::optional<double> tail_r_min;
  std::optional<double> tail_r_max;
  bool mollify = false;
  Tolerances tol;
  std::filesystem::path out = "out";
  bool timings = true;
  /// Test hook: audit a deliberately corrupted copy of the plan.
  bool corrupt_plan = false;
};

/// Reads an INI file. Unknown sections or keys throw ConfigError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

/// Throws ConfigError when the configuration is inconsistent.
void validate(const RunConfig& config);

SolveMethod parse_method(const std::string& name);
const char* method_flag(SolveMethod method);
const char* to_string(DensityFamily family);

/// Parses "auto" or a nonnegative number.
std::optional<double> parse_eta(const std::string& text);

}  // namespace mmot::cli
