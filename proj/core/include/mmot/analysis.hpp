#pragma once

// Checks run on computed plans and potentials: far-field fit, escape of at
// most one particle, pairwise swap optimality and the energy ladder.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmot/model.hpp"
#include "mmot/potential.hpp"

namespace mmot {

struct TailFit {
  double r_min = 0.0;
  double r_max = 0.0;
  std::size_t nodes_used = 0;
  double exponent = 1.0;
  /// Model v(r) = -offset + coefficient * r^(-s).
  double coefficient = 0.0;
  double offset = 0.0;
  /// RMS of v - model over the window nodes.
  double residual = 0.0;
  /// Expected coefficient -(N - 1).
  double target = 0.0;

  double relative_error() const;
};

/// Least squares over grid nodes with r_min <= |r| <= r_max (r > 0 only on a
/// line). Throws WindowTooSmall when fewer than 4 nodes qualify.
TailFit fit_tail(const PotentialField& v, double s, int n, double r_min, double r_max);

/// Window [0.5 R, 0.9 R] with R the largest grid coordinate.
TailFit fit_tail(const PotentialField& v, double s, int n);

/// Rows r, v(r), model(r) over the window nodes.
void write_tail_csv(std::ostream& out, const PotentialField& v, const TailFit& fit);

struct DissociationReport {
  /// Largest second-largest point norm over the support.
  double r_star = 0.0;
  /// Largest point norm over the support.
  double max_norm = 0.0;
  std::vector<double> radii;
  /// Weight (plans) or configuration count (sigma sets) whose second-largest
  /// norm exceeds each radius.
  std::vector<double> violating;
  /// Nothing escapes beyond r_star and violating is non-increasing in R.
  bool pass = false;
};

DissociationReport check_dissociation(const TransportPlan& plan, std::vector<double> radii);
DissociationReport check_dissociation(const SigmaSet& sigma, std::vector<double> radii);

struct SwapViolation {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t slot = 0;
  double value = 0.0;
};

struct MonotonicityAudit {
  std::size_t samples_checked = 0;
  bool exhaustive = false;
  /// Max over checked pairs and slots of c(x) + c(y) - c(x') - c(y').
  double worst_violation = 0.0;
  /// Entries above the 1e-9 threshold, at most kMaxRecordedViolations.
  std::vector<SwapViolation> violating_pairs;
};

inline constexpr double kSwapThreshold = 1e-9;
inline constexpr std::size_t kMaxRecordedViolations = 1000;

/// c(x) + c(y) - c(x with slot from y) - c(y with slot from x).
double swap_violation(const Configuration& x, const Configuration& y, std::size_t slot,
                      const CostSpec& spec);

/// Checks every pair of support atoms when there are at most num_samples of
/// them, otherwise num_samples seeded random pairs. Deterministic per seed.
MonotonicityAudit audit_cyclical_monotonicity(const TransportPlan& plan, const CostSpec& spec,
                                              std::size_t num_samples, std::uint64_t seed);

struct CorruptedPlan {
  TransportPlan plan;
  /// Support indices of the two swapped atoms in the corrupted plan.
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t slot = 0;
  /// c(x') + c(y') - c(x) - c(y): the violation the audit must report for
  /// the swapped pair.
  double expected_violation = 0.0;
};

/// Exchanges one coordinate between the two support atoms where this
/// raises the cost most, moving the smaller of their weights. Marginals are
/// unchanged. Throws InvalidArgument when no exchange raises the cost.
CorruptedPlan corrupt_plan(const TransportPlan& plan, const CostSpec& spec);

struct BindingLadder {
  EnergyLadder ladder;
  double tol_equal = 0.0;
  double tol_strict = 0.0;
  /// |E_N - E_(N-1)|.
  double equal_gap = 0.0;
  /// margins[i] = E_(K-1) - E_K - tol_strict for K = i + 2 <= N - 1.
  std::vector<double> margins;
  bool equal_pass = false;
  bool strict_pass = false;
  bool monotone_pass = false;
  /// E_1 < 0: a binding potential must be somewhere negative.
  bool shape_pass = false;

  bool pass() const { return equal_pass && strict_pass && monotone_pass && shape_pass; }
};

/// Expects v to vanish at infinity. Tolerances are relative to |E_1|.
BindingLadder binding_ladder(const PotentialField& v, int n, const CostSpec& spec,
                             double rel_equal = 1e-6, double rel_strict = 1e-8);

/// Shifts a normalized potential (E_N(v) = 0) by E_(N-1)(v), its limit at
/// infinity, so the result vanishes at infinity.
PotentialField vanishing_gauge(const PotentialField& normalized, int n, const CostSpec& spec);

/// Minimum pairwise distance over the support; 0 for a diagonal point.
double min_separation(const TransportPlan& plan);

}  // namespace mmot
