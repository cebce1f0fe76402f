#pragma once

// Domain types shared by every module: geometry, Riesz cost, atomic
// densities, transport plans and grid-sampled potentials.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mmot/error.hpp"

namespace mmot {

/// Finite stand-in for an infinite pair cost (coincident points, eta = 0).
inline constexpr double kInfiniteCost = 1e300;

enum class GeometryKind { Line1D, RadialSymmetric };

struct Geometry {
  GeometryKind kind = GeometryKind::Line1D;
  int dimension = 1;

  static Geometry line() { return {GeometryKind::Line1D, 1}; }
  /// Throws InvalidArgument unless d >= 2.
  static Geometry radial(int d);

  bool operator==(const Geometry&) const = default;
};

struct CostSpec {
  double s = 1.0;
  double eta = 0.0;

  /// Throws InvalidArgument unless s > 0 and eta >= 0.
  static CostSpec make(double s, double eta = 0.0);
};

/// max(|x - y|, eta)^(-s), or kInfiniteCost on the diagonal when eta = 0.
double riesz_cost(double x, double y, const CostSpec& spec);

using Configuration = std::vector<double>;

/// Sum of riesz_cost over all unordered pairs. Requires at least two points.
double config_cost(std::span<const double> points, const CostSpec& spec);

/// Weighted point masses on a 1D or radial grid with total mass N.
class Density {
 public:
  /// Validates every invariant; throws InfeasibleDensity on violation.
  Density(Geometry geometry, std::vector<double> nodes,
          std::vector<double> weights, int particle_count);

  /// Same as the constructor but first rescales weights to sum to N.
  static Density renormalized(Geometry geometry, std::vector<double> nodes,
                              std::vector<double> weights, int particle_count);

  const Geometry& geometry() const noexcept { return geometry_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  int particle_count() const noexcept { return particle_count_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Per-slot marginal weights, i.e. weights / N.
  std::vector<double> marginal() const;

 private:
  Geometry geometry_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  int particle_count_;
};

/// Signed-radius line density: each radius r > 0 is split into atoms at -r
/// and +r carrying half the weight. Line1D inputs are returned unchanged.
Density mirror_to_line(const Density& density);

struct PlanAtom {
  Configuration points;
  double weight = 0.0;
};

/// Discrete probability measure on N-point configurations.
class TransportPlan {
 public:
  TransportPlan(std::vector<PlanAtom> support, Density marginal_ref);

  const std::vector<PlanAtom>& support() const noexcept { return support_; }
  const Density& marginal_ref() const noexcept { return marginal_ref_; }
  int particle_count() const noexcept { return marginal_ref_.particle_count(); }

  double total_weight() const;
  /// Max over slots and nodes of |plan marginal - weights/N|. Support points
  /// must coincide with density nodes (exact comparison after lookup with a
  /// relative tolerance of 1e-12 on coordinates).
  double marginal_error() const;
  /// Sum of weight * config_cost over the support.
  double cost(const CostSpec& spec) const;

  /// Averages the plan over all N! slot permutations and merges duplicates.
  TransportPlan symmetrized() const;

 private:
  std::vector<PlanAtom> support_;
  Density marginal_ref_;
};

enum class Interpolation { PiecewiseLinear };
enum class OffsetConvention { EqVNormalized, VanishingAtInfinity, Raw };

/// Far-field model a + b |r|^(-s), used beyond the grid when present.
struct TailModel {
  double a = 0.0;
  double b = 0.0;
  double s = 1.0;
};

class PotentialField {
 public:
  PotentialField(Geometry geometry, std::vector<double> nodes,
                 std::vector<double> values,
                 OffsetConvention convention = OffsetConvention::Raw);

  const Geometry& geometry() const noexcept { return geometry_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return values_; }
  OffsetConvention convention() const noexcept { return convention_; }
  Interpolation interpolation() const noexcept { return Interpolation::PiecewiseLinear; }
  const std::optional<TailModel>& tail() const noexcept { return tail_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Piecewise-linear inside the grid; tail model outside when one is
  /// attached, otherwise the nearest boundary value. Radial fields are
  /// evaluated at |x|.
  double operator()(double x) const;
  /// Like operator() but throws OutOfDomain outside the grid when no tail
  /// model is attached.
  double evaluate_strict(double x) const;

  PotentialField shifted(double constant) const;
  PotentialField with_values(std::vector<double> values, OffsetConvention convention) const;
  PotentialField with_tail(TailModel tail) const;

 private:
  double interpolate(double x) const;

  Geometry geometry_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  OffsetConvention convention_;
  std::optional<TailModel> tail_;
};

/// Dense symmetric m x m matrix of pair costs between grid nodes.
class CostMatrix {
 public:
  CostMatrix(std::size_t m, std::vector<double> data) : m_(m), data_(std::move(data)) {}

  std::size_t size() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * m_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * m_, m_}; }
  /// Largest entry below kInfiniteCost, or 0 when none.
  double max_finite() const;

 private:
  std::size_t m_;
  std::vector<double> data_;
};

CostMatrix build_cost_tensor(std::span<const double> nodes, const CostSpec& spec);
CostMatrix build_cost_tensor(const Density& density, const CostSpec& spec);

/// Index of the node equal to x (relative tolerance 1e-12), if any.
std::optional<std::size_t> find_node(std::span<const double> nodes, double x);

/// Integer power m^k saturating at SIZE_MAX.
std::size_t checked_pow(std::size_t m, int k);

const char* to_string(GeometryKind kind);
const char* to_string(OffsetConvention convention);

}  // namespace mmot
