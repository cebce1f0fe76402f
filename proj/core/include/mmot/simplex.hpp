#pragma once

// Dense revised simplex for equality-form LPs
//     min c^T x  s.t.  A x = b,  x >= 0,  b >= 0
// whose columns are generated on demand by a model. The basis inverse is
// kept dense (rows are few, columns may number in the millions).

#include <cstddef>
#include <span>
#include <vector>

namespace mmot {

struct SparseEntry {
  std::size_t row;
  double value;
};

enum class PricingRule { Dantzig, Bland };

struct PricingResult {
  bool found = false;
  std::size_t column = 0;
  double reduced_cost = 0.0;
};

class LinearProgramModel {
 public:
  virtual ~LinearProgramModel() = default;

  virtual std::size_t num_rows() const = 0;
  virtual std::size_t num_columns() const = 0;
  virtual std::span<const double> rhs() const = 0;
  virtual double cost(std::size_t column) const = 0;
  virtual void column(std::size_t column, std::vector<SparseEntry>& out) const = 0;

  /// Column with reduced cost below -tol. Dantzig picks the most negative
  /// (lowest index on ties), Bland the lowest index. With zero_costs set the
  /// structural costs are treated as 0 (phase one). The default is a generic
  /// scan; models with structure override it.
  virtual PricingResult price(std::span<const double> duals, PricingRule rule, double tol,
                              bool zero_costs) const;
};

struct SimplexOptions {
  std::size_t max_iterations = 2'000'000;
  double feasibility_tol = 1e-11;
  double optimality_tol = 1e-10;
  double pivot_tol = 1e-9;
  std::size_t refactor_interval = 100;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_limit = 64;
};

enum class SimplexStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::IterationLimit;
  double objective = 0.0;
  double dual_objective = 0.0;
  /// Basic structural variables with their values (may include zeros).
  std::vector<SparseEntry> primal;
  /// One multiplier per row.
  std::vector<double> duals;
  std::size_t iterations = 0;
  std::size_t bland_iterations = 0;
};

SimplexResult solve_simplex(const LinearProgramModel& model, const SimplexOptions& options = {});

const char* to_string(SimplexStatus status);

}  // namespace mmot
