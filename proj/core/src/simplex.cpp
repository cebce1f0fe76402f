#include "mmot/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmot {

const char* to_string(SimplexStatus status) {
  switch (status) {
    case SimplexStatus::Optimal: return "Optimal";
    case SimplexStatus::Infeasible: return "Infeasible";
    case SimplexStatus::Unbounded: return "Unbounded";
    case SimplexStatus::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

PricingResult LinearProgramModel::price(std::span<const double> duals, PricingRule rule,
                                        double tol, bool zero_costs) const {
  PricingResult best;
  std::vector<SparseEntry> col;
  for (std::size_t j = 0; j < num_columns(); ++j) {
    column(j, col);
    double d = zero_costs ? 0.0 : cost(j);
    for (const auto& e : col) d -= duals[e.row] * e.value;
    if (d < -tol && (!best.found || d < best.reduced_cost)) {
      best = {true, j, d};
      if (rule == PricingRule::Bland) break;
    }
  }
  return best;
}

namespace {

class SimplexEngine {
 public:
  SimplexEngine(const LinearProgramModel& model, const SimplexOptions& options)
      : model_(model),
        opt_(options),
        rows_(model.num_rows()),
        cols_(model.num_columns()),
        basis_(rows_),
        xb_(rows_),
        binv_(rows_ * rows_, 0.0) {
    const auto b = model.rhs();
    for (std::size_t i = 0; i < rows_; ++i) {
      if (b[i] < 0.0) throw std::invalid_argument("simplex: rhs must be nonnegative");
      basis_[i] = cols_ + i;
      xb_[i] = b[i];
      binv_[i * rows_ + i] = 1.0;
    }
  }

  SimplexResult run() {
    SimplexResult result;
    if (!iterate(model_, true, result)) return result;
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (is_artificial(basis_[i])) infeasibility += std::max(0.0, xb_[i]);
    }
    double scale = 1.0;
    for (double v : model_.rhs()) scale = std::max(scale, std::abs(v));
    if (infeasibility > 1e-9 * scale) {
      result.status = SimplexStatus::Infeasible;
      return result;
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      if (is_artificial(basis_[i])) xb_[i] = 0.0;
    }
    if (!iterate(model_, false, result)) return result;

    result.status = SimplexStatus::Optimal;
    result.duals = duals(model_, false);
    result.objective = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (is_artificial(basis_[i])) continue;
      result.objective += model_.cost(basis_[i]) * xb_[i];
      result.primal.push_back({basis_[i], std::max(0.0, xb_[i])});
    }
    std::sort(result.primal.begin(), result.primal.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.row < b.row; });
    const auto b = model_.rhs();
    result.dual_objective = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) result.dual_objective += result.duals[i] * b[i];
    return result;
  }

 private:
  bool is_artificial(std::size_t var) const { return var >= cols_; }

  double basic_cost(const LinearProgramModel& model, bool phase_one, std::size_t var) const {
    if (is_artificial(var)) return phase_one ? 1.0 : 0.0;
    return phase_one ? 0.0 : model.cost(var);
  }

  std::vector<double> duals(const LinearProgramModel& model, bool phase_one) const {
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double cb = basic_cost(model, phase_one, basis_[i]);
      if (cb == 0.0) continue;
      const double* row = &binv_[i * rows_];
      for (std::size_t k = 0; k < rows_; ++k) y[k] += cb * row[k];
    }
    return y;
  }

  // Returns false when the run must stop (status already written).
  bool iterate(const LinearProgramModel& model, bool phase_one, SimplexResult& result) {
    std::size_t degenerate = 0;
    std::size_t since_refactor = 0;
    std::vector<SparseEntry> col;
    std::vector<double> d(rows_);
    while (true) {
      if (result.iterations >= opt_.max_iterations) {
        result.status = SimplexStatus::IterationLimit;
        return false;
      }
      const auto y = duals(model, phase_one);
      const PricingRule rule =
          degenerate >= opt_.degenerate_limit ? PricingRule::Bland : PricingRule::Dantzig;
      const auto entering = model.price(y, rule, opt_.optimality_tol, phase_one);
      if (!entering.found) return true;

      model.column(entering.column, col);
      std::fill(d.begin(), d.end(), 0.0);
      for (const auto& e : col) {
        for (std::size_t i = 0; i < rows_; ++i) d[i] += binv_[i * rows_ + e.row] * e.value;
      }

      std::size_t leave = rows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_; ++i) {
        double ratio;
        const bool pinned = !phase_one && is_artificial(basis_[i]);
        if (pinned) {
          if (std::abs(d[i]) <= opt_.pivot_tol) continue;
          ratio = 0.0;
        } else {
          if (d[i] <= opt_.pivot_tol) continue;
          ratio = std::max(0.0, xb_[i]) / d[i];
        }
        bool take = false;
        if (leave == rows_ || ratio < best_ratio - opt_.feasibility_tol) {
          take = true;
        } else if (ratio <= best_ratio + opt_.feasibility_tol) {
          if (rule == PricingRule::Bland) {
            take = basis_[i] < basis_[leave];
          } else if (std::abs(d[i]) > std::abs(d[leave]) * (1.0 + 1e-12)) {
            take = true;
          } else if (std::abs(d[i]) >= std::abs(d[leave]) * (1.0 - 1e-12)) {
            take = basis_[i] < basis_[leave];
          }
        }
        if (take) {
          leave = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
      if (leave == rows_) {
        result.status = SimplexStatus::Unbounded;
        return false;
      }

      const double theta = std::max(0.0, xb_[leave]) / d[leave];
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == leave) continue;
        xb_[i] -= theta * d[i];
        if (xb_[i] < 0.0 && xb_[i] > -opt_.feasibility_tol) xb_[i] = 0.0;
      }
      xb_[leave] = theta;
      basis_[leave] = entering.column;
      pivot(leave, d);

      ++result.iterations;
      if (rule == PricingRule::Bland) ++result.bland_iterations;
      degenerate = theta <= opt_.feasibility_tol ? degenerate + 1 : 0;
      if (++since_refactor >= opt_.refactor_interval) {
        refactor(model);
        since_refactor = 0;
      }
    }
  }

  void pivot(std::size_t r, const std::vector<double>& d) {
    double* prow = &binv_[r * rows_];
    const double inv = 1.0 / d[r];
    for (std::size_t k = 0; k < rows_; ++k) prow[k] *= inv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || d[i] == 0.0) continue;
      double* row = &binv_[i * rows_];
      const double f = d[i];
      for (std::size_t k = 0; k < rows_; ++k) row[k] -= f * prow[k];
    }
  }

  // Rebuilds the basis inverse by Gauss-Jordan elimination and recomputes
  // basic values from the rhs.
  void refactor(const LinearProgramModel& model) {
    const std::size_t n = rows_;
    std::vector<double> a(n * n, 0.0);
    std::vector<SparseEntry> col;
    for (std::size_t j = 0; j < n; ++j) {
      if (is_artificial(basis_[j])) {
        a[(basis_[j] - cols_) * n + j] = 1.0;
      } else {
        model.column(basis_[j], col);
        for (const auto& e : col) a[e.row * n + j] = e.value;
      }
    }
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      for (std::size_t i = c + 1; i < n; ++i) {
        if (std::abs(a[i * n + c]) > std::abs(a[p * n + c])) p = i;
      }
      if (std::abs(a[p * n + c]) < 1e-14) return;  // keep the product-form inverse
      if (p != c) {
        for (std::size_t k = 0; k < n; ++k) {
          std::swap(a[p * n + k], a[c * n + k]);
          std::swap(inv[p * n + k], inv[c * n + k]);
        }
      }
      const double piv = 1.0 / a[c * n + c];
      for (std::size_t k = 0; k < n; ++k) {
        a[c * n + k] *= piv;
        inv[c * n + k] *= piv;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double f = a[i * n + c];
        if (i == c || f == 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) {
          a[i * n + k] -= f * a[c * n + k];
          inv[i * n + k] -= f * inv[c * n + k];
        }
      }
    }
    binv_ = std::move(inv);
    const auto b = model.rhs();
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < n; ++k) v += binv_[i * n + k] * b[k];
      xb_[i] = std::abs(v) < opt_.feasibility_tol ? 0.0 : v;
    }
  }

  const LinearProgramModel& model_;
  SimplexOptions opt_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> basis_;
  std::vector<double> xb_;
  std::vector<double> binv_;
};

}  // namespace

SimplexResult solve_simplex(const LinearProgramModel& model, const SimplexOptions& options) {
  SimplexEngine engine(model, options);
  return engine.run();
}

}  // namespace mmot
