#include <Eigen/Dense>
#include <algorithm>
#include <deque>
#include <cmath>
#include <limits>
#include <map>

#include "mmot/grid_search.hpp"
#include "mmot/solvers.hpp"

namespace mmot {

double median_pair_cost(const Density& density, const CostSpec& spec) {
  const auto& x = density.nodes();
  std::vector<double> costs;
  costs.reserve(x.size() * (x.size() - 1) / 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double c = riesz_cost(x[i], x[j], spec);
      if (c < kInfiniteCost) costs.push_back(c);
    }
  }
  if (costs.empty()) return 1.0;
  const auto mid = costs.begin() + static_cast<std::ptrdiff_t>(costs.size() / 2);
  std::nth_element(costs.begin(), mid, costs.end());
  return *mid;
}

std::vector<double> scaled_schedule(const Density& density, const CostSpec& spec,
                                    const std::vector<double>& factors) {
  const double median = median_pair_cost(density, spec);
  std::vector<double> out;
  out.reserve(factors.size());
  for (double f : factors) out.push_back(f * median);
  return out;
}

namespace {

double log_sum_exp(std::span<const double> terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double t : terms) mx = std::max(mx, t);
  if (!std::isfinite(mx)) return mx;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - mx);
  return mx + std::log(sum);
}

// Log-domain contraction of the Gibbs kernel over the N-1 slots other than
// the first. Works on active nodes only (positive weight).
class GibbsContraction {
 public:
  GibbsContraction(const CostMatrix& cost, std::vector<double> log_mu, int n)
      : cost_(cost), log_mu_(std::move(log_mu)), n_(n), m_(log_mu_.size()) {
    prefix_.resize(static_cast<std::size_t>(n_));
    scratch_.assign(static_cast<std::size_t>(n_), std::vector<double>(m_));
  }

  // out[x] = log sum_{x_2..x_N} exp( sum_{i>=2} (log mu + phi/eps)(x_i) - c(x)/eps )
  void apply(std::span<const double> phi, double eps, std::vector<double>& out) {
    a_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) a_[i] = log_mu_[i] + phi[i] / eps;
    eps_ = eps;
    out.resize(m_);
    for (std::size_t x = 0; x < m_; ++x) {
      prefix_[0] = x;
      out[x] = level(1);
    }
  }

 private:
  double level(int depth) {
    auto& terms = scratch_[depth];
    for (std::size_t i = 0; i < m_; ++i) {
      double t = a_[i];
      for (int d = 0; d < depth; ++d) t -= cost_(prefix_[d], i) / eps_;
      if (depth + 1 < n_ && std::isfinite(t)) {
        prefix_[depth] = i;
        t += level(depth + 1);
      }
      terms[i] = t;
    }
    return log_sum_exp(terms);
  }

  const CostMatrix& cost_;
  std::vector<double> log_mu_;
  int n_;
  std::size_t m_;
  std::vector<std::size_t> prefix_;
  std::vector<std::vector<double>> scratch_;
  std::vector<double> a_;
  double eps_ = 1.0;
};

// Visits every ordered N-tuple of active nodes with its log weight.
template <class Visit>
void for_each_tuple(std::size_t m, int n, std::vector<std::size_t>& idx, int depth,
                    Visit&& visit) {
  for (std::size_t i = 0; i < m; ++i) {
    idx[depth] = i;
    if (depth + 1 == n) {
      visit(idx);
    } else {
      for_each_tuple(m, n, idx, depth + 1, visit);
    }
  }
}

// Anderson mixing for the fixed-point map x -> g(x), with a bounded history.
class Anderson {
 public:
  Anderson(std::size_t size, std::size_t depth) : size_(size), depth_(depth) {}

  void reset() {
    df_.clear();
    dg_.clear();
    has_prev_ = false;
  }

  // x holds the current iterate on entry and the next one on exit.
  void advance(std::vector<double>& x, const std::vector<double>& g) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(size_));
    Eigen::VectorXd gv(static_cast<Eigen::Index>(size_));
    for (std::size_t i = 0; i < size_; ++i) {
      gv(i) = g[i];
      f(i) = g[i] - x[i];
    }
    if (depth_ > 0 && has_prev_) {
      df_.push_back(f - prev_f_);
      dg_.push_back(gv - prev_g_);
      if (df_.size() > depth_) {
        df_.pop_front();
        dg_.pop_front();
      }
    }
    prev_f_ = f;
    prev_g_ = gv;
    has_prev_ = true;
    Eigen::VectorXd next = gv;
    if (!df_.empty()) {
      const auto k = static_cast<Eigen::Index>(df_.size());
      Eigen::MatrixXd big_f(f.size(), k);
      Eigen::MatrixXd big_g(f.size(), k);
      for (Eigen::Index j = 0; j < k; ++j) {
        big_f.col(j) = df_[static_cast<std::size_t>(j)];
        big_g.col(j) = dg_[static_cast<std::size_t>(j)];
      }
      const Eigen::VectorXd gamma = big_f.completeOrthogonalDecomposition().solve(f);
      if (gamma.allFinite()) next -= big_g * gamma;
    }
    for (std::size_t i = 0; i < size_; ++i) x[i] = next(i);
  }

 private:
  std::size_t size_;
  std::size_t depth_;
  std::deque<Eigen::VectorXd> df_;
  std::deque<Eigen::VectorXd> dg_;
  Eigen::VectorXd prev_f_;
  Eigen::VectorXd prev_g_;
  bool has_prev_ = false;
};

}  // namespace

SolveResult solve_sinkhorn_mm(const Density& density, const CostSpec& spec,
                              const SinkhornOptions& options) {
  if (options.epsilon_schedule.empty()) {
    throw Error(ErrorCode::InvalidArgument, "solvers", "epsilon schedule is empty");
  }
  for (std::size_t k = 0; k < options.epsilon_schedule.size(); ++k) {
    const double eps = options.epsilon_schedule[k];
    if (!(eps > 0.0) || (k > 0 && !(eps < options.epsilon_schedule[k - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "solvers",
                  "epsilon schedule must be positive and strictly decreasing");
    }
  }
  const int n = density.particle_count();
  // Zero-weight atoms carry no plan mass and are dropped.
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < density.size(); ++i) {
    if (density.weights()[i] > 0.0) active.push_back(i);
  }
  const std::size_t m = active.size();
  if (checked_pow(m, n) > options.max_configurations) {
    throw Error(ErrorCode::ScaleGuard, "solvers", "m^N exceeds the entropic solver guard");
  }
  std::vector<double> x(m);
  std::vector<double> mu(m);
  std::vector<double> log_mu(m);
  for (std::size_t a = 0; a < m; ++a) {
    x[a] = density.nodes()[active[a]];
    mu[a] = density.weights()[active[a]] / n;
    log_mu[a] = std::log(mu[a]);
  }
  const auto cost = build_cost_tensor(x, spec);
  GibbsContraction contraction(cost, log_mu, n);

  std::vector<double> phi(m, 0.0);
  std::vector<double> lse;
  SolveTolerances tol;
  std::vector<double> stage_values;
  double eps = options.epsilon_schedule.front();

  auto residual_of = [&](const std::vector<double>& l) {
    double r = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      r += std::abs(mu[a] * std::exp(phi[a] / eps + l[a]) - mu[a]);
    }
    return r;
  };

  auto entropic_cost = [&]() {
    double value = 0.0;
    double mass = 0.0;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n));
    for_each_tuple(m, n, idx, 0, [&](const std::vector<std::size_t>& t) {
      double lw = 0.0;
      double c = 0.0;
      for (int i = 0; i < n; ++i) {
        lw += log_mu[t[i]] + phi[t[i]] / eps;
        for (int j = i + 1; j < n; ++j) c += cost(t[i], t[j]);
      }
      const double w = std::exp(lw - c / eps);
      value += w * c;
      mass += w;
    });
    return mass > 0.0 ? value / mass : 0.0;
  };

  for (double stage_eps : options.epsilon_schedule) {
    if (!(stage_eps > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "solvers", "epsilon must be positive");
    }
    eps = stage_eps;
    std::size_t it = 0;
    double residual = std::numeric_limits<double>::infinity();
    double best = residual;
    Anderson accel(m, options.anderson_depth);
    std::vector<double> step(m);
    for (; it < options.max_iters; ++it) {
      contraction.apply(phi, eps, lse);
      for (double l : lse) {
        if (!std::isfinite(l)) {
          throw Error(ErrorCode::NumericalUnderflow, "solvers",
                      "Gibbs kernel vanished; epsilon too small for the cost scale");
        }
      }
      residual = residual_of(lse);
      if (residual < options.tol) break;
      if (residual > 10.0 * best) accel.reset();
      best = std::min(best, residual);
      // Relaxed symmetric update: step 1/N on the shared potential.
      for (std::size_t a = 0; a < m; ++a) {
        step[a] = phi[a] + (-eps * lse[a] - phi[a]) / n;
      }
      accel.advance(phi, step);
    }
    tol.iterations += it;
    tol.final_residual = residual;
    tol.converged = residual < options.tol;
    stage_values.push_back(entropic_cost());
  }

  // Round: keep significant entries, then repair marginals by symmetric
  // proportional scaling on the retained support.
  std::map<std::vector<std::size_t>, double> kept;
  {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n));
    double total = 0.0;
    std::vector<std::pair<std::vector<std::size_t>, double>> entries;
    for_each_tuple(m, n, idx, 0, [&](const std::vector<std::size_t>& t) {
      double lw = 0.0;
      double c = 0.0;
      double min_mu = 1.0;
      for (int i = 0; i < n; ++i) {
        lw += log_mu[t[i]] + phi[t[i]] / eps;
        min_mu = std::min(min_mu, mu[t[i]]);
        for (int j = i + 1; j < n; ++j) c += cost(t[i], t[j]);
      }
      const double w = std::exp(lw - c / eps);
      total += w;
      if (w > options.keep_threshold * min_mu) entries.emplace_back(t, w);
    });
    for (auto& [t, w] : entries) kept[t] = w / total;
  }
  for (int sweep = 0; sweep < 100000; ++sweep) {
    std::vector<double> marg(m, 0.0);
    for (const auto& [t, w] : kept) {
      for (int i = 0; i < n; ++i) marg[t[i]] += w / n;
    }
    double err = 0.0;
    std::vector<double> scale(m, 1.0);
    for (std::size_t a = 0; a < m; ++a) {
      err = std::max(err, std::abs(marg[a] - mu[a]));
      if (marg[a] > 0.0) scale[a] = std::pow(mu[a] / marg[a], 1.0 / n);
    }
    if (err < 1e-15) break;
    for (auto& [t, w] : kept) {
      for (int i = 0; i < n; ++i) w *= scale[t[i]];
    }
  }
  std::vector<PlanAtom> support;
  support.reserve(kept.size());
  for (const auto& [t, w] : kept) {
    // Far-tail products can underflow during repair; they carry no mass.
    if (!(w >= std::numeric_limits<double>::min())) continue;
    Configuration points(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) points[i] = x[t[i]];
    support.push_back({std::move(points), w});
  }
  TransportPlan plan(std::move(support), density);

  // Dual: v = -phi on active nodes, c-transform elsewhere, then shifted so
  // that the grid minimum of sum v + c is zero (a certified lower bound).
  const auto& nodes = density.nodes();
  std::vector<double> v(nodes.size(), 0.0);
  {
    std::vector<double> on_active(m);
    for (std::size_t a = 0; a < m; ++a) on_active[a] = -phi[a];
    const auto full_cost = build_cost_tensor(nodes, spec);
    std::vector<double> unary(m);
    for (std::size_t i = 0, a = 0; i < nodes.size(); ++i) {
      if (a < m && active[a] == i) {
        v[i] = on_active[a++];
        continue;
      }
      for (std::size_t b = 0; b < m; ++b) unary[b] = on_active[b] + full_cost(i, active[b]);
      v[i] = -grid_minimize(cost, unary, n - 1).value;
    }
    const double e = grid_min_energy(nodes, v, n, spec);
    if (std::isfinite(e)) {
      for (double& vi : v) vi -= e / n;
    }
  }

  SolveResult result{
      .plan = plan,
      .primal_value = plan.cost(spec),
      .dual_potential = PotentialField(density.geometry(), nodes, v, OffsetConvention::Raw),
      .method = SolveMethod::Sinkhorn,
      .tolerances = tol,
      .stage_values = stage_values,
  };
  double dual = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) dual -= v[i] * density.weights()[i];
  result.tolerances.dual_objective = dual;
  result.tolerances.duality_gap = std::abs(result.primal_value - dual);
  result.tolerances.marginal_error = result.plan.marginal_error();
  if (!tol.converged) {
    result.diagnostics.push_back("solvers.NoConvergence: final marginal residual " +
                                 std::to_string(tol.final_residual) + " above tolerance");
  }
  return result;
}

}  // namespace mmot
