#include "mmot/grid_search.hpp"

#include <algorithm>
#include <limits>

namespace mmot {

namespace {

struct Search {
  const CostMatrix& cost;
  std::span<const double> unary;
  int k;
  std::vector<double> suffix_min;
  std::vector<std::size_t> current;

  Search(const CostMatrix& c, std::span<const double> u, int kk)
      : cost(c), unary(u), k(kk), suffix_min(u.size() + 1), current(kk) {
    suffix_min[u.size()] = std::numeric_limits<double>::infinity();
    for (std::size_t i = u.size(); i-- > 0;) suffix_min[i] = std::min(suffix_min[i + 1], u[i]);
  }

  double add_cost(int depth, std::size_t i) const {
    double c = unary[i];
    for (int d = 0; d < depth; ++d) c += cost(current[d], i);
    return c;
  }

  // bound(depth, partial) returns the pruning threshold; leaf(value) handles a
  // complete tuple.
  template <class Bound, class Leaf>
  void run(int depth, std::size_t start, double partial, Bound&& bound, Leaf&& leaf) {
    const int remaining = k - depth;
    const std::size_t m = unary.size();
    for (std::size_t i = start; i < m; ++i) {
      if (partial + remaining * suffix_min[i] > bound()) break;
      const double next = partial + add_cost(depth, i);
      current[depth] = i;
      if (remaining == 1) {
        if (next <= bound()) leaf(next);
      } else {
        run(depth + 1, i, next, bound, leaf);
      }
    }
  }
};

}  // namespace

GridMinimum grid_minimize(const CostMatrix& pair_cost, std::span<const double> unary, int k) {
  GridMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  if (k <= 0) {
    best.value = 0.0;
    return best;
  }
  Search search(pair_cost, unary, k);
  // Strict improvement keeps the lexicographically first minimiser.
  search.run(
      0, 0, 0.0, [&] { return best.value; },
      [&](double value) {
        if (value < best.value) {
          best.value = value;
          best.argmin.assign(search.current.begin(), search.current.end());
        }
      });
  return best;
}

void grid_enumerate_below(const CostMatrix& pair_cost, std::span<const double> unary, int k,
                          double threshold,
                          const std::function<void(std::span<const std::size_t>, double)>& visit) {
  if (k <= 0) return;
  Search search(pair_cost, unary, k);
  search.run(
      0, 0, 0.0, [&] { return threshold; },
      [&](double value) { visit(search.current, value); });
}

std::size_t multiset_count(std::size_t m, int k) {
  // C(m + k - 1, k) computed incrementally; exact while it fits.
  long double acc = 1.0L;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<long double>(m + i - 1) / i;
  }
  if (acc >= static_cast<long double>(std::numeric_limits<std::size_t>::max())) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(acc + 0.5L);
}

}  // namespace mmot
