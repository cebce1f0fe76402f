#pragma once

// Exact minimisation of  sum_k u[i_k] + sum_{k<l} C(i_k, i_l)  over
// multisets {i_1 <= ... <= i_K} of grid indices. Pair costs are
// nonnegative, so  partial + remaining * min_{j >= i} u[j]  is a valid lower
// bound and the sorted enumeration can stop a whole branch at once.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mmot/model.hpp"

namespace mmot {

struct GridMinimum {
  double value = 0.0;
  /// Lexicographically smallest minimiser (sorted indices).
  std::vector<std::size_t> argmin;
};

GridMinimum grid_minimize(const CostMatrix& pair_cost, std::span<const double> unary, int k);

/// Calls visit(indices, value) for every multiset with value <= threshold,
/// in lexicographic order.
void grid_enumerate_below(const CostMatrix& pair_cost, std::span<const double> unary, int k,
                          double threshold,
                          const std::function<void(std::span<const std::size_t>, double)>& visit);

/// Number of sorted K-multisets of m items, saturating at SIZE_MAX.
std::size_t multiset_count(std::size_t m, int k);

}  // namespace mmot
