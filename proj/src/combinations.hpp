#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace ipa::detail {

// C(n, k), saturating at SIZE_MAX.
inline std::size_t binomial(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (Eigen::Index i = 1; i <= k; ++i) {
    const auto num = static_cast<std::size_t>(n - k + i);
    if (result > std::numeric_limits<std::size_t>::max() / num)
      return std::numeric_limits<std::size_t>::max();
    result = result * num / static_cast<std::size_t>(i);
  }
  return result;
}

// Calls visit(indices) for every k-subset of [0, n) in lexicographic order.
template <class Visit>
void for_each_combination(Eigen::Index n, Eigen::Index k, Visit&& visit) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    visit(static_cast<const std::vector<Eigen::Index>&>(idx));
    Eigen::Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace ipa::detail
