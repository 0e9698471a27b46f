#pragma once

#include "scucb/common.hpp"

#include <cstdint>
#include <limits>

namespace scucb {

/// Binomial coefficient saturating at uint64 max.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max())
      return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

/// Visits every k-subset of {0..m-1} in lexicographic order.
template <typename Visitor>
void for_each_subset(std::size_t m, std::size_t k, Visitor&& visit) {
  if (k > m) return;
  Subset s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = i;
  for (;;) {
    visit(static_cast<const Subset&>(s));
    if (k == 0) return;
    std::size_t i = k;
    while (i > 0 && s[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

}  // namespace scucb
