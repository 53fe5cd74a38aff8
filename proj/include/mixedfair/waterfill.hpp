// Max-min water-filling of a divisible value over bundles.
#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "mixedfair/rational.hpp"

namespace mixedfair {

// Distributes `cake` (>= 0) over bundles with the given values so that the
// post-addition minimum is maximized. Bundles above the final water level
// receive 0. The result is the unique max-min distribution.
inline std::vector<Rat> water_fill(const std::vector<Rat>& values, const Rat& cake) {
  if (cake < 0) throw error("water_fill: negative cake value");
  const std::size_t n = values.size();
  std::vector<Rat> additions(n, Rat(0));
  if (n == 0 || cake == 0) return additions;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  // Raise the k lowest bundles to a common level; k is the largest prefix
  // whose level stays below the next bundle's value.
  Rat prefix = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += values[order[k - 1]];
    Rat level = (prefix + cake) / static_cast<long>(k);
    if (k == n || level <= values[order[k]]) {
      for (std::size_t i = 0; i < k; ++i) additions[order[i]] = level - values[order[i]];
      return additions;
    }
  }
  return additions;  // unreachable
}

}  // namespace mixedfair
