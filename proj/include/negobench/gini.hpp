#pragma once

#include <span>

#include "negobench/game.hpp"

namespace negobench {

struct GiniResult {
  double value = 0;
  bool all_zero = false;  // 0/0 case, reported as 0
};

// sum_i sum_j |x_i - x_j| / (2 n^2 mean), over all ordered pairs.
// Throws std::invalid_argument on an empty input or a negative gain.
GiniResult gini(std::span<const double> gains);
GiniResult gini(std::span<const Score> gains);

// Exact form for integer gains: numerator sum |x_i - x_j| over ordered pairs,
// denominator 2 n sum x (equal to 2 n^2 mean).
struct GiniFraction {
  Score numerator = 0;
  Score denominator = 0;
};
GiniFraction gini_fraction(std::span<const Score> gains);

}  // namespace negobench
