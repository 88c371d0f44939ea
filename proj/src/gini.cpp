#include "negobench/gini.hpp"

#include <cmath>
#include <stdexcept>

namespace negobench {

GiniResult gini(std::span<const double> gains) {
  if (gains.empty()) throw std::invalid_argument("gini: empty input");
  double total = 0;
  for (double x : gains) {
    if (x < 0 || std::isnan(x)) throw std::invalid_argument("gini: gains must be non-negative");
    total += x;
  }
  if (total == 0) return {0.0, true};
  double pair_sum = 0;
  for (double a : gains) {
    for (double b : gains) pair_sum += std::abs(a - b);
  }
  const double n = static_cast<double>(gains.size());
  return {pair_sum / (2.0 * n * total), false};
}

GiniFraction gini_fraction(std::span<const Score> gains) {
  if (gains.empty()) throw std::invalid_argument("gini: empty input");
  GiniFraction fraction;
  Score total = 0;
  for (Score x : gains) {
    if (x < 0) throw std::invalid_argument("gini: gains must be non-negative");
    total += x;
  }
  for (Score a : gains) {
    for (Score b : gains) fraction.numerator += a > b ? a - b : b - a;
  }
  fraction.denominator = 2 * static_cast<Score>(gains.size()) * total;
  return fraction;
}

GiniResult gini(std::span<const Score> gains) {
  const auto fraction = gini_fraction(gains);
  if (fraction.denominator == 0) return {0.0, true};
  return {static_cast<double>(fraction.numerator) / static_cast<double>(fraction.denominator), false};
}

}  // namespace negobench
