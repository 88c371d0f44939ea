#include <gtest/gtest.h>

#include <random>

#include "negobench/gini.hpp"
#include "support/oracles.hpp"

namespace nb = negobench;

TEST(Gini, EqualVectorIsZero) {
  const std::vector<double> v(5, 3.5);
  EXPECT_EQ(nb::gini(std::span<const double>(v)).value, 0.0);
}

TEST(Gini, SingleWinner) {
  for (std::size_t n = 2; n <= 10; ++n) {
    std::vector<double> v(n, 0.0);
    v[0] = 42;
    EXPECT_NEAR(nb::gini(std::span<const double>(v)).value, double(n - 1) / double(n), 1e-12);
  }
}

TEST(Gini, HandCaseIsExact) {
  const std::vector<nb::Score> v{30, 60};
  const auto f = nb::gini_fraction(v);
  // 60 / 360 = 1/6
  EXPECT_EQ(f.numerator * 6, f.denominator);
  EXPECT_EQ(nb::gini(std::span<const nb::Score>(v)).value, 1.0 / 6.0);
}

TEST(Gini, AllZeroAndErrors) {
  const std::vector<nb::Score> zeros{0, 0, 0};
  const auto r = nb::gini(std::span<const nb::Score>(zeros));
  EXPECT_TRUE(r.all_zero);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_THROW(nb::gini(std::span<const nb::Score>()), std::invalid_argument);
  const std::vector<nb::Score> negative{1, -1};
  EXPECT_THROW(nb::gini(std::span<const nb::Score>(negative)), std::invalid_argument);
}

TEST(Gini, MatchesNaiveFormulaAndStaysInRange) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> len(1, 12);
  std::uniform_real_distribution<double> x(0, 100);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(static_cast<std::size_t>(len(gen)));
    for (auto& e : v) e = x(gen);
    const double g = nb::gini(std::span<const double>(v)).value;
    EXPECT_NEAR(g, nb::testing::naive_gini(v), 1e-12);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, double(v.size() - 1) / double(v.size()) + 1e-12);
  }
}
