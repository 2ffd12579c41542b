#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "decs/rng.hpp"

namespace {

using decs::Rng;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  using Block = std::array<std::uint32_t, 4>;
  EXPECT_EQ(Rng::philox({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Rng::philox({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                        {0xffffffffu, 0xffffffffu}),
            (Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Rng::philox({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                        {0xa4093822u, 0x299f31d0u}),
            (Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, StreamIsPureFunctionOfSeed) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u32(), b.next_u32());
  Rng c(43);
  Rng d(42);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += c.next_u32() == d.next_u32();
  EXPECT_LT(same, 3);
}

TEST(Rng, FirstWordsComeFromBlockZero) {
  Rng rng(0x0000000200000001ull, 0x0000000400000003ull);
  const auto block = Rng::philox({0, 0, 3, 4}, {1, 2});
  for (auto word : block) EXPECT_EQ(rng.next_u32(), word);
}

TEST(Rng, SplitIsDeterministicAndDistinct) {
  const Rng parent(7);
  Rng a = parent.split(1);
  Rng b = parent.split(1);
  Rng c = parent.split(2);
  EXPECT_EQ(a.seed(), b.seed());
  EXPECT_EQ(a.stream(), b.stream());
  EXPECT_NE(a.seed(), c.seed());
  // Splitting does not consume parent output.
  Rng p1(7);
  Rng p2(7);
  (void)p2.split(5);
  EXPECT_EQ(p1.next_u64(), p2.next_u64());

  std::set<std::pair<std::uint64_t, std::uint64_t>> ids;
  for (std::uint64_t id = 0; id < 1000; ++id) {
    const Rng child = parent.split(id);
    ids.emplace(child.seed(), child.stream());
  }
  EXPECT_EQ(ids.size(), 1000u);
}

TEST(Rng, UniformRanges) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(Rng, UniformIntIsUnbiased) {
  Rng rng(5);
  const int n = 7;
  const int draws = 70000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < draws; ++i) ++counts[rng.uniform_int(n)];
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - draws / n) * (c - draws / n) / static_cast<double>(draws / n);
  EXPECT_LT(chi2, 22.46);
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <typename Draw>
Moments moments(Draw draw, int n) {
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  return {mean, sq / n - mean * mean};
}

TEST(Rng, DistributionMoments) {
  Rng rng(99);
  const int n = 200000;
  const double se = 1.0 / std::sqrt(static_cast<double>(n));

  const auto normal = moments([&] { return rng.normal(); }, n);
  EXPECT_NEAR(normal.mean, 0.0, 4 * se);
  EXPECT_NEAR(normal.var, 1.0, 0.02);

  const auto expo = moments([&] { return rng.exponential(); }, n);
  EXPECT_NEAR(expo.mean, 1.0, 4 * se);
  EXPECT_NEAR(expo.var, 1.0, 0.03);

  const auto gumbel = moments([&] { return rng.gumbel(); }, n);
  EXPECT_NEAR(gumbel.mean, std::numbers::egamma, 5 * se * std::numbers::pi / std::sqrt(6.0));
  EXPECT_NEAR(gumbel.var, std::numbers::pi * std::numbers::pi / 6.0, 0.05);
}

TEST(Rng, SignIsFair) {
  Rng rng(3);
  const int n = 10000;
  int plus = 0;
  for (int i = 0; i < n; ++i) plus += rng.sign() > 0;
  EXPECT_NEAR(plus / static_cast<double>(n), 0.5, 3 * 0.5 / std::sqrt(n));
}

TEST(Rng, PermutationIsUniform) {
  Rng rng(11);
  std::vector<int> counts(6, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    auto perm = rng.permutation(3);
    const int code = perm[0] * 2 + (perm[1] > perm[2] ? 1 : 0);
    ++counts[code];
    std::sort(perm.begin(), perm.end());
    ASSERT_EQ(perm, (std::vector<int>{0, 1, 2}));
  }
  for (int c : counts) EXPECT_NEAR(c, draws / 6, 5 * std::sqrt(draws / 6.0));
}

}  // namespace
