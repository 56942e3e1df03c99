#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "xld/error.hpp"
#include "xld/metrics.hpp"

using namespace xld;
using namespace xld::test;

namespace {

// Independent reference: long double, straight loop.
long double ref_distance(std::span<const float> a, std::span<const float> b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

TEST(Normalize, ThreeFourFive) {
  const auto u = normalize(embed({3, 4}));
  EXPECT_NEAR(u[0], 0.6, 1e-7);
  EXPECT_NEAR(u[1], 0.8, 1e-7);
  for (std::size_t i = 2; i < u.size(); ++i) EXPECT_EQ(u[i], 0.0f);
}

TEST(Normalize, IdempotentAndUnit) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto v = gaussian_vector(kEmbeddingDim, rng);
    const auto u = normalize(v);
    EXPECT_NEAR(dot(u, u), 1.0, 1e-12);
    const auto uu = normalize(u);
    for (std::size_t i = 0; i < u.size(); ++i) ASSERT_NEAR(uu[i], u[i], 1e-7);
  }
}

TEST(Normalize, DegenerateVector) {
  EXPECT_THROW(normalize(std::vector<float>(kEmbeddingDim, 0.0f)), Error);
  try {
    normalize(std::vector<float>(4, 1e-20f));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_vector);
  }
}

TEST(Euclidean, KnownValues) {
  const auto x = embed({1});
  const auto y = embed({0, 1});
  const auto neg = embed({-1});
  EXPECT_EQ(euclidean(x, x), 0.0);
  EXPECT_NEAR(euclidean(x, y), std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(euclidean(x, y), 1.414214, 1e-6);
  EXPECT_NEAR(euclidean(x, neg), 2.0, 1e-6);
}

TEST(Euclidean, MatchesLongDoubleReference) {
  std::mt19937_64 rng(2);
  for (std::size_t dim : {1u, 7u, 8u, 15u, 16u, 17u, 383u, 384u, 1000u}) {
    const auto a = gaussian_vector(dim, rng);
    const auto b = gaussian_vector(dim, rng);
    const double d = euclidean(a, b);
    EXPECT_NEAR(d, static_cast<double>(ref_distance(a, b)), 1e-12 * (1 + d)) << "dim " << dim;
    EXPECT_EQ(d, std::sqrt(squared_euclidean(a.data(), b.data(), dim))) << "dim " << dim;
  }
}

TEST(Euclidean, DimensionMismatch) {
  try {
    euclidean(std::vector<float>(3), std::vector<float>(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dimension);
  }
}

TEST(Euclidean, SymmetryTriangleAndCosineIdentity) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 2000; ++t) {
    const auto a = random_unit(kEmbeddingDim, rng);
    const auto b = random_unit(kEmbeddingDim, rng);
    const auto c = random_unit(kEmbeddingDim, rng);
    const double ab = euclidean(a, b);
    ASSERT_EQ(ab, euclidean(b, a));
    ASSERT_LE(euclidean(a, c), ab + euclidean(b, c) + 1e-9);
    ASSERT_NEAR(ab * ab, 2.0 - 2.0 * cosine(a, b), 1e-9);
  }
}

TEST(Cosine, KnownValues) {
  const auto x = embed({2});
  const auto y = embed({0, 5});
  EXPECT_NEAR(cosine(x, x), 1.0, 1e-12);
  EXPECT_NEAR(cosine(x, y), 0.0, 1e-12);
  EXPECT_NEAR(cosine(x, embed({-3})), -1.0, 1e-12);
  EXPECT_THROW(cosine(x, std::vector<float>(kEmbeddingDim, 0.0f)), Error);
}

TEST(SummaryStats, Textbook) {
  const std::vector<double> v{1, 2, 3};
  const auto s = summary_stats(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.sd, 1.0);
  EXPECT_DOUBLE_EQ(s.var, 1.0);
  EXPECT_EQ(s.n, 3u);
}

TEST(SummaryStats, ConstantList) {
  const std::vector<double> v(100, 0.5);
  const auto s = summary_stats(v);
  EXPECT_DOUBLE_EQ(s.mean, 0.5);
  EXPECT_EQ(s.sd, 0.0);
  EXPECT_EQ(s.var, 0.0);
}

TEST(SummaryStats, SampleDenominator) {
  // Population sd of {2,4,4,4,5,5,7,9} is 2; the sample sd is sqrt(32/7).
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = summary_stats(v);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.sd, std::sqrt(32.0 / 7.0), 1e-15);
  EXPECT_NEAR(s.var, s.sd * s.sd, 1e-9 * s.var);
}

TEST(SummaryStats, TranslationInvariance) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 2);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(37);
    for (auto& x : v) x = u(rng);
    std::vector<double> shifted = v;
    for (auto& x : shifted) x += 10.0;
    const auto a = summary_stats(v);
    const auto b = summary_stats(shifted);
    EXPECT_NEAR(b.mean, a.mean + 10.0, 1e-12);
    EXPECT_NEAR(b.sd, a.sd, 1e-12);
    EXPECT_NEAR(a.var, a.sd * a.sd, 1e-9 * a.var);
  }
}

TEST(SummaryStats, TooFewValues) {
  for (std::size_t n : {0u, 1u}) {
    try {
      summary_stats(std::vector<double>(n, 1.0));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::insufficient_data);
    }
  }
}

TEST(FormatFixed, HalfToEvenOnExactTies) {
  // 0.125, 0.375 and 0.625 are exact binary fractions.
  EXPECT_EQ(format_fixed(0.125, 2), "0.12");
  EXPECT_EQ(format_fixed(0.375, 2), "0.38");
  EXPECT_EQ(format_fixed(0.625, 2), "0.62");
  EXPECT_EQ(format_fixed(2.5, 0), "2");
  EXPECT_EQ(format_fixed(3.5, 0), "4");
  EXPECT_EQ(format_fixed(0.25, 1), "0.2");
  EXPECT_EQ(format_fixed(0.145, 2), "0.14");  // 0.145 is stored just below the tie
  EXPECT_EQ(format_fixed(0.615, 2), "0.61");
  EXPECT_EQ(format_fixed(0.7649999, 2), "0.76");
}

TEST(FormatFixed, NoNegativeZero) {
  EXPECT_EQ(format_fixed(-0.001, 2), "0.00");
  EXPECT_EQ(format_fixed(-0.0, 1), "0.0");
  EXPECT_EQ(format_fixed(-0.5, 2), "-0.50");
}
