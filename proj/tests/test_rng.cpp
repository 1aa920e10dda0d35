#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>

#include "xmimo/rng.hpp"

namespace {

using xmimo::Rng;
using xmimo::stream_key;

TEST(Rng, SameSeedSameSequence) {
  Rng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.cgauss(), b.cgauss());
}

TEST(Rng, DifferentSeedsDiverge) {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  EXPECT_EQ(same, 0);
}

TEST(Rng, UniformRange) {
  Rng r(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform(-3.0, 5.0);
    EXPECT_GE(u, -3.0);
    EXPECT_LT(u, 5.0);
  }
}

TEST(Rng, IndexBoundsAndCoverage) {
  Rng r(11);
  std::array<long, 8> counts{};
  const long n = 80000;
  for (long i = 0; i < n; ++i) {
    const std::uint64_t k = r.index(8);
    ASSERT_LT(k, 8u);
    ++counts[static_cast<std::size_t>(k)];
  }
  // Each bin within 5% of the expected share.
  for (long c : counts) {
    EXPECT_NEAR(static_cast<double>(c), n / 8.0, 0.05 * n / 8.0);
  }
}

TEST(Rng, GaussianMoments) {
  Rng r(42);
  const long n = 200000;
  double sum = 0, sum2 = 0;
  for (long i = 0; i < n; ++i) {
    double g1, g2;
    r.gaussian_pair(g1, g2);
    sum += g1 + g2;
    sum2 += g1 * g1 + g2 * g2;
  }
  const double mean = sum / (2.0 * n);
  const double var = sum2 / (2.0 * n) - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(Rng, ComplexGaussianUnitVariance) {
  Rng r(43);
  const long n = 200000;
  double p = 0, re2 = 0, im2 = 0;
  std::complex<double> mean = 0;
  for (long i = 0; i < n; ++i) {
    const auto z = r.cgauss();
    p += std::norm(z);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    mean += z;
  }
  EXPECT_NEAR(p / n, 1.0, 0.02);
  EXPECT_NEAR(re2 / n, 0.5, 0.01);
  EXPECT_NEAR(im2 / n, 0.5, 0.01);
  EXPECT_NEAR(std::abs(mean) / n, 0.0, 0.01);
}

TEST(Rng, GaussianPairConsumesTwoWords) {
  // The draw sequence is position-independent: one gaussian_pair advances the
  // stream exactly as much as two raw words.
  Rng a(99), b(99);
  double g1, g2;
  a.gaussian_pair(g1, g2);
  b.next_u64();
  b.next_u64();
  for (int i = 0; i < 16; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(StreamKey, DistinctAcrossAllArguments) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t m = 0; m < 8; ++m)
    for (std::uint64_t p = 0; p < 8; ++p)
      for (std::uint64_t t = 0; t < 8; ++t) keys.insert(stream_key(m, p, t));
  EXPECT_EQ(keys.size(), 8u * 8u * 8u);
}

TEST(StreamKey, DeterministicConstexpr) {
  constexpr std::uint64_t k = stream_key(1, 2, 3);
  EXPECT_EQ(k, stream_key(1, 2, 3));
  EXPECT_NE(k, stream_key(1, 2, 4));
  EXPECT_NE(k, stream_key(1, 3, 3));
  EXPECT_NE(k, stream_key(2, 2, 3));
}

TEST(StreamKey, StreamsAreDecorrelated) {
  // Adjacent trial streams should not produce correlated first draws.
  double acc = 0;
  const int n = 4000;
  for (int t = 0; t < n; ++t) {
    Rng r1(stream_key(5, 0, static_cast<std::uint64_t>(t)));
    Rng r2(stream_key(5, 0, static_cast<std::uint64_t>(t + 1)));
    acc += (r1.uniform() - 0.5) * (r2.uniform() - 0.5);
  }
  EXPECT_NEAR(acc / n, 0.0, 0.005);
}

}  // namespace
