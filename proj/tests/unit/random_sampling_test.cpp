#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "profilekit/distribution.hpp"
#include "profilekit/random.hpp"
#include "profilekit/sampling.hpp"

using namespace profilekit;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, DeriveSeedIsPathSensitive) {
  EXPECT_EQ(derive_seed(1, {2, 3, 4}), derive_seed(1, {2, 3, 4}));
  EXPECT_NE(derive_seed(1, {2, 3, 4}), derive_seed(1, {2, 4, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {2, 3, 0}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto x = rng.below(7);
    ASSERT_LT(x, 7u);
    ++hits[x];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, UniformMoments) {
  Rng rng(9);
  double sum = 0, sum_sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 3 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sum_sq / n, 1.0 / 3, 0.005);
}

TEST(Rng, NormalMoments) {
  Rng rng(10);
  double sum = 0, sum_sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 3 / std::sqrt(n));
  EXPECT_NEAR(sum_sq / n, 1.0, 0.02);
}

class PoissonMoments : public ::testing::TestWithParam<double> {};

TEST_P(PoissonMoments, MeanAndVarianceMatchLambda) {
  const double lambda = GetParam();
  Rng rng(static_cast<std::uint64_t>(lambda * 1000) + 1);
  const int n = 100000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const auto x = static_cast<double>(rng.poisson(lambda));
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, lambda, 4 * std::sqrt(lambda / n) + 1e-12);
  EXPECT_NEAR(var, lambda, 0.03 * lambda + 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Lambdas, PoissonMoments, ::testing::Values(0.1, 1.0, 4.5, 10.0, 37.0, 1000.0, 1e5));

TEST(Rng, PoissonZeroLambda) {
  Rng rng(1);
  EXPECT_EQ(rng.poisson(0.0), 0u);
}

TEST(Sampling, PointMassRepeatsOneSymbol) {
  Rng rng(1);
  const auto xs = sample(make_uniform(1), 5, rng);
  ASSERT_EQ(xs.size(), 5u);
  for (auto x : xs) EXPECT_EQ(x, 1);
}

TEST(Sampling, FixedSeedReproducesSequence) {
  const auto p = make_power_law(1.2, 500);
  Rng a(99), b(99);
  EXPECT_EQ(sample(p, 1000, a), sample(p, 1000, b));
}

TEST(Sampling, EmpiricalFrequenciesWithinBinomialBand) {
  // Both the inverse-CDF path (few runs) and the alias path (many runs).
  for (const auto& p : {DiscreteDistribution::from_probabilities(std::vector<double>{0.5, 0.3, 0.2}),
                        make_power_law(1.0, 200)}) {
    const std::uint64_t n = 100000;
    int runs_inside = 0;
    const int repeats = 20;
    for (int rep = 0; rep < repeats; ++rep) {
      Rng rng(derive_seed(77, {static_cast<std::uint64_t>(rep)}));
      const SampleCounts counts = sample_counts(p, n, rng);
      bool inside = true;
      for (Symbol x = p.first_label(); x <= p.last_label(); ++x) {
        const double px = p.probability(x);
        const double freq = static_cast<double>(counts.count(x)) / n;
        if (std::abs(freq - px) > 4 * std::sqrt(px * (1 - px) / n)) inside = false;
      }
      runs_inside += inside;
    }
    EXPECT_GE(runs_inside, repeats - 1);
  }
}

TEST(Sampling, PoissonizedLengthHasMeanN) {
  const auto p = make_uniform(10);
  double total = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    Rng rng(derive_seed(5, {t}));
    total += static_cast<double>(sample_poissonized(p, 50, rng).size());
  }
  EXPECT_NEAR(total / 2000, 50.0, 3 * std::sqrt(50.0 / 2000));
}

TEST(Sampling, SampleProfileMatchesCountedSample) {
  const auto p = make_power_law(1.5, 2000);
  Rng a(31), b(31);
  const auto xs = sample(p, 5000, a);
  EXPECT_EQ(sample_profile(p, 5000, b), profile_of(xs));
}

TEST(Sampling, HugeSupportUsesSparseCounting) {
  // 10^8 filler labels: dense counting would not fit.
  const auto p = DiscreteDistribution::from_runs({{0.5, 1}, {0.5 / 1e8, 100'000'000}}, 1);
  Rng rng(4);
  const Profile prof = sample_profile(p, 1000, rng);
  EXPECT_EQ(prof.length(), 1000u);
}
