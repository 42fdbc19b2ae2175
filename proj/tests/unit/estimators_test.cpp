#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "../support/generators.hpp"
#include "profilekit/distribution.hpp"
#include "profilekit/estimators.hpp"
#include "profilekit/exact_oracle.hpp"
#include "profilekit/random.hpp"
#include "profilekit/sampling.hpp"

using namespace profilekit;

namespace {

DiscreteDistribution D(std::vector<double> probs) { return DiscreteDistribution::from_probabilities(probs); }
Profile P(std::vector<ProfileEntry> pairs) { return Profile::from_pairs(std::move(pairs)); }

SampleCounts counts_of(std::vector<Symbol> seq) { return SampleCounts::from_sequence(seq); }

// KL(p || q) summed symbol by symbol.
double kl_direct(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

}  // namespace

TEST(Empirical, Basics) {
  const auto e = empirical(P({{1, 4}}), 10);
  EXPECT_DOUBLE_EQ(e.q(1), 0.25);
  EXPECT_DOUBLE_EQ(e.q(0), 0.0);
  EXPECT_DOUBLE_EQ(e.total_mass(), 1.0);
  const auto aab = empirical(P({{1, 1}, {2, 1}}));
  EXPECT_NEAR(aab.entropy(), std::log(3.0) - 2.0 / 3 * std::log(2.0), 1e-15);
}

TEST(GoodTuring, FallsBackWhenNextClassIsEmpty) {
  const auto gt = good_turing(P({{2, 2}}));
  EXPECT_DOUBLE_EQ(gt.q(2), 0.5);
  EXPECT_DOUBLE_EQ(gt.total_mass(), 1.0);
}

TEST(GoodTuring, AllDistinctStillSumsToOne) {
  const auto gt = good_turing(P({{1, 10}}), 100);
  EXPECT_NEAR(gt.total_mass(), 1.0, 1e-15);
  EXPECT_NEAR(gt.q(1) * 10, 0.5, 1e-15);
  EXPECT_NEAR(gt.q(0) * 90, 0.5, 1e-15);
}

TEST(GoodTuring, MassesFollowTheNextClass) {
  // phi_1 = 2, phi_2 = 1, phi_3 = 1; n = 9.
  const auto gt = good_turing(P({{1, 2}, {2, 1}, {3, 1}}));
  const double m1 = 2.0 * 1 / 9, m2 = 3.0 * 1 / 9, m3 = 3.0 * 1 / 9;
  const double z = m1 + m2 + m3;
  EXPECT_NEAR(gt.q(1), m1 / z / 2, 1e-15);
  EXPECT_NEAR(gt.q(2), m2 / z, 1e-15);
  EXPECT_NEAR(gt.q(3), m3 / z, 1e-15);
}

TEST(GoodTuring, BeatsFlooredEmpiricalOnPowerLaw) {
  const auto p = make_power_law(1.5, 1000);
  const std::uint64_t n = 10000;
  double kl_gt = 0, kl_emp = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(derive_seed(31, {t}));
    const auto counts = sample_counts(p, n, rng);
    const Profile prof = counts.profile();
    kl_gt += kl(p, counts, with_floor(good_turing(prof, 1000), default_floor(n)));
    kl_emp += kl(p, counts, with_floor(empirical(prof, 1000), default_floor(n)));
  }
  EXPECT_LE(kl_gt / 200, kl_emp / 200);
}

TEST(Dirichlet, Examples) {
  const Profile prof = P({{1, 2}, {3, 1}});
  const auto tiny = dirichlet(prof, 1e-12, 6);
  const auto emp = empirical(prof, 6);
  for (std::uint64_t mu : {0, 1, 3}) EXPECT_NEAR(tiny.q(mu), emp.q(mu), 1e-11);
  const auto flat = dirichlet(Profile{}, 1.0, 7);
  EXPECT_NEAR(flat.q(0), 1.0 / 7, 1e-15);
  EXPECT_NEAR(dirichlet(prof, 0.5, 6).total_mass(), 1.0, 1e-15);
}

TEST(JamesStein, UniformEmpiricalStaysUniform) {
  const auto js = james_stein(P({{3, 4}}), 4);
  EXPECT_NEAR(js.q(3), 0.25, 1e-15);
}

TEST(JamesStein, ApproachesEmpiricalForLargeN) {
  const auto p = make_power_law(1.0, 100);
  Rng rng(8);
  const auto counts = sample_counts(p, 100000, rng);
  const Profile prof = counts.profile();
  const auto js = james_stein(prof, 100);
  const auto emp = empirical(prof, 100);
  double l1 = 0;
  for (const auto& [mu, phi] : js.prevalence) l1 += phi * std::abs(js.q(mu) - emp.q(mu));
  EXPECT_LT(l1, 1e-3);
  EXPECT_NEAR(js.total_mass(), 1.0, 1e-12);
}

TEST(JamesStein, ShrinkageStaysBetweenUniformAndEmpirical) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t k = 2 + rng.below(50);
    const auto p = D(profilekit::testing::random_simplex_point(k, rng));
    const auto counts = sample_counts(p, 2 + rng.below(40), rng);
    const Profile prof = counts.profile();
    const auto js = james_stein(prof, k);
    const auto emp = empirical(prof, k);
    for (const auto& [mu, phi] : js.prevalence) {
      const double u = 1.0 / k, e = emp.q(mu);
      EXPECT_GE(js.q(mu), std::min(u, e) - 1e-15);
      EXPECT_LE(js.q(mu), std::max(u, e) + 1e-15);
    }
  }
}

TEST(Floor, RaisesZeroClassesAndRenormalizes) {
  const auto f = with_floor(empirical(P({{2, 1}}), 5), 0.01);
  EXPECT_GT(f.q(0), 0.0);
  EXPECT_NEAR(f.total_mass(), 1.0, 1e-15);
  EXPECT_THROW(with_floor(empirical(P({{2, 1}})), 0.01), std::invalid_argument);
  EXPECT_DOUBLE_EQ(default_floor(10), 1e-4);
}

TEST(Oracle, Examples) {
  {
    const auto r = best_natural_oracle(D({0.5, 0.3, 0.2}), counts_of({0, 0, 1}));
    EXPECT_NEAR(r.estimate.q(2), 0.5, 1e-15);
    EXPECT_NEAR(r.estimate.q(1), 0.3, 1e-15);
    EXPECT_NEAR(r.estimate.q(0), 0.2, 1e-15);
    EXPECT_NEAR(r.min_kl, 0.0, 1e-15);
  }
  {
    const auto r = best_natural_oracle(D({0.5, 0.5}), counts_of({0, 1}));
    EXPECT_NEAR(r.estimate.q(1), 0.5, 1e-15);
    EXPECT_NEAR(r.min_kl, 0.0, 1e-15);
  }
  {
    const auto r = best_natural_oracle(D({0.7, 0.3}), counts_of({0, 1}));
    EXPECT_NEAR(r.estimate.q(1), 0.5, 1e-15);
    EXPECT_NEAR(r.min_kl, 0.08228, 5e-6);
    EXPECT_NEAR(r.min_kl, 0.7 * std::log(1.4) + 0.3 * std::log(0.6), 1e-15);
  }
}

TEST(Oracle, KlMatchesSymbolwiseSum) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t k = 2 + rng.below(30);
    const auto probs = profilekit::testing::random_simplex_point(k, rng);
    const auto p = D(probs);
    const auto counts = sample_counts(p, 1 + rng.below(60), rng);
    const auto est = dirichlet(counts.profile(), 0.5, k);
    EXPECT_NEAR(kl(p, counts, est), kl_direct(probs, expand(est, p, counts)), 1e-12);
  }
}

TEST(Oracle, DominatesNaturalEstimatorsAndExcessIsNonNegative) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t k = 2 + rng.below(40);
    const auto p = D(profilekit::testing::random_simplex_point(k, rng, 1e-2));
    const std::uint64_t n = 1 + rng.below(100);
    const auto counts = sample_counts(p, n, rng);
    const Profile prof = counts.profile();
    const auto oracle = best_natural_oracle(p, counts);
    EXPECT_NEAR(excess_loss(p, counts, oracle.estimate), 0.0, 1e-12);
    for (const auto& est : {with_floor(empirical(prof, k), default_floor(n)), with_floor(good_turing(prof, k), default_floor(n)),
                            dirichlet(prof, 1.0, k), james_stein(prof, k)}) {
      const double loss = kl(p, counts, est);
      EXPECT_GE(loss, oracle.min_kl - 1e-12) << est.method;
      EXPECT_GE(excess_loss(p, counts, est), -1e-12) << est.method;
      EXPECT_NEAR(excess_loss(p, counts, est), loss - oracle.min_kl, 1e-9) << est.method;
    }
  }
}

TEST(Oracle, UnseenMassOnZeroClassGivesInfiniteKl) {
  const auto p = D({0.5, 0.5});
  const auto counts = counts_of({0, 0});
  EXPECT_TRUE(std::isinf(kl(p, counts, empirical(counts.profile(), 2))));
}

TEST(Entropy, DecompositionIdentity) {
  const std::vector<double> p = {0.2, 0.3, 0.5};
  EXPECT_NEAR(entropy_decomposition_residual(p, p), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(entropy_gap(p, p), 0.0);
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t k = 2 + rng.below(50);
    const auto pd = D(profilekit::testing::random_simplex_point(k, rng, 1e-3));
    const auto counts = sample_counts(pd, 1 + rng.below(200), rng);
    const auto q = expand(dirichlet(counts.profile(), 0.5, k), pd, counts);
    const auto pv = pd.dense();
    EXPECT_LT(std::abs(entropy_decomposition_residual(pv, q)), 1e-10);
  }
}

TEST(Entropy, OracleEntropyGapEqualsMinKl) {
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t k = 2 + rng.below(50);
    const auto pd = D(profilekit::testing::random_simplex_point(k, rng, 1e-3));
    const auto counts = sample_counts(pd, 1 + rng.below(200), rng);
    const auto oracle = best_natural_oracle(pd, counts);
    const auto q = expand(oracle.estimate, pd, counts);
    const auto pv = pd.dense();
    EXPECT_NEAR(entropy(q) - entropy(pv), oracle.min_kl, 1e-10);
  }
}

TEST(Entropy, Values) {
  EXPECT_DOUBLE_EQ(entropy(make_uniform(1)), 0.0);
  EXPECT_NEAR(entropy(make_uniform(8)), std::log(8.0), 1e-15);
}

TEST(Collision, Examples) {
  const auto distinct = collision_tester(P({{1, 5}}), 10, 0.5);
  EXPECT_DOUBLE_EQ(distinct.statistic, 0.0);
  EXPECT_FALSE(distinct.reject);
  const auto repeat = collision_tester(P({{2, 1}}), 10, 0.5);
  EXPECT_DOUBLE_EQ(repeat.statistic, 10.0);
  EXPECT_TRUE(repeat.reject);
  EXPECT_DOUBLE_EQ(repeat.threshold, 1 + 3 * 0.25 / 4);
  EXPECT_THROW(collision_tester(P({{1, 1}}), 10, 0.5), std::invalid_argument);
}

TEST(Collision, ExpectationMatchesCollisionProbability) {
  const std::uint64_t n = 10, trials = 100000;
  for (const auto& p : {make_uniform(20), D({0.5, 0.2, 0.1, 0.1, 0.05, 0.05})}) {
    const auto probs = p.dense();
    double sum_sq = 0;
    for (double x : probs) sum_sq += x * x;
    const double expected = probs.size() * sum_sq;
    double s = 0, s2 = 0;
    Rng rng(16);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const double v = collision_tester(sample_profile(p, n, rng), probs.size(), 0.5).statistic;
      s += v;
      s2 += v * v;
    }
    const double mean = s / trials;
    const double se = std::sqrt((s2 / trials - mean * mean) / trials);
    EXPECT_NEAR(mean, expected, 3 * se);
  }
}

TEST(PmlTester, ThresholdsAsPrinted) {
  const PmlSolver uniform_solver = [](const Profile&) { return std::vector<double>(4, 0.25); };
  const PmlSolver point_solver = [](const Profile&) { return std::vector<double>{1.0}; };
  const Profile prof = P({{1, 2}, {2, 1}});
  const auto r = pml_uniformity_tester(prof, 4, 0.5, uniform_solver);
  EXPECT_DOUBLE_EQ(r.multiplicity_threshold, 3 * 1.0 * std::log(4.0));
  EXPECT_DOUBLE_EQ(r.distance_threshold, 3 * 0.5 / (4 * 2.0));
  EXPECT_FALSE(r.by_max_multiplicity);
  EXPECT_NEAR(r.distance, 0.0, 1e-15);
  EXPECT_FALSE(r.reject);
  const auto far = pml_uniformity_tester(prof, 4, 0.5, point_solver);
  EXPECT_NEAR(far.distance, std::sqrt(0.75), 1e-15);
  EXPECT_TRUE(far.reject);
  EXPECT_DOUBLE_EQ(pml_uniformity_tester(P({{1, 40}}), 10, 0.5, uniform_solver).multiplicity_threshold,
                   3 * 4.0 * std::log(10.0));
}

TEST(PmlTester, PointMassRejectedByMaxMultiplicity) {
  bool solver_called = false;
  const PmlSolver solver = [&](const Profile&) {
    solver_called = true;
    return std::vector<double>{1.0};
  };
  const auto r = pml_uniformity_tester(P({{50, 1}}), 100, 0.5, solver);
  EXPECT_TRUE(r.reject);
  EXPECT_TRUE(r.by_max_multiplicity);
  EXPECT_FALSE(solver_called);
}

TEST(PmlTester, UniformSamplesRarelyRejectedAtLargeEpsilon) {
  const std::uint64_t k = 4, n = 8;
  const PmlSolver solver = [&](const Profile& prof) { return pml_brute(prof, k, 40).probabilities; };
  int rejects = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(17, {static_cast<std::uint64_t>(t)}));
    rejects += pml_uniformity_tester(sample_profile(make_uniform(k), n, rng), k, 2.0, solver).reject;
  }
  EXPECT_LE(rejects, trials / 5);
}

TEST(LocalExtremum, AllDistinctIsLocalMax) {
  Rng rng(18);
  const auto probe = local_extremum_check(P({{1, 4}}), 6, rng);
  EXPECT_LT(probe.statistic, 1.0);
  EXPECT_FALSE(probe.predicted_local_min);
  EXPECT_FALSE(probe.probed_local_min);
  EXPECT_TRUE(probe.agrees);
}

TEST(LocalExtremum, HeavyCollisionIsLocalMin) {
  Rng rng(19);
  const auto probe = local_extremum_check(P({{1, 1}, {4, 1}}), 3, rng);
  EXPECT_GT(probe.statistic, 1.0);
  EXPECT_TRUE(probe.probed_local_min);
  EXPECT_TRUE(probe.agrees);
}

TEST(LocalExtremum, Guards) {
  Rng rng(20);
  EXPECT_THROW(local_extremum_check(P({{5, 1}}), 4, rng), std::invalid_argument);
  EXPECT_THROW(local_extremum_check(P({{1, 5}}), 4, rng), std::invalid_argument);
}

TEST(Median, Examples) {
  const std::vector<double> one = {4.2}, three = {3, 1, 2}, four = {4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(median_boost(one), 4.2);
  EXPECT_DOUBLE_EQ(median_boost(three), 2.0);
  EXPECT_DOUBLE_EQ(median_boost(four), 2.0);
  EXPECT_THROW(median_boost(std::vector<double>{}), std::invalid_argument);
  EXPECT_EQ(median_trick_copies(0.01, 0.1), 12u);
  EXPECT_THROW(median_trick_copies(0.01, 0.5), std::invalid_argument);
}

TEST(Median, BoostingDrivesFailureBelowBeta) {
  const double alpha = 0.1, beta = 0.01;
  const std::uint64_t copies = median_trick_copies(beta, alpha);
  const std::uint64_t trials = 20000;
  Rng rng(21);
  std::uint64_t failures = 0;
  std::vector<double> est(copies);
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (auto& e : est) {
      // Good copies land within 0.1 of the truth 0; bad ones land far away on either side.
      e = rng.uniform() < alpha ? (rng.below(2) ? 5.0 : -5.0) : 0.2 * rng.uniform() - 0.1;
    }
    failures += std::abs(median_boost(est)) > 0.1;
  }
  const double rate = static_cast<double>(failures) / trials;
  EXPECT_LE(rate, beta + 3 * std::sqrt(beta * (1 - beta) / trials));
}
