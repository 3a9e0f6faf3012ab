#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "orlicz/komlos.hpp"

using namespace orlicz;

namespace {

// xi_n = 2^{n/2} on [2^-n, 2^{1-n}): unit L2 norm, disjoint, tending to 0 a.s.
RvSequence normalized_spikes(int k) {
  auto s = DyadicSpace::uniform(k);
  return RvSequence::generate(
      s, static_cast<std::size_t>(k),
      [&](std::size_t n) {
        const double p = std::ldexp(1.0, -static_cast<int>(n));
        return RandomVariable::interval_indicator(s, p, 2 * p, std::sqrt(1.0 / p));
      },
      "spikes");
}

// b + 2^{-n} zeta + 32 on atom 2(n-1): bounded part converging to b plus unit L2 spikes.
struct Mixed {
  RvSequence seq;
  RandomVariable b, zeta;
};

Mixed mixed(std::size_t terms, std::uint64_t seed) {
  auto s = DyadicSpace::uniform(10);
  std::mt19937_64 rng(seed);
  Mixed m;
  m.b = RandomVariable(s, oracle::random_vector(rng, s->size(), -1, 1));
  m.zeta = RandomVariable(s, oracle::random_vector(rng, s->size(), -1, 1));
  m.seq = RvSequence::generate(s, terms, [&](std::size_t n) {
    std::vector<double> spike(s->size(), 0.0);
    spike[2 * (n - 1) % s->size()] = 32.0;
    return m.b + m.zeta * std::ldexp(1.0, -static_cast<int>(n)) + RandomVariable(s, spike);
  });
  return m;
}

}  // namespace

TEST(KpSplit, SpikesBecomeSingular) {
  const auto seq = normalized_spikes(12);
  const auto phistar = young::quadratic(1.0);
  const auto sp = kp_split(seq, phistar);
  for (std::size_t n = 0; n < seq.size(); ++n) {
    EXPECT_EQ(sp.regular[n] + sp.singular[n], seq[n]);
    if (n >= 2) {
      EXPECT_TRUE(sp.regular[n].is_zero()) << n;
      EXPECT_EQ(sp.disjoint_sets[n].size(), support(seq[n]).size());
    }
  }
  std::vector<int> owner(seq.space()->size(), 0);
  for (const auto& a : sp.disjoint_sets)
    for (std::size_t i : a) EXPECT_EQ(owner[i]++, 0);
  for (std::size_t i = 1; i < sp.ui_profile.size(); ++i) EXPECT_LE(sp.ui_profile[i].second, sp.ui_profile[i - 1].second);
}

TEST(KpSplit, ThresholdIsTheSmallestMeetingTheBudget) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 16;
    std::vector<double> v(n), w(n, 1.0 / n);
    for (auto& x : v) x = std::floor(u(rng));  // ties on purpose
    const double budget = std::ldexp(1.0, -1 - t % 4);
    const double T = detail::budget_threshold(v, w, budget);
    auto mass_above = [&](double M) {
      double m = 0;
      for (std::size_t i = 0; i < n; ++i) m += v[i] > M ? w[i] : 0.0;
      return m;
    };
    EXPECT_LE(mass_above(T), budget);
    for (double cand : v) {
      if (cand < T) {
        EXPECT_GT(mass_above(cand), budget);
      }
    }
  }
}

TEST(Subsequence, GeometricSelection) {
  auto s = DyadicSpace::uniform(4);
  const auto phistar = young::quadratic(1.0);
  // E[xi_n^2] = 1/n
  auto seq = RvSequence::generate(s, 64, [&](std::size_t n) { return RandomVariable::constant(s, 1.0 / std::sqrt(double(n))); });
  const auto c = order_bounded_subsequence(seq, phistar);
  ASSERT_TRUE(c.ok) << c.reason;
  for (std::size_t k = 0; k < c.indices.size(); ++k) EXPECT_EQ(c.indices[k] + 1, std::size_t{1} << (k + 1));
  EXPECT_TRUE(c.certified);
  EXPECT_LE(c.sup_modular, c.modular_sum);
  EXPECT_LE(c.modular_sum, 1.0);
}

TEST(Subsequence, NotNullInProbabilityIsPreconditionUnmet) {
  auto s = DyadicSpace::uniform(3);
  auto seq = RvSequence::generate(s, 32, [&](std::size_t) { return RandomVariable::constant(s, 3.0); });
  const auto c = order_bounded_subsequence(seq, young::quadratic(1.0));
  EXPECT_FALSE(c.ok);
  EXPECT_FALSE(c.reason.empty());
}

TEST(Subsequence, PairingTailBound) {
  auto s = DyadicSpace::uniform(12);
  const auto phistar = young::quadratic(1.0);
  std::mt19937_64 rng(8);
  SubsequenceOptions o;
  o.pairing_fixtures = {RandomVariable::constant(s, 1.0), RandomVariable(s, oracle::random_vector(rng, s->size(), -2, 2))};
  std::vector<RandomVariable> terms;
  for (int n = 1; n <= 12; ++n) {
    const double p = std::ldexp(1.0, -n);
    terms.push_back(RandomVariable::interval_indicator(s, p, 2 * p, std::ldexp(1.0, -n / 2)));
  }
  const auto c = order_bounded_subsequence(terms, phistar, o);
  ASSERT_TRUE(c.ok) << c.reason;
  EXPECT_TRUE(c.pairing_null);
}

TEST(Komlos, ConstantSequenceIsTrivial) {
  auto s = DyadicSpace::uniform(5);
  std::mt19937_64 rng(1);
  RandomVariable xi(s, oracle::random_vector(rng, s->size(), -1.5, 1.5));
  auto seq = RvSequence::generate(s, 16, [&](std::size_t) { return xi; });
  const auto c = komlos_extract(seq, young::quadratic(1.0), KomlosMode::cesaro);
  ASSERT_TRUE(c.complete) << c.failing_stage;
  EXPECT_TRUE(c.point_masses);
  EXPECT_EQ(c.limit, xi);
  EXPECT_EQ(c.order_bound, xi.abs());
  for (const auto& w : c.weights) EXPECT_EQ(w.index.size(), 1u);
  EXPECT_TRUE(c.forward_valid);
}

TEST(Komlos, NormalizedSpikes) {
  const auto seq = normalized_spikes(16);
  const auto c = komlos_extract(seq, young::quadratic(1.0), KomlosMode::cesaro);
  ASSERT_TRUE(c.complete) << c.failing_stage;
  EXPECT_TRUE(c.limit.is_zero());
  EXPECT_LE(c.order_bound_norm, std::sqrt(M_PI * M_PI / 6) + 1e-9);
  EXPECT_TRUE(c.singular_identity_exact);
  EXPECT_TRUE(c.decomposition_holds);
  EXPECT_TRUE(c.spike_bound_holds);
}

TEST(Komlos, MixedLimitAndBound) {
  const auto m = mixed(512, 11);
  const auto phistar = young::quadratic(1.0);
  const auto c = komlos_extract(m.seq, phistar, KomlosMode::cesaro);
  ASSERT_TRUE(c.complete) << c.failing_stage;
  for (std::size_t i = 0; i < m.b.size(); ++i) EXPECT_NEAR(c.limit[i], m.b[i], 1e-9);
  const double analytic = luxemburg_norm(m.b.abs() + m.zeta.abs() * 0.5, phistar).value + std::sqrt(M_PI * M_PI / 6);
  EXPECT_LE(c.order_bound_norm, analytic);
  EXPECT_TRUE(c.as_converged);
  EXPECT_NEAR(c.C_used, 1.0, 1e-9);
}

TEST(Komlos, ForwardModeWeights) {
  const auto m = mixed(128, 12);
  const auto c = komlos_extract(m.seq, young::quadratic(1.0), KomlosMode::forward_convex);
  ASSERT_TRUE(c.complete) << c.failing_stage;
  EXPECT_TRUE(c.forward_valid);
  for (std::size_t r = 0; r < c.weights.size(); ++r) EXPECT_GE(c.weights[r].first(), r);
  EXPECT_TRUE(c.spike_bound_holds);
}

TEST(Komlos, AlternatingSignsNeedBlocks) {
  auto s = DyadicSpace::uniform(4);
  std::mt19937_64 rng(2);
  RandomVariable z(s, oracle::random_vector(rng, s->size(), 0.5, 1.5));
  auto seq = RvSequence::generate(s, 32, [&](std::size_t n) { return n % 2 ? z : z * -1.0; });
  const auto c = komlos_extract(seq, young::quadratic(1.0), KomlosMode::cesaro);
  ASSERT_TRUE(c.complete) << c.failing_stage;
  EXPECT_EQ(c.block_length, 2u);
  EXPECT_TRUE(c.limit.is_zero());
}

TEST(Komlos, ShortPrefixNamesTheStage) {
  auto s = DyadicSpace::uniform(2);
  auto seq = RvSequence::generate(s, 3, [&](std::size_t n) { return RandomVariable::constant(s, double(n)); });
  const auto c = komlos_extract(seq, young::quadratic(1.0), KomlosMode::cesaro);
  EXPECT_FALSE(c.complete);
  EXPECT_EQ(c.failing_stage, "stabilize");
}

TEST(Obstruction, ExponentialKeepsItsFloor) {
  const auto rep = non_delta2_counterexample(young::exp_minus_one(), {8, 10, 12, 14});
  EXPECT_FALSE(rep.phi_is_delta2);
  EXPECT_TRUE(rep.found) << rep.verdict;
  for (const auto& lv : rep.levels) {
    EXPECT_GE(lv.eps, 0.5);
    EXPECT_LE(lv.zeta0_modular, 1.0);
    EXPECT_TRUE(lv.duality_floor_ok);
    EXPECT_TRUE(lv.l0_trend_ok);
  }
}

TEST(Obstruction, SquareDecaysLikeTheHandFormula) {
  const auto rep = non_delta2_counterexample(young::quadratic(1.0), {8, 10, 12, 14});
  EXPECT_TRUE(rep.phi_is_delta2);
  EXPECT_FALSE(rep.found);
  for (const auto& lv : rep.levels) EXPECT_NEAR(lv.eps, std::pow(2.0, 1.0 - lv.resolution / 4.0), 1e-6);
}
