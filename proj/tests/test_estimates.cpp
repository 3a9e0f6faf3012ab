#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "orlicz/estimates.hpp"

using namespace orlicz;

namespace {

// N members on resolution 10, member k carried by atoms [4k, 4k+4) with unit L2 norm.
DisjointFamily unit_l2_family(std::size_t n) {
  auto s = DyadicSpace::uniform(10);
  std::vector<RandomVariable> m;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v(s->size(), 0.0);
    for (std::size_t a = 4 * k; a < 4 * k + 4; ++a) v[a] = 16.0;
    m.emplace_back(s, std::move(v));
  }
  return DisjointFamily(std::move(m));
}

DisjointFamily random_family(std::mt19937_64& rng, std::size_t n) {
  auto s = DyadicSpace::uniform(10);
  std::uniform_real_distribution<double> val(-5, 5);
  std::uniform_int_distribution<int> width(1, 4);
  std::vector<RandomVariable> m;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v(s->size(), 0.0);
    const int w = width(rng);
    for (int a = 0; a < w; ++a) v[4 * k + static_cast<std::size_t>(a)] = val(rng);
    m.emplace_back(s, std::move(v));
  }
  return DisjointFamily(std::move(m));
}

}  // namespace

TEST(DisjointFamily, OverlapIsAnInvariantError) {
  auto s = DyadicSpace::uniform(2);
  try {
    DisjointFamily({RandomVariable(s, {1, 1, 0, 0}), RandomVariable(s, {0, 1, 1, 0})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invariant_violation);
  }
}

TEST(QEstimate, SingleTermIsTight) {
  auto fam = unit_l2_family(1);
  auto r = verify_upper_q_estimate(fam, young::power(3.0), 1.2);
  EXPECT_NEAR(r.lhs, r.rhs_sum, 1e-12 * r.lhs);
  EXPECT_NEAR(r.empirical_C, 1.0, 1e-12);
}

TEST(QEstimate, PythagorasForSquares) {
  for (std::size_t n : {4u, 16u, 64u, 256u}) {
    auto r = verify_upper_q_estimate(unit_l2_family(n), young::quadratic(1.0), 2.0);
    EXPECT_NEAR(r.lhs, std::sqrt(static_cast<double>(n)), 1e-8);
    EXPECT_NEAR(r.rhs_sum, std::sqrt(static_cast<double>(n)), 1e-8);
    EXPECT_NEAR(r.empirical_C, 1.0, 1e-9);
    EXPECT_NEAR(r.certifying_p, 2.0, 1e-12);
  }
}

TEST(QEstimate, TriangleInequalityForQOne) {
  std::mt19937_64 rng(1);
  for (const auto& phi : {young::power(1.5), young::entropic(), young::quadratic()}) {
    auto r = verify_upper_q_estimate(random_family(rng, 20), phi, 1.0);
    EXPECT_LE(r.empirical_C, 1.0 + 1e-9) << phi.label();
  }
}

TEST(QEstimate, RejectsHypothesisViolations) {
  auto fam = unit_l2_family(4);
  try {
    verify_upper_q_estimate(fam, young::quadratic(), 2.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::hypothesis);
  }
  try {
    verify_upper_q_estimate(fam, young::exp_minus_one(), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::hypothesis);
  }
}

TEST(QEstimate, BatteryConstantIsStable) {
  std::mt19937_64 rng(2);
  for (const auto& phi : {young::quadratic(), young::power(1.5), young::power(3.0)}) {
    const auto rep = delta2_index(phi);
    QEstimateOptions o;
    o.delta2 = rep;
    double c4 = 0, c256 = 0;
    for (int t = 0; t < 4; ++t) {
      auto fam = random_family(rng, 256);
      const std::size_t ns[] = {4, 256};
      auto rows = q_estimate_trace(fam, phi, rep.q_phi, ns, o);
      c4 = std::max(c4, rows[0].ratio);
      c256 = std::max(c256, rows[1].ratio);
    }
    EXPECT_NEAR(c256 / c4, 1.0, 0.05) << phi.label();
  }
}

TEST(Cesaro, UnitL2DecayAndIdentity) {
  auto fam = unit_l2_family(128);
  auto r = cesaro_disjoint_bounds(fam, young::quadratic(1.0), 2.0);
  EXPECT_TRUE(r.identity_exact);
  EXPECT_NEAR(r.fitted_exponent, -0.5, 0.02);
  for (std::size_t n = 1; n <= 128; ++n) EXPECT_NEAR(r.mean_norms[n - 1], 1.0 / std::sqrt(double(n)), 1e-9);
  EXPECT_TRUE(r.bound_holds);
}

TEST(Cesaro, IdentityExactOnRandomFamilies) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 5; ++t) {
    auto r = cesaro_disjoint_bounds(random_family(rng, 64), young::power(3.0), 1.5);
    EXPECT_TRUE(r.identity_exact);
    EXPECT_TRUE(r.bound_holds);
  }
}

TEST(Cesaro, SingleMember) {
  auto fam = unit_l2_family(1);
  auto r = cesaro_disjoint_bounds(fam, young::quadratic(1.0), 2.0);
  EXPECT_EQ(r.sup_direct, fam[0].abs());
}

TEST(ForwardShift, FirstBlockAndIdentity) {
  std::mt19937_64 rng(4);
  auto fam = random_family(rng, 64);
  auto fs = forward_convex_shift(fam);
  EXPECT_EQ(fs.blocks[0], fam[1]);
  RandomVariable running = RandomVariable::zero(fam.space());
  std::vector<RandomVariable> means;
  for (std::size_t n = 1; n <= 64; ++n) {
    running += fam[n - 1];
    means.push_back(running / static_cast<double>(n));
  }
  for (std::size_t n = 1; n <= 32; ++n) {
    EXPECT_EQ(fs.blocks[n - 1], means[2 * n - 1] * 2.0 - means[n - 1]) << n;
    EXPECT_TRUE(fs.rows[n - 1].valid_forward(n));
  }
}

TEST(ForwardShift, UnitL2Decay) {
  auto fs = forward_convex_shift(unit_l2_family(64));
  for (std::size_t n = 1; n <= 32; ++n) {
    EXPECT_NEAR(luxemburg_norm(fs.blocks[n - 1], young::quadratic(1.0)).value, 1.0 / std::sqrt(double(n)), 1e-12);
  }
  EXPECT_THROW(forward_convex_shift(unit_l2_family(1)), Error);
}

TEST(WeakNullity, DisjointSpikesPairToZero) {
  auto s = DyadicSpace::uniform(16);
  std::vector<RandomVariable> tests{RandomVariable::constant(s, 1.0),
                                    RandomVariable(s, [&] {
                                      std::vector<double> v(s->size());
                                      for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(double(i + 1) / v.size());
                                      return v;
                                    }())};
  for (const auto& eta : tests) {
    double prev = numeric::kInf;
    for (int n = 1; n <= 14; ++n) {
      const double p = std::ldexp(1.0, -n);
      auto xi = RandomVariable::interval_indicator(s, p, 2 * p, 1.0 / std::sqrt(p));
      const double v = std::abs(pairing(eta, xi));
      EXPECT_LE(v, prev);
      EXPECT_LE(v, eta.sup_abs() * std::sqrt(p) + 1e-15);  // tail bound
      prev = v;
    }
  }
}

TEST(NormEquivalence, TruncatedPsiSandwich) {
  std::mt19937_64 rng(5);
  const auto phi = young::quadratic(1.0);
  const auto t = make_truncated_psi(phi, 1.0);
  const auto phistar = conjugate(phi);
  const auto psistar = conjugate(t.psi);
  double lo = numeric::kInf, hi = 0;
  for (int i = 0; i < 40; ++i) {
    auto s = DyadicSpace::uniform(3 + i % 4);
    RandomVariable xi(s, oracle::random_vector(rng, s->size(), -4, 4));
    const double r = dual_orlicz_norm(xi, phi, phistar).value / dual_orlicz_norm(xi, t.psi, psistar).value;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_GT(lo, 0.2);
  EXPECT_LT(hi, 5.0);
}
