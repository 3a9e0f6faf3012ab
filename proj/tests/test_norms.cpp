#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "orlicz/norms.hpp"

using namespace orlicz;

namespace {

std::vector<double> weights_of(const RandomVariable& x) { return {x.space()->weights().begin(), x.space()->weights().end()}; }
std::vector<double> values_of(const RandomVariable& x) { return {x.values().begin(), x.values().end()}; }

}  // namespace

TEST(Luxemburg, ZeroHasZeroNorm) {
  auto s = DyadicSpace::uniform(3);
  EXPECT_EQ(luxemburg_norm(RandomVariable::zero(s), young::power(3)).value, 0.0);
  EXPECT_EQ(dual_orlicz_norm(RandomVariable::zero(s), young::power(3)).value, 0.0);
}

TEST(Luxemburg, SquareGivesL2) {
  std::mt19937_64 rng(3);
  auto s = DyadicSpace::uniform(5);
  for (int t = 0; t < 30; ++t) {
    RandomVariable xi(s, oracle::random_vector(rng, s->size(), -4, 4));
    const double l2 = oracle::l2(values_of(xi), weights_of(xi));
    EXPECT_NEAR(luxemburg_norm(xi, young::quadratic(1.0)).value, l2, 1e-9 * l2);
  }
}

TEST(Luxemburg, CubicHandSolved) {
  auto s = DyadicSpace::uniform(1);
  RandomVariable xi(s, {1.0, 1.0});
  EXPECT_NEAR(luxemburg_norm(xi, young::power(3.0, 1.0 / 3.0)).value, std::pow(3.0, -1.0 / 3.0), 1e-12);
}

TEST(Luxemburg, MatchesBisectionOracle) {
  std::mt19937_64 rng(5);
  auto s = DyadicSpace::uniform(4);
  for (const auto& phi : {young::entropic(), young::exp_minus_one(), young::power(1.5), young::entropic_shifted()}) {
    RandomVariable xi(s, oracle::random_vector(rng, s->size(), -3, 3));
    const double ref = oracle::luxemburg(values_of(xi), weights_of(xi), [&](double x) { return phi(x); });
    EXPECT_NEAR(luxemburg_norm(xi, phi).value, ref, 1e-12 * ref) << phi.label();
  }
}

TEST(Luxemburg, ModularIdentityForDelta2) {
  std::mt19937_64 rng(9);
  auto s = DyadicSpace::uniform(4);
  for (const auto& phi : {young::power(1.5), young::power(3.0), young::entropic(), young::quadratic()}) {
    RandomVariable xi(s, oracle::random_vector(rng, s->size(), -3, 3));
    const double n = luxemburg_norm(xi, phi).value;
    EXPECT_NEAR(modular(xi / n, phi), 1.0, 1e-12) << phi.label();
  }
}

TEST(DualNorm, QuadraticIsL2) {
  std::mt19937_64 rng(13);
  auto s = DyadicSpace::uniform(4);
  for (int t = 0; t < 20; ++t) {
    RandomVariable xi(s, oracle::random_vector(rng, s->size(), -2, 2));
    const double l2 = oracle::l2(values_of(xi), weights_of(xi));
    // sup over E[eta^2] <= 1 is attained at eta = xi / ||xi||_2
    auto r = dual_orlicz_norm(xi, young::quadratic(1.0));
    EXPECT_NEAR(r.value, l2, 1e-9 * l2);
    ASSERT_TRUE(r.witness);
    const auto expect_eta = xi / l2;
    for (std::size_t i = 0; i < xi.size(); ++i) EXPECT_NEAR((*r.witness)[i], expect_eta[i], 1e-8);
  }
}

TEST(DualNorm, SolversAgreeAndSandwichHolds) {
  std::mt19937_64 rng(17);
  for (const auto& phi : {young::power(1.5), young::power(3.0), young::quadratic(), young::exp_compensated(),
                          young::entropic(), young::exp_minus_one()}) {
    const auto phistar = conjugate(phi);
    for (int k : {1, 3, 6}) {
      auto s = DyadicSpace::uniform(k);
      RandomVariable xi(s, oracle::random_vector(rng, s->size(), -3, 3));
      auto r = dual_orlicz_norm(xi, phi, phistar);
      EXPECT_LE(r.residual, 1e-6) << phi.label();
      const double lux = luxemburg_norm(xi, phistar).value;
      EXPECT_LE(lux, r.value * (1 + 1e-9)) << phi.label();
      EXPECT_LE(r.value, 2 * lux * (1 + 1e-9)) << phi.label();
    }
  }
}

TEST(DualNorm, PiecewiseNeedsTheSegmentStep) {
  const auto phi = young::piecewise_linear({{1.0, 0.5}, {2.0, 2.0}, {4.0, 8.0}, {8.0, 30.0}});
  auto s = DyadicSpace::uniform(2);
  RandomVariable xi(s, {1.0, 2.0, -0.5, 0.0});
  auto r = dual_orlicz_norm(xi, phi);
  EXPECT_NEAR(modular(*r.witness, phi), 1.0, 1e-9);
  EXPECT_NEAR(pairing(*r.witness, xi), r.value, 1e-12);
}

TEST(DualNorm, SingleAtomEdgeCase) {
  auto s = DyadicSpace::uniform(3);
  std::vector<double> v(8, 0.0);
  v[5] = 2.0;
  RandomVariable xi(s, v);
  for (const auto& phi : {young::power(3.0), young::exp_compensated()}) {
    auto r = dual_orlicz_norm(xi, phi);
    // one atom of mass 1/8: eta = Phi^{-1}(8) there
    EXPECT_NEAR(r.value, 2.0 * phi.inverse(8.0) / 8.0, 1e-9) << phi.label();
  }
}

TEST(DualNorm, NormAxioms) {
  std::mt19937_64 rng(23);
  auto s = DyadicSpace::uniform(4);
  const auto phi = young::power(3.0);
  const auto phistar = conjugate(phi);
  for (int t = 0; t < 10; ++t) {
    RandomVariable a(s, oracle::random_vector(rng, 16, -2, 2));
    RandomVariable b(s, oracle::random_vector(rng, 16, -2, 2));
    const double na = dual_orlicz_norm(a, phi, phistar).value;
    const double nb = dual_orlicz_norm(b, phi, phistar).value;
    EXPECT_NEAR(dual_orlicz_norm(a * -2.5, phi, phistar).value, 2.5 * na, 1e-8 * na);
    EXPECT_LE(dual_orlicz_norm(a + b, phi, phistar).value, (na + nb) * (1 + 1e-9));
    EXPECT_LE(luxemburg_norm(a + b, phi).value, (luxemburg_norm(a, phi).value + luxemburg_norm(b, phi).value) * (1 + 1e-12));
    EXPECT_GT(na, 0.0);
  }
}

TEST(DualNorm, MonotoneInAbsoluteValue) {
  std::mt19937_64 rng(29);
  auto s = DyadicSpace::uniform(3);
  const auto phi = young::entropic();
  for (int t = 0; t < 10; ++t) {
    RandomVariable a(s, oracle::random_vector(rng, 8, -2, 2));
    RandomVariable shrink(s, oracle::random_vector(rng, 8, 0, 1));
    RandomVariable b = hadamard(a, shrink);
    EXPECT_LE(dual_orlicz_norm(b, phi).value, dual_orlicz_norm(a, phi).value * (1 + 1e-9));
    EXPECT_LE(luxemburg_norm(b, phi).value, luxemburg_norm(a, phi).value * (1 + 1e-12));
  }
}

TEST(DualNorm, OrderIntervalInsideScaledBall) {
  std::mt19937_64 rng(31);
  auto s = DyadicSpace::uniform(3);
  const auto phistar = young::power(1.5);
  RandomVariable zeta(s, oracle::random_vector(rng, 8, 0, 3));
  const double nz = luxemburg_norm(zeta, phistar).value;
  for (int t = 0; t < 20; ++t) {
    RandomVariable u(s, oracle::random_vector(rng, 8, -1, 1));
    EXPECT_LE(luxemburg_norm(hadamard(u, zeta), phistar).value, nz * (1 + 1e-12));
  }
}

TEST(Holder, ZeroAndWitness) {
  auto s = DyadicSpace::uniform(2);
  RandomVariable xi(s, {1.0, -2.0, 0.5, 3.0});
  const auto phi = young::power(3.0);
  auto z = holder_check(RandomVariable::zero(s), xi, phi);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_EQ(z.rhs, 0.0);
  auto w = dual_orlicz_norm(xi, phi).witness;
  auto h = holder_check(*w, xi, phi);
  EXPECT_GE(h.slack, -1e-9);
  EXPECT_NEAR(h.slack, 0.0, 1e-8);
}

TEST(Holder, CauchySchwarzOnRandomPairs) {
  std::mt19937_64 rng(37);
  auto s = DyadicSpace::uniform(4);
  for (int t = 0; t < 30; ++t) {
    RandomVariable a(s, oracle::random_vector(rng, 16, -2, 2));
    RandomVariable b(s, oracle::random_vector(rng, 16, -2, 2));
    auto h = holder_check(a, b, young::quadratic(1.0));
    const double cs = oracle::l2(values_of(a), weights_of(a)) * oracle::l2(values_of(b), weights_of(b));
    EXPECT_NEAR(h.rhs, cs, 1e-8 * cs);
    EXPECT_GE(h.slack, -1e-9);
  }
}

TEST(TruncatedPsi, NormBoundedByModularPower) {
  const auto t = make_truncated_psi(young::quadratic(1.0), 1.0);
  auto s = DyadicSpace::uniform(1);
  RandomVariable eta(s, {1.0, 0.0});
  const double p = 2.5;
  const double n = luxemburg_norm(eta, t.psi).value;
  EXPECT_NEAR(n, std::sqrt(0.5), 1e-12);
  EXPECT_LE(n, std::pow(modular(eta, t.psi), 1.0 / p));
  std::mt19937_64 rng(41);
  auto s4 = DyadicSpace::uniform(4);
  for (int i = 0; i < 50; ++i) {
    RandomVariable x(s4, oracle::random_vector(rng, 16, -1, 1));
    const double nx = luxemburg_norm(x, t.psi).value;
    if (nx > 1.0) x = x / nx;
    EXPECT_LE(luxemburg_norm(x, t.psi).value, std::pow(modular(x, t.psi), 1.0 / p) * (1 + 1e-12));
  }
}
