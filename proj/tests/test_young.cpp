#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "orlicz/young.hpp"

using namespace orlicz;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<YoungFunction> closed_families() {
  return {young::quadratic(), young::power(3.0, 1.0 / 3.0), young::power(1.5), young::exp_compensated(),
          young::entropic(), young::exp_minus_one(), young::entropic_shifted()};
}

}  // namespace

TEST(Young, FamiliesSatisfyInvariants) {
  for (const auto& phi : closed_families()) {
    EXPECT_NO_THROW(validate_young(phi, default_grid(phi))) << phi.label();
    EXPECT_EQ(phi(0.0), 0.0);
    EXPECT_DOUBLE_EQ(phi(1.7), phi(-1.7));
  }
}

TEST(Young, SmallArgumentSeriesKeepsRelativeAccuracy) {
  const auto e = young::exp_compensated();
  EXPECT_NEAR(e(1e-5) / 5e-11, 1.0, 1e-5);
  const auto h = young::entropic();
  EXPECT_NEAR(h(1e-5) / 5e-11, 1.0, 1e-5);
  EXPECT_NEAR(e(1e-3 * 0.999), std::exp(0.000999) - 1.000999, 1e-15);
}

TEST(Young, QuadraticIsSelfConjugate) {
  const auto phi = young::quadratic();
  const auto c = numeric_conjugate(phi);
  for (double y : {0.0, 0.1, 1.0, 3.5, 20.0}) EXPECT_NEAR(c(y), y * y / 2, 1e-9 * (1 + y * y));
  EXPECT_EQ(phi.closed_form_conjugate()->params()[0], 0.5);
}

TEST(Young, CubicConjugateMatchesBruteForce) {
  const auto phi = young::power(3.0, 1.0 / 3.0);
  const auto c = numeric_conjugate(phi);
  for (double y = 0.0; y <= 20.0; y += 0.5) {
    const double truth = std::pow(y, 1.5) / 1.5;
    EXPECT_LE(rel_err(c(y), truth), 1e-6) << y;
    EXPECT_LE(rel_err(oracle::conjugate([&](double x) { return phi(x); }, y, 30.0), truth), 1e-6) << y;
  }
}

TEST(Young, ExponentialConjugateIsEntropic) {
  const auto phi = young::exp_compensated();
  const auto c = numeric_conjugate(phi);
  for (double y = 0.0; y <= 20.0; y += 0.25) {
    const double truth = (1 + y) * std::log1p(y) - y;
    EXPECT_LE(rel_err(c(y), truth), 1e-6) << y;
    EXPECT_LE(rel_err(oracle::conjugate([&](double x) { return phi(x); }, y, 5.0), truth), 1e-6) << y;
  }
}

TEST(Young, ConjugateOfExpMinusOneVanishesBelowOne) {
  const auto c = numeric_conjugate(young::exp_minus_one());
  EXPECT_NEAR(c(0.5), 0.0, 1e-12);
  EXPECT_NEAR(c(1.0), 0.0, 1e-12);
  EXPECT_NEAR(c(5.0), 5 * std::log(5.0) - 5 + 1, 1e-9);
}

TEST(Young, YoungInequalityOnGrid) {
  for (const auto& phi : closed_families()) {
    const auto c = conjugate(phi);
    for (double x = 0.0; x <= 6.0; x += 0.37) {
      for (double y = 0.0; y <= 6.0; y += 0.41) {
        EXPECT_LE(x * y, phi(x) + c(y) + 1e-9 * (1 + x * y)) << phi.label();
      }
      const double y = phi.derivative(x);
      EXPECT_NEAR(x * y, phi(x) + c(y), 1e-8 * (1 + x * y)) << phi.label() << " x=" << x;
    }
  }
}

TEST(Young, BiconjugationRecoversClosedForms) {
  for (const auto& phi : {young::quadratic(), young::power(3.0, 1.0 / 3.0), young::exp_compensated()}) {
    const auto inner = numeric_conjugate(phi, default_grid(phi, 1024));
    const auto outer = numeric_conjugate(inner, default_grid(inner, 1024));
    for (double x = 0.0; x <= 20.0; x += 1.0) EXPECT_LE(rel_err(outer(x), phi(x)), 2e-6) << phi.label() << x;
  }
}

TEST(Young, NonConvexInputRejected) {
  YoungFunction::Parts parts;
  parts.eval = [](double x) { return std::sqrt(std::abs(x)); };
  parts.derivative = [](double x) { return x > 0 ? 0.5 / std::sqrt(x) : 0.0; };
  parts.x_max = 10;
  try {
    numeric_conjugate(YoungFunction(parts));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invariant_violation);
  }
}

TEST(Young, OddInputRejected) {
  YoungFunction::Parts parts;
  parts.eval = [](double x) { return x > 0 ? x * x : 2 * x * x; };
  parts.derivative = [](double x) { return 2 * x; };
  parts.x_max = 10;
  EXPECT_THROW(numeric_conjugate(YoungFunction(parts)), Error);
}

TEST(Young, CoarseGridIsAResolutionError) {
  const auto phi = young::quadratic();
  try {
    numeric_conjugate(phi, {0.0, 1.0, 2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resolution);
  }
}

TEST(Young, PiecewiseUsesLeftSlopeAtKinks) {
  const auto phi = young::piecewise_linear({{1.0, 0.5}, {2.0, 2.0}, {3.0, 5.0}});
  EXPECT_DOUBLE_EQ(phi(1.5), 1.25);
  EXPECT_DOUBLE_EQ(phi.derivative(1.0), 0.5);
  EXPECT_DOUBLE_EQ(phi.derivative(1.0 + 1e-12), 1.5);
  EXPECT_DOUBLE_EQ(phi(4.0), 8.0);
  const auto c = numeric_conjugate(phi);
  EXPECT_NEAR(c(1.0), 1.0 * 1.0 - 0.5, 1e-12);
  EXPECT_NEAR(c(2.0), 2.0 * 2.0 - 2.0, 1e-12);
}

TEST(Young, InverseFunctions) {
  const auto phi = young::power(3.0);
  EXPECT_NEAR(phi.inverse(8.0), 2.0, 1e-12);
  const auto e = young::exp_minus_one();
  EXPECT_NEAR(e.inverse(std::exp(2.0) - 1), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(e.derivative_inverse(0.5), 0.0);
}

TEST(Delta2, PowerIndexIsExact) {
  for (double p : {1.5, 2.0, 3.0, 4.5}) {
    const auto rep = delta2_index(young::power(p));
    EXPECT_TRUE(rep.is_delta2);
    EXPECT_NEAR(rep.p_phi, p, 1e-6);
    EXPECT_NEAR(rep.q_phi, p / (p - 1), 1e-6);
  }
  const auto q = delta2_index(young::quadratic());
  EXPECT_NEAR(q.p_phi, 2.0, 1e-12);
  EXPECT_NEAR(q.q_phi, 2.0, 1e-12);
}

TEST(Delta2, ExponentialFamiliesDiverge) {
  for (const auto& phi : {young::exp_minus_one(), young::exp_compensated()}) {
    const auto rep = delta2_index(phi);
    EXPECT_FALSE(rep.is_delta2);
    EXPECT_TRUE(std::isinf(rep.p_phi));
    EXPECT_EQ(rep.q_phi, 1.0);
    EXPECT_LT(rep.cutoff_sequence[0], rep.cutoff_sequence[1]);
    EXPECT_LT(rep.cutoff_sequence[1], rep.cutoff_sequence[2]);
  }
}

TEST(Delta2, ProfileIsNonincreasingAndMinimal) {
  for (const auto& phi : {young::entropic(), young::entropic_shifted(), young::power(2.5)}) {
    const auto rep = delta2_index(phi);
    ASSERT_FALSE(rep.p_phi_of_x.empty());
    double prev = numeric::kInf, mn = numeric::kInf;
    for (auto [x, p] : rep.p_phi_of_x) {
      EXPECT_LE(p, prev + 1e-12);
      prev = p;
      mn = std::min(mn, p);
    }
    EXPECT_TRUE(rep.is_delta2) << phi.label();
    EXPECT_DOUBLE_EQ(rep.p_phi, mn);
  }
}

TEST(Delta2, ScanStartsAboveZeroSet) {
  const auto rep = delta2_index(young::entropic_shifted());
  EXPECT_GT(rep.scan_start, 1.0);
  try {
    delta2_index(young::entropic_shifted(), {0.5}, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(Delta2, AgreesWithDoublingOracle) {
  for (const auto& phi : closed_families()) {
    const auto rep = delta2_index(phi);
    const auto ref = oracle::doubling_ratio([&](double x) { return phi(x); }, phi.x_max());
    EXPECT_EQ(rep.is_delta2, ref.delta2) << phi.label();
  }
}

TEST(TruncatedPsi, Construction) {
  const auto t = make_truncated_psi(young::quadratic(1.0), 1.0);
  EXPECT_DOUBLE_EQ(t(0.5), 0.5);
  EXPECT_DOUBLE_EQ(t(2.0), 4.0);
  EXPECT_NEAR(t.growth_index, 2.0, 1e-9);
  EXPECT_GT(t(1e-9), 0.0);
}

TEST(TruncatedPsi, PowerGrowthBound) {
  const auto t = make_truncated_psi(young::quadratic(1.0), 1.0);
  std::vector<double> xs;
  for (double x = 0.01; x < 10; x *= 1.1) xs.push_back(x);
  EXPECT_GE(t.power_growth_slack(2.5, xs, {1.0, 2.0, 4.0}), -1e-12);
}

TEST(TruncatedPsi, RejectsNonDelta2) {
  try {
    make_truncated_psi(young::exp_minus_one(), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_applicable);
  }
}
