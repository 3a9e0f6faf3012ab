#pragma once

// Independent brute-force reference computations used by the tests.
// Nothing here calls into the solvers being tested.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// sup_x (x y - phi(x)) by a dense uniform scan followed by two zoomed rescans.
inline double conjugate(const std::function<double(double)>& phi, double y, double x_hi, int n = 20000) {
  double lo = 0.0, hi = x_hi, best_x = 0.0, best = 0.0;
  for (int round = 0; round < 4; ++round) {
    const double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
      const double x = lo + h * i;
      const double v = x * y - phi(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    lo = std::max(0.0, best_x - 2 * h);
    hi = best_x + 2 * h;
  }
  return best;
}

/// Classical test: Phi(2x)/Phi(x) along x = 2^j; non-Delta2 when the ratio keeps growing.
struct DoublingVerdict {
  std::vector<double> ratios;
  bool delta2;
};

inline DoublingVerdict doubling_ratio(const std::function<double(double)>& phi, double x_top) {
  DoublingVerdict v;
  for (double x = 1.0; 2.0 * x <= x_top; x *= 2.0) {
    const double f = phi(x);
    if (f > 0.0) v.ratios.push_back(phi(2.0 * x) / f);
  }
  const std::size_t n = v.ratios.size();
  const double last = v.ratios[n - 1], prev = v.ratios[n - 2], prev2 = v.ratios[n - 3];
  v.delta2 = !(last > 2.0 * prev && prev > prev2);
  return v;
}

/// Luxemburg norm via plain bisection on the modular in lambda.
inline double luxemburg(const std::vector<double>& x, const std::vector<double>& w,
                        const std::function<double(double)>& phi) {
  double hi = 1.0;
  auto modular = [&](double lam) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * phi(x[i] / lam);
    return s;
  };
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0) return 0;
  hi = m;
  while (modular(hi) > 1) hi *= 2;
  double lo = hi / 2;
  while (modular(lo) <= 1 && lo > 1e-300) lo /= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (modular(mid) > 1 ? lo : hi) = mid;
  }
  return hi;
}

/// L2 norm under weights.
inline double l2(const std::vector<double>& x, const std::vector<double>& w) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * x[i];
  return std::sqrt(s);
}

/// Relative entropy sum q log(q/p).
inline double relative_entropy(const std::vector<double>& q, const std::vector<double>& p) {
  double s = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0) s += q[i] * std::log(q[i] / p[i]);
  }
  return s;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace oracle
