#pragma once

// Scalar root bracketing and unimodal search used by the solvers.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace orlicz::numeric {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Largest x in [lo, hi] with pred(x) true, assuming pred is true on a prefix.
/// pred(lo) must hold. Stops when the bracket is relatively narrower than rel_tol.
template <class Pred>
double sup_where(Pred&& pred, double lo, double hi, double rel_tol = 1e-15, int max_iter = 400) {
  for (int it = 0; it < max_iter && hi - lo > rel_tol * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// Geometric bisection for a positive threshold: returns {lo, hi} with
/// below(lo) true and below(hi) false, hi/lo - 1 <= rel_tol.
template <class Pred>
std::pair<double, double> geometric_bracket(Pred&& below, double lo, double hi, double rel_tol = 1e-15,
                                            int max_iter = 400) {
  for (int it = 0; it < max_iter && hi / lo - 1.0 > rel_tol; ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (mid <= lo || mid >= hi) break;
    if (below(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

struct Extremum {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal f on [a, b].
template <class F>
Extremum golden_max(F&& f, double a, double b, double abs_tol = 0.0, int max_iter = 300) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter; ++it) {
    if (b - a <= abs_tol || !(c > a && d < b && c < d)) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
}

template <class F>
Extremum golden_min(F&& f, double a, double b, double abs_tol = 0.0, int max_iter = 300) {
  auto r = golden_max([&](double x) { return -f(x); }, a, b, abs_tol, max_iter);
  return {r.x, -r.value};
}

/// n points geometrically spaced on [lo, hi], both ends included.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = hi;
    return g;
  }
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  g.back() = hi;
  return g;
}

/// Ordinary least squares slope and intercept.
inline std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

}  // namespace orlicz::numeric
