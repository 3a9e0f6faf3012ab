#pragma once

// Young functions: even convex Phi with Phi(0) = 0 and Phi(x)/x -> infinity.
//
// A YoungFunction is an immutable value wrapping the evaluation, the left
// derivative on [0, inf) and, when known in closed form, the generalized
// inverse of the derivative. Closed-form families know their conjugates;
// anything else gets a numerically evaluated Legendre transform.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

enum class YoungKind {
  power,             // c |x|^p
  quadratic,         // a x^2
  entropic,          // (1+|x|) log(1+|x|) - |x|
  exp_compensated,   // e^|x| - |x| - 1
  exp_minus_one,     // e^|x| - 1
  entropic_shifted,  // |x| log|x| - |x| + 1 for |x| >= 1, else 0
  truncated,         // linear on [0, x0], Phi beyond
  numeric_conjugate,
  custom_piecewise,
  custom,
};

inline std::string to_string(YoungKind k) {
  switch (k) {
    case YoungKind::power: return "power";
    case YoungKind::quadratic: return "quadratic";
    case YoungKind::entropic: return "entropic";
    case YoungKind::exp_compensated: return "exp_compensated";
    case YoungKind::exp_minus_one: return "exp_minus_one";
    case YoungKind::entropic_shifted: return "entropic_shifted";
    case YoungKind::truncated: return "truncated";
    case YoungKind::numeric_conjugate: return "numeric_conjugate";
    case YoungKind::custom_piecewise: return "custom_piecewise";
    case YoungKind::custom: return "custom";
  }
  return "unknown";
}

class YoungFunction {
 public:
  using Scalar = std::function<double(double)>;

  struct Parts {
    YoungKind kind = YoungKind::custom;
    std::string label;
    Scalar eval;        // on all reals
    Scalar derivative;  // left derivative on [0, inf); value at 0 is the right limit convention 0
    double x_max = 1e4;
    std::vector<double> params;
    Scalar derivative_inverse;  // optional: sup{x >= 0 : Phi'(x) <= v}
    std::vector<double> kinks;
  };

  explicit YoungFunction(Parts parts) : impl_(std::make_shared<const Parts>(std::move(parts))) {
    if (!impl_->eval || !impl_->derivative) fail(ErrorKind::input, "Young function needs eval and derivative");
    if (!(impl_->x_max > 0.0)) fail(ErrorKind::input, "Young function needs a positive x_max");
  }

  double operator()(double x) const { return impl_->eval(x); }

  /// Left derivative, extended as an odd function.
  [[nodiscard]] double derivative(double x) const {
    return x >= 0.0 ? impl_->derivative(x) : -impl_->derivative(-x);
  }

  /// sup{x >= 0 : Phi'(x) <= v} for v >= 0.
  [[nodiscard]] double derivative_inverse(double v) const {
    if (impl_->derivative_inverse) return impl_->derivative_inverse(v);
    const auto& d = impl_->derivative;
    double hi = impl_->x_max;
    for (int i = 0; i < 200 && d(hi) <= v; ++i) hi *= 2.0;
    if (d(hi) <= v) return hi;
    if (d(0.0) > v) return 0.0;
    return numeric::sup_where([&](double x) { return d(x) <= v; }, 0.0, hi);
  }

  /// sup{x >= 0 : Phi(x) <= v}.
  [[nodiscard]] double inverse(double v) const {
    double hi = std::max(1.0, impl_->x_max);
    for (int i = 0; i < 200 && impl_->eval(hi) <= v; ++i) hi *= 2.0;
    return numeric::sup_where([&](double x) { return impl_->eval(x) <= v; }, 0.0, hi);
  }

  [[nodiscard]] YoungKind kind() const noexcept { return impl_->kind; }
  [[nodiscard]] const std::string& label() const noexcept { return impl_->label; }
  [[nodiscard]] double x_max() const noexcept { return impl_->x_max; }
  [[nodiscard]] const std::vector<double>& params() const noexcept { return impl_->params; }
  [[nodiscard]] const std::vector<double>& kinks() const noexcept { return impl_->kinks; }
  [[nodiscard]] bool has_closed_form_derivative_inverse() const noexcept {
    return static_cast<bool>(impl_->derivative_inverse);
  }

  [[nodiscard]] std::optional<YoungFunction> closed_form_conjugate() const;

 private:
  std::shared_ptr<const Parts> impl_;
};

namespace young {

namespace detail {

// e^x - x - 1 without cancellation near 0.
inline double exp_compensated(double x) {
  if (x < 1e-3) return x * x * (0.5 + x * (1.0 / 6 + x * (1.0 / 24 + x / 120)));
  return std::expm1(x) - x;
}

// (1+x) log(1+x) - x without cancellation near 0.
inline double entropic(double x) {
  if (x < 1e-3) return x * x * (0.5 - x * (1.0 / 6 - x * (1.0 / 12 - x / 20)));
  return (1.0 + x) * std::log1p(x) - x;
}

}  // namespace detail

/// c |x|^p, p > 1, c > 0.
inline YoungFunction power(double p, double c = 1.0, double x_max = 1e4) {
  if (!(p > 1.0) || !(c > 0.0)) fail(ErrorKind::input, "power Young function needs p > 1 and c > 0");
  YoungFunction::Parts parts;
  parts.kind = YoungKind::power;
  parts.label = "power(p=" + orlicz::detail::fmt(p) + ",c=" + orlicz::detail::fmt(c) + ")";
  parts.eval = [p, c](double x) { return c * std::pow(std::abs(x), p); };
  parts.derivative = [p, c](double x) { return c * p * std::pow(x, p - 1.0); };
  parts.derivative_inverse = [p, c](double v) { return std::pow(std::max(v, 0.0) / (c * p), 1.0 / (p - 1.0)); };
  parts.x_max = x_max;
  parts.params = {p, c};
  return YoungFunction(std::move(parts));
}

/// a x^2; a = 1/2 is self-conjugate.
inline YoungFunction quadratic(double a = 0.5, double x_max = 1e4) {
  if (!(a > 0.0)) fail(ErrorKind::input, "quadratic Young function needs a > 0");
  YoungFunction::Parts parts;
  parts.kind = YoungKind::quadratic;
  parts.label = "quadratic(a=" + orlicz::detail::fmt(a) + ")";
  parts.eval = [a](double x) { return a * x * x; };
  parts.derivative = [a](double x) { return 2.0 * a * x; };
  parts.derivative_inverse = [a](double v) { return std::max(v, 0.0) / (2.0 * a); };
  parts.x_max = x_max;
  parts.params = {a};
  return YoungFunction(std::move(parts));
}

inline YoungFunction entropic(double x_max = 1e12) {
  YoungFunction::Parts parts;
  parts.kind = YoungKind::entropic;
  parts.label = "entropic";
  parts.eval = [](double x) { return detail::entropic(std::abs(x)); };
  parts.derivative = [](double x) { return std::log1p(x); };
  parts.derivative_inverse = [](double v) { return std::expm1(std::max(v, 0.0)); };
  parts.x_max = x_max;
  return YoungFunction(std::move(parts));
}

inline YoungFunction exp_compensated(double x_max = 40.0) {
  YoungFunction::Parts parts;
  parts.kind = YoungKind::exp_compensated;
  parts.label = "exp_compensated";
  parts.eval = [](double x) { return detail::exp_compensated(std::abs(x)); };
  parts.derivative = [](double x) { return std::expm1(x); };
  parts.derivative_inverse = [](double v) { return std::log1p(std::max(v, 0.0)); };
  parts.x_max = x_max;
  return YoungFunction(std::move(parts));
}

inline YoungFunction exp_minus_one(double x_max = 40.0) {
  YoungFunction::Parts parts;
  parts.kind = YoungKind::exp_minus_one;
  parts.label = "exp_minus_one";
  parts.eval = [](double x) { return std::expm1(std::abs(x)); };
  parts.derivative = [](double x) { return x > 0.0 ? std::exp(x) : 0.0; };
  parts.derivative_inverse = [](double v) { return v >= 1.0 ? std::log(v) : 0.0; };
  parts.x_max = x_max;
  parts.kinks = {0.0};
  return YoungFunction(std::move(parts));
}

inline YoungFunction entropic_shifted(double x_max = 1e12) {
  YoungFunction::Parts parts;
  parts.kind = YoungKind::entropic_shifted;
  parts.label = "entropic_shifted";
  parts.eval = [](double x) {
    const double a = std::abs(x);
    return a > 1.0 ? a * std::log(a) - a + 1.0 : 0.0;
  };
  parts.derivative = [](double x) { return x > 1.0 ? std::log(x) : 0.0; };
  parts.derivative_inverse = [](double v) { return v > 0.0 ? std::exp(v) : 1.0; };
  parts.x_max = x_max;
  parts.kinks = {1.0};
  return YoungFunction(std::move(parts));
}

/// Piecewise-linear Phi through (0,0) and the given breakpoints (x_i, Phi(x_i)),
/// extrapolated linearly beyond the last one. Phi' at a kink is the left slope.
inline YoungFunction piecewise_linear(std::vector<std::pair<double, double>> breakpoints) {
  if (breakpoints.empty()) fail(ErrorKind::input, "piecewise Young function needs breakpoints");
  std::sort(breakpoints.begin(), breakpoints.end());
  if (breakpoints.front().first != 0.0) breakpoints.insert(breakpoints.begin(), {0.0, 0.0});
  if (breakpoints.front().second != 0.0) fail(ErrorKind::invariant_violation, "piecewise Young function needs Phi(0) = 0");
  if (breakpoints.size() < 2) fail(ErrorKind::input, "piecewise Young function needs a positive breakpoint");
  std::vector<double> xs, ys, slopes;
  for (auto [x, y] : breakpoints) {
    xs.push_back(x);
    ys.push_back(y);
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) fail(ErrorKind::input, "piecewise breakpoints must be distinct");
    slopes.push_back((ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]));
  }
  auto locate = [xs](double x) {
    auto it = std::lower_bound(xs.begin() + 1, xs.end(), x);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - xs.begin(), static_cast<std::ptrdiff_t>(xs.size()) - 1));
  };
  YoungFunction::Parts parts;
  parts.kind = YoungKind::custom_piecewise;
  parts.label = "piecewise(" + std::to_string(slopes.size()) + " pieces)";
  parts.eval = [xs, ys, slopes, locate](double x) {
    const double a = std::abs(x);
    const std::size_t i = locate(a);  // segment [xs[i-1], xs[i]]
    return ys[i - 1] + slopes[i - 1] * (a - xs[i - 1]);
  };
  parts.derivative = [xs, slopes, locate](double x) {
    if (x <= 0.0) return 0.0;
    return slopes[locate(x) - 1];
  };
  parts.x_max = xs.back();
  parts.kinks.assign(xs.begin(), xs.end());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    parts.params.push_back(xs[i]);
    parts.params.push_back(ys[i]);
  }
  return YoungFunction(std::move(parts));
}

}  // namespace young

inline std::optional<YoungFunction> YoungFunction::closed_form_conjugate() const {
  switch (impl_->kind) {
    case YoungKind::power: {
      const double p = impl_->params[0];
      const double c = impl_->params[1];
      const double q = p / (p - 1.0);
      const double cstar = (1.0 - 1.0 / p) * std::pow(c * p, -1.0 / (p - 1.0));
      return young::power(q, cstar);
    }
    case YoungKind::quadratic: return young::quadratic(1.0 / (4.0 * impl_->params[0]));
    case YoungKind::entropic: return young::exp_compensated();
    case YoungKind::exp_compensated: return young::entropic();
    case YoungKind::exp_minus_one: return young::entropic_shifted();
    case YoungKind::entropic_shifted: return young::exp_minus_one();
    default: return std::nullopt;
  }
}

struct ConjugateOptions {
  bool allow_closed_form = true;
  double tolerance = 1e-6;
  std::size_t grid_points = 4096;
};

/// {0} plus a log-spaced grid on (0, x_max] plus the kinks of phi.
inline std::vector<double> default_grid(const YoungFunction& phi, std::size_t points = 4096) {
  const double hi = phi.x_max();
  const double lo = std::min(1e-8, hi * 1e-12);
  std::vector<double> g = numeric::log_grid(lo, hi, points);
  g.insert(g.begin(), 0.0);
  for (double k : phi.kinks()) {
    if (k > 0.0 && k <= hi) g.push_back(k);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

/// Checks Phi(0) = 0, evenness, convexity and monotone Phi' on the grid.
inline void validate_young(const YoungFunction& phi, const std::vector<double>& grid, double rel_tol = 1e-9) {
  if (grid.size() < 8 || grid.front() != 0.0) {
    fail(ErrorKind::resolution, "grid must start at 0 and have at least 8 points");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) fail(ErrorKind::resolution, "grid must be strictly increasing");
  }
  if (std::abs(phi(0.0)) > 1e-12) fail(ErrorKind::invariant_violation, phi.label() + ": Phi(0) != 0");
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v[i] = phi(grid[i]);
    const double m = phi(-grid[i]);
    if (!(v[i] >= 0.0)) fail(ErrorKind::invariant_violation, phi.label() + ": Phi must be nonnegative");
    if (std::abs(v[i] - m) > rel_tol * (1.0 + std::abs(v[i]))) {
      fail(ErrorKind::invariant_violation, phi.label() + ": Phi is not even at x=" + detail::fmt(grid[i]));
    }
  }
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double x = grid[i - 1], y = grid[i], z = grid[i + 1];
    if (!std::isfinite(v[i + 1])) break;
    const double chord = ((z - y) * v[i - 1] + (y - x) * v[i + 1]) / (z - x);
    if (v[i] > chord + rel_tol * (1.0 + std::abs(chord))) {
      fail(ErrorKind::invariant_violation, phi.label() + ": Phi is not convex near x=" + detail::fmt(y));
    }
  }
  double prev = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double d = phi.derivative(grid[i]);
    if (!std::isfinite(d)) break;
    if (d < prev - rel_tol * (1.0 + std::abs(prev))) {
      fail(ErrorKind::invariant_violation, phi.label() + ": Phi' is not nondecreasing");
    }
    prev = d;
  }
}

namespace detail {

// Evaluates sup_x (x y - Phi(x)) by grid argmax plus golden-section refinement.
class ConjugateSolver {
 public:
  ConjugateSolver(YoungFunction phi, std::vector<double> grid) : phi_(std::move(phi)), grid_(std::move(grid)) {
    values_.reserve(grid_.size());
    for (double x : grid_) values_.push_back(phi_(x));
  }

  struct Solution {
    double value;
    double argmax;
  };

  [[nodiscard]] Solution solve(double y) const {
    y = std::abs(y);
    if (y == 0.0) return {0.0, 0.0};
    auto g = [&](std::size_t i) { return grid_[i] * y - values_[i]; };
    std::size_t lo = 0, hi = grid_.size() - 1;
    while (hi - lo > 2) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (g(mid) < g(mid + 1)) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    std::size_t best = lo;
    for (std::size_t i = lo; i <= hi; ++i) {
      if (g(i) > g(best)) best = i;
    }
    const std::size_t last = grid_.size() - 1;
    if (best == last || (best + 1 == last && g(last) >= g(best))) {
      fail(ErrorKind::resolution, "conjugate of " + phi_.label() + " at y=" + fmt(y) + " is not certified by the grid");
    }
    const double a = best == 0 ? 0.0 : grid_[best - 1];
    const double b = grid_[best + 1];
    // Three nested golden-section rounds, each restarted on the bracket found by the previous one.
    double left = a, right = b;
    numeric::Extremum ext{grid_[best], g(best)};
    for (int round = 0; round < 3; ++round) {
      auto r = numeric::golden_max([&](double x) { return x * y - phi_(x); }, left, right, 0.0, 120);
      if (r.value > ext.value) ext = r;
      const double w = (right - left) * 1e-3;
      left = std::max(a, ext.x - w);
      right = std::min(b, ext.x + w);
      if (!(right > left)) break;
    }
    return {std::max(ext.value, 0.0), ext.x};
  }

  [[nodiscard]] const YoungFunction& base() const { return phi_; }
  [[nodiscard]] const std::vector<double>& grid() const { return grid_; }

 private:
  YoungFunction phi_;
  std::vector<double> grid_;
  std::vector<double> values_;
};

}  // namespace detail

/// Numerically evaluated conjugate Phi*(y) = sup_x (x y - Phi(x)) over the grid.
inline YoungFunction numeric_conjugate(const YoungFunction& phi, std::vector<double> grid) {
  validate_young(phi, grid);
  auto solver = std::make_shared<const detail::ConjugateSolver>(phi, std::move(grid));
  const auto& g = solver->grid();
  const double certified = phi.derivative(g[g.size() - 2]);
  YoungFunction::Parts parts;
  parts.kind = YoungKind::numeric_conjugate;
  parts.label = "conjugate(" + phi.label() + ")";
  parts.eval = [solver](double y) { return solver->solve(y).value; };
  parts.derivative = [solver](double y) { return solver->solve(y).argmax; };
  parts.derivative_inverse = [phi](double v) { return phi.derivative(std::max(v, 0.0)); };
  parts.x_max = std::isfinite(certified) && certified > 0.0 ? certified : 1.0;
  return YoungFunction(std::move(parts));
}

inline YoungFunction numeric_conjugate(const YoungFunction& phi) {
  return numeric_conjugate(phi, default_grid(phi));
}

/// Phi*, short-circuiting the closed-form registry when allowed.
inline YoungFunction conjugate(const YoungFunction& phi, const ConjugateOptions& opts = {}) {
  if (opts.allow_closed_form) {
    if (auto c = phi.closed_form_conjugate()) return *c;
  }
  return numeric_conjugate(phi, default_grid(phi, opts.grid_points));
}

// ---------------------------------------------------------------------------
// Growth indices

struct Delta2Options {
  double stabilization_tol = 1e-4;
  double points_per_decade = 256;
};

struct Delta2Report {
  std::vector<std::pair<double, double>> p_phi_of_x;  // (x, p_Phi(x)) at the base cutoff
  double p_phi = numeric::kInf;
  double q_phi = 1.0;
  bool is_delta2 = false;
  double scan_start = 0.0;
  double y_cutoff = 0.0;
  std::array<double, 3> cutoff_sequence{};  // p_phi at y_cutoff, 2 y_cutoff, 4 y_cutoff
  std::string scan_grid;
};

namespace detail {

// Points start * 10^(j/ppd) below y_cutoff, then y_cutoff itself. The lattice does
// not depend on the cutoff, so doubling it only appends points.
inline std::vector<double> anchored_lattice(double start, double cutoff, double ppd) {
  std::vector<double> g;
  for (int j = 0;; ++j) {
    const double y = start * std::pow(10.0, j / ppd);
    if (y >= cutoff) break;
    g.push_back(y);
  }
  g.push_back(cutoff);
  return g;
}

inline double growth_ratio(const YoungFunction& phi, double y) {
  const double v = phi(y);
  if (!(v > 0.0)) fail(ErrorKind::domain, phi.label() + ": Phi(y) = 0 at scanned y=" + fmt(y));
  return y * phi.derivative(y) / v;
}

}  // namespace detail

/// Smallest point where Phi is positive, slightly above the zero set {Phi = 0}.
inline double delta2_scan_start(const YoungFunction& phi) {
  constexpr double kFloor = 1e-6;
  if (phi(kFloor) > 0.0) return kFloor;
  const double z = numeric::sup_where([&](double x) { return phi(x) <= 0.0; }, 0.0, phi.x_max());
  return z * (1.0 + 1e-3) + kFloor;
}

inline double q_from_p(double p) {
  if (!std::isfinite(p)) return 1.0;
  if (p <= 1.0) return numeric::kInf;
  return p / (p - 1.0);
}

/// p_Phi(x) = sup_{y > x} y Phi'(y) / Phi(y) scanned up to y_cutoff, and the
/// inf over the x grid. Delta2 is declared when two doublings of the cutoff
/// move p_phi by less than the stabilization tolerance.
inline Delta2Report delta2_index(const YoungFunction& phi, std::vector<double> x_grid, double y_cutoff,
                                 const Delta2Options& opts = {}) {
  if (x_grid.empty()) fail(ErrorKind::input, "delta2 scan needs a nonempty x grid");
  std::sort(x_grid.begin(), x_grid.end());
  if (!(x_grid.front() > 0.0) || !(y_cutoff > x_grid.back())) {
    fail(ErrorKind::input, "delta2 scan needs 0 < x < y_cutoff");
  }
  Delta2Report rep;
  rep.scan_start = x_grid.front();
  rep.y_cutoff = y_cutoff;

  auto scan = [&](double cutoff, std::vector<std::pair<double, double>>* profile) {
    std::vector<double> ys = detail::anchored_lattice(rep.scan_start, cutoff, opts.points_per_decade);
    ys.insert(ys.end(), x_grid.begin(), x_grid.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    std::vector<double> suffix(ys.size());
    double m = -numeric::kInf;
    for (std::size_t i = ys.size(); i-- > 0;) {
      m = std::max(m, detail::growth_ratio(phi, ys[i]));
      suffix[i] = m;
    }
    double best = numeric::kInf;
    for (double x : x_grid) {
      const auto it = std::upper_bound(ys.begin(), ys.end(), x);
      if (it == ys.end()) continue;
      const double p = suffix[static_cast<std::size_t>(it - ys.begin())];
      if (profile) profile->emplace_back(x, p);
      best = std::min(best, p);
    }
    return best;
  };

  rep.cutoff_sequence[0] = scan(y_cutoff, &rep.p_phi_of_x);
  rep.cutoff_sequence[1] = scan(2.0 * y_cutoff, nullptr);
  rep.cutoff_sequence[2] = scan(4.0 * y_cutoff, nullptr);
  const bool stable = std::abs(rep.cutoff_sequence[1] - rep.cutoff_sequence[0]) < opts.stabilization_tol &&
                      std::abs(rep.cutoff_sequence[2] - rep.cutoff_sequence[1]) < opts.stabilization_tol;
  rep.is_delta2 = stable && std::isfinite(rep.cutoff_sequence[2]);
  rep.p_phi = rep.is_delta2 ? rep.cutoff_sequence[0] : numeric::kInf;
  rep.q_phi = q_from_p(rep.p_phi);
  std::ostringstream os;
  os << "log lattice " << opts.points_per_decade << "/decade from " << rep.scan_start << " to " << y_cutoff
     << " (x grid " << x_grid.size() << " points up to " << x_grid.back() << ")";
  rep.scan_grid = os.str();
  return rep;
}

/// Default scan: x from the start of {Phi > 0} up to x_max / 2, cutoff x_max.
inline Delta2Report delta2_index(const YoungFunction& phi, const Delta2Options& opts = {}) {
  const double start = delta2_scan_start(phi);
  const double cutoff = phi.x_max();
  std::vector<double> xs = detail::anchored_lattice(start, cutoff / 2.0, opts.points_per_decade / 8.0);
  return delta2_index(phi, std::move(xs), cutoff, opts);
}

/// p_Phi(x0) with the same stabilization rule; +inf when the tail sup diverges.
inline double growth_index_at(const YoungFunction& phi, double x0, const Delta2Options& opts = {}) {
  if (!(x0 > 0.0)) fail(ErrorKind::input, "growth index needs x0 > 0");
  const double cutoff = std::max(phi.x_max(), 4.0 * x0);
  const auto rep = delta2_index(phi, {x0}, cutoff, opts);
  return rep.is_delta2 ? rep.p_phi : numeric::kInf;
}

// ---------------------------------------------------------------------------
// Linearized lower part

/// Psi(x) = (Phi(x0)/x0) |x| on [0, x0] and Phi(x) beyond.
struct TruncatedPsi {
  double x0;
  double slope;           // Phi(x0) / x0
  double growth_index;    // p_Phi(x0)
  YoungFunction base;
  YoungFunction psi;

  double operator()(double x) const { return psi(x); }

  /// Psi(lambda x) <= lambda^p Psi(x) on the given samples; returns the worst relative slack.
  [[nodiscard]] double power_growth_slack(double p, const std::vector<double>& xs, const std::vector<double>& lambdas) const {
    double worst = numeric::kInf;
    for (double x : xs) {
      for (double l : lambdas) {
        const double lhs = psi(l * x);
        const double rhs = std::pow(l, p) * psi(x);
        worst = std::min(worst, (rhs - lhs) / std::max(1.0, std::abs(rhs)));
      }
    }
    return worst;
  }
};

inline TruncatedPsi make_truncated_psi(const YoungFunction& phi, double x0, const Delta2Options& opts = {}) {
  if (!(x0 > 0.0)) fail(ErrorKind::input, "x0 must be positive");
  const double fx0 = phi(x0);
  if (!(fx0 > 0.0)) fail(ErrorKind::not_applicable, "Phi(x0) = 0: the linear part would vanish");
  const double p_index = growth_index_at(phi, x0, opts);
  if (!std::isfinite(p_index)) {
    fail(ErrorKind::not_applicable, phi.label() + ": p_Phi(x0) is infinite, no growth exponent exists");
  }
  const double slope = fx0 / x0;
  YoungFunction::Parts parts;
  parts.kind = YoungKind::truncated;
  parts.label = "truncated(" + phi.label() + ",x0=" + detail::fmt(x0) + ")";
  parts.eval = [phi, x0, slope](double x) {
    const double a = std::abs(x);
    return a <= x0 ? slope * a : phi(a);
  };
  parts.derivative = [phi, x0, slope](double x) { return x <= x0 ? (x > 0.0 ? slope : 0.0) : phi.derivative(x); };
  parts.x_max = std::max(phi.x_max(), 2.0 * x0);
  parts.kinks = {0.0, x0};
  parts.params = {x0};
  return TruncatedPsi{x0, slope, p_index, phi, YoungFunction(std::move(parts))};
}

}  // namespace orlicz
