#pragma once

// Luxemburg and dual Orlicz norms on finite spaces.
//
//   ||xi||_Phi   = inf{lambda > 0 : E[Phi(xi / lambda)] <= 1}
//   ||xi||_(Phi*) = sup{E[eta xi] : E[Phi(eta)] <= 1}
//
// The dual norm is solved twice: through the first-order conditions of the
// sup (eta = (Phi')^{-1}(s |xi|), s tuned onto the modular sphere) and through
// the one-dimensional form inf_k (1 + E[Phi*(k xi)]) / k. The two must agree.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/space.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

enum class NormSolver { bisection, amemiya, direct_kkt };

inline std::string to_string(NormSolver s) {
  switch (s) {
    case NormSolver::bisection: return "bisection";
    case NormSolver::amemiya: return "amemiya";
    case NormSolver::direct_kkt: return "direct_kkt";
  }
  return "unknown";
}

struct NormResult {
  double value = 0.0;
  NormSolver solver = NormSolver::bisection;
  double residual = 0.0;
  std::optional<RandomVariable> witness;
  std::optional<double> cross_check;  // the second solver's value, dual norm only
};

struct NormOptions {
  double tolerance = 1e-6;   // relative agreement required between the dual-norm solvers
  double bracket_tol = 1e-15;
};

/// E[Phi(xi)].
inline double modular(const RandomVariable& xi, const YoungFunction& phi) {
  return xi.expectation([&](double x) { return phi(x); });
}

namespace detail {

// Nonzero atoms only: every Young function vanishes at 0.
struct Compact {
  std::vector<double> x;
  std::vector<double> w;
  std::vector<std::size_t> atom;

  explicit Compact(const RandomVariable& xi) {
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (xi[i] != 0.0 && xi.weight(i) != 0.0) {
        x.push_back(xi[i]);
        w.push_back(xi.weight(i));
        atom.push_back(i);
      }
    }
  }

  template <class F>
  double sum(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i], i);
    return s;
  }
};

}  // namespace detail

inline NormResult luxemburg_norm(const RandomVariable& xi, const YoungFunction& phi, const NormOptions& opts = {}) {
  NormResult r;
  r.solver = NormSolver::bisection;
  const double m = xi.sup_abs();
  if (m == 0.0) return r;
  const detail::Compact c(xi);
  auto above = [&](double lam) { return c.sum([&](double x, std::size_t) { return phi(x / lam); }) > 1.0; };
  double lo = m, hi = m;
  if (above(m)) {
    while (above(hi)) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    while (!above(lo) && lo > m * 1e-300) {
      hi = lo;
      lo *= 0.5;
    }
  }
  auto [a, b] = numeric::geometric_bracket(above, lo, hi, opts.bracket_tol);
  r.value = b;
  r.residual = b / a - 1.0;
  return r;
}

/// sup{E[eta xi] : E[Phi(eta)] <= 1} through the first-order conditions.
inline NormResult dual_norm_kkt(const RandomVariable& xi, const YoungFunction& phi, const NormOptions& opts = {}) {
  NormResult r;
  r.solver = NormSolver::direct_kkt;
  const double m = xi.sup_abs();
  if (m == 0.0) {
    r.witness = RandomVariable::zero(xi.space());
    return r;
  }
  const detail::Compact c(xi);
  const std::size_t n = c.x.size();
  auto candidate = [&](double s) {
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = phi.derivative_inverse(s * std::abs(c.x[i]));
    return e;
  };
  auto mod = [&](const std::vector<double>& e) { return c.sum([&](double, std::size_t i) { return phi(e[i]); }); };
  auto below = [&](double s) { return mod(candidate(s)) <= 1.0; };
  double lo = 1.0 / m, hi = 1.0 / m;
  if (below(lo)) {
    while (below(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) fail(ErrorKind::resolution, "modular never reaches 1 along the first-order path");
    }
  } else {
    while (!below(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) fail(ErrorKind::resolution, "modular never drops below 1 along the first-order path");
    }
  }
  auto [slo, shi] = numeric::geometric_bracket(below, lo, hi, opts.bracket_tol);
  std::vector<double> eta = candidate(slo);
  // Flat pieces of Phi' make the path jump; move along the segment to the sphere.
  if (mod(eta) < 1.0 - 1e-12) {
    const std::vector<double> eta_hi = candidate(shi);
    auto mix = [&](double t) {
      std::vector<double> e(n);
      for (std::size_t i = 0; i < n; ++i) e[i] = eta[i] * (1.0 - t) + eta_hi[i] * t;
      return e;
    };
    eta = mix(numeric::sup_where([&](double t) { return mod(mix(t)) <= 1.0; }, 0.0, 1.0));
  }
  std::vector<double> full(xi.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) full[c.atom[i]] = c.x[i] < 0.0 ? -eta[i] : eta[i];
  r.value = c.sum([&](double x, std::size_t i) { return std::abs(x) * eta[i]; });
  r.residual = std::abs(1.0 - mod(eta));
  r.witness = RandomVariable(xi.space(), std::move(full));
  return r;
}

/// inf_k (1 + E[Phi*(k xi)]) / k by golden-section search in log k.
inline NormResult dual_norm_amemiya(const RandomVariable& xi, const YoungFunction& phistar,
                                    const NormOptions& = {}) {
  NormResult r;
  r.solver = NormSolver::amemiya;
  const double m = xi.sup_abs();
  if (m == 0.0) return r;
  const detail::Compact c(xi);
  auto objective = [&](double logk) {
    const double k = std::exp(logk);
    try {
      return (1.0 + c.sum([&](double x, std::size_t) { return phistar(k * x); })) / k;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::resolution) return numeric::kInf;
      throw;
    }
  };
  const double centre = -std::log(m);
  auto best = numeric::golden_min(objective, centre - 20.0, centre + 28.0, 0.0, 400);
  r.value = best.value;
  r.residual = 0.0;
  return r;
}

/// The dual Orlicz norm, cross-checked between the two solvers.
inline NormResult dual_orlicz_norm(const RandomVariable& xi, const YoungFunction& phi, const YoungFunction& phistar,
                                   const NormOptions& opts = {}) {
  NormResult kkt = dual_norm_kkt(xi, phi, opts);
  const NormResult am = dual_norm_amemiya(xi, phistar, opts);
  const double scale = std::max(std::abs(kkt.value), std::abs(am.value));
  const double gap = std::abs(kkt.value - am.value);
  if (gap > 10.0 * opts.tolerance * scale) {
    fail(ErrorKind::consistency, "dual norm solvers disagree for " + phi.label() + ": first-order " +
                                     detail::fmt(kkt.value) + " vs one-dimensional " + detail::fmt(am.value));
  }
  kkt.cross_check = am.value;
  kkt.residual = scale > 0.0 ? gap / scale : 0.0;
  return kkt;
}

inline NormResult dual_orlicz_norm(const RandomVariable& xi, const YoungFunction& phi, const NormOptions& opts = {}) {
  return dual_orlicz_norm(xi, phi, conjugate(phi), opts);
}

struct HolderReport {
  double lhs;  // E[eta xi]
  double rhs;  // ||eta||_Phi ||xi||_(Phi*)
  double slack;
};

inline HolderReport holder_check(const RandomVariable& eta, const RandomVariable& xi, const YoungFunction& phi,
                                 const NormOptions& opts = {}) {
  eta.require_same_space(xi);
  const double lhs = pairing(eta, xi);
  const double rhs = luxemburg_norm(eta, phi, opts).value * dual_orlicz_norm(xi, phi, opts).value;
  return {lhs, rhs, rhs - lhs};
}

}  // namespace orlicz
