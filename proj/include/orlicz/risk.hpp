#pragma once

// Monetary utility functions on finite spaces: axioms, the dual representation
//   u(xi) = inf_Q { E_Q[xi] + c(Q) },   c(Q) = sup_xi { u(xi) - E_Q[xi] },
// continuity probes along monotone chains, and closure certificates for convex
// sets through the extraction engine.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/komlos.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/parallel.hpp"
#include "orlicz/space.hpp"

namespace orlicz {

struct MonetaryUtility {
  std::string name;
  std::function<double(const RandomVariable&)> eval;  // may return -inf
  std::optional<std::function<double(const RandomVariable&)>> closed_form_penalty;  // density -> c(Q)

  double operator()(const RandomVariable& xi) const { return eval(xi); }
};

namespace utility {

inline MonetaryUtility entropic(double gamma = 1.0) {
  if (!(gamma > 0.0)) fail(ErrorKind::domain, "entropic utility needs gamma > 0");
  MonetaryUtility u;
  u.name = gamma == 1.0 ? "entropic" : "entropic(" + detail::fmt(gamma) + ")";
  u.eval = [gamma](const RandomVariable& xi) {
    double m = -numeric::kInf;
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (xi.weight(i) > 0.0) m = std::max(m, -gamma * xi[i]);
    }
    const double s = xi.expectation([&](double x) { return std::exp(-gamma * x - m); });
    return -(m + std::log(s)) / gamma;
  };
  u.closed_form_penalty = [gamma](const RandomVariable& d) {
    return d.expectation([](double q) { return q > 0.0 ? q * std::log(q) : 0.0; }) / gamma;
  };
  return u;
}

inline MonetaryUtility ess_inf() {
  MonetaryUtility u;
  u.name = "ess_inf";
  u.eval = [](const RandomVariable& xi) {
    double m = numeric::kInf;
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (xi.weight(i) > 0.0) m = std::min(m, xi[i]);
    }
    return m;
  };
  u.closed_form_penalty = [](const RandomVariable&) { return 0.0; };
  return u;
}

/// Mean of the lowest alpha-fraction of outcomes.
inline MonetaryUtility average_value_at_risk(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::domain, "average value at risk needs alpha in (0,1]");
  MonetaryUtility u;
  u.name = "average_value_at_risk(" + detail::fmt(alpha) + ")";
  u.eval = [alpha](const RandomVariable& xi) {
    std::vector<std::size_t> order(xi.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xi[a] < xi[b]; });
    double left = alpha, s = 0.0;
    for (std::size_t i : order) {
      const double take = std::min(left, xi.weight(i));
      s += take * xi[i];
      left -= take;
      if (left <= 0.0) break;
    }
    return s / alpha;
  };
  u.closed_form_penalty = [alpha](const RandomVariable& d) {
    return d.sup_abs() <= (1.0 / alpha) * (1.0 + 1e-12) ? 0.0 : numeric::kInf;
  };
  return u;
}

inline MonetaryUtility expectation() {
  MonetaryUtility u;
  u.name = "expectation";
  u.eval = [](const RandomVariable& xi) { return xi.expectation(); };
  u.closed_form_penalty = [](const RandomVariable& d) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.weight(i) > 0.0 && std::abs(d[i] - 1.0) > 1e-12) return numeric::kInf;
    }
    return 0.0;
  };
  return u;
}

inline MonetaryUtility custom(std::string name, std::function<double(const RandomVariable&)> eval) {
  return {std::move(name), std::move(eval), std::nullopt};
}

}  // namespace utility

inline void require_density(const RandomVariable& d, double tol = 1e-12) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0.0 || !std::isfinite(d[i])) fail(ErrorKind::input, "density has a negative or non-finite entry");
  }
  if (std::abs(d.expectation() - 1.0) > tol) fail(ErrorKind::input, "density does not integrate to 1");
}

// ---------------------------------------------------------------------------
// Penalty by ascent

struct PenaltyOptions {
  std::size_t random_starts = 3;
  std::uint64_t seed = 7;
  double unbounded_at = 1e10;
  int newton_iterations = 200;
  std::vector<RandomVariable> extra_starts;
};

struct PenaltyResult {
  double value = 0.0;
  bool finite = true;
  std::optional<RandomVariable> argmax;
  std::optional<RandomVariable> diverging_direction;
  std::optional<double> closed_form;
  double cross_check_gap = 0.0;
};

namespace detail {

// Solves (A + mu I) x = b for symmetric positive definite A; false if not SPD.
inline bool cholesky_solve(std::vector<double> a, std::size_t n, std::vector<double> b, std::vector<double>& x) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= a[i * n + k] * b[k];
    b[i] /= a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= a[k * n + i] * b[k];
    b[i] /= a[i * n + i];
  }
  x = std::move(b);
  return true;
}

class PenaltyAscent {
 public:
  PenaltyAscent(const MonetaryUtility& u, const RandomVariable& density, const PenaltyOptions& opts)
      : u_(u), d_(density), opts_(opts), n_(density.size()) {}

  double f(const std::vector<double>& x) const {
    const RandomVariable xi(d_.space(), x);
    const double v = u_(xi);
    if (v == -numeric::kInf) return -numeric::kInf;
    return v - pairing(d_, xi);
  }

  // Damped Newton with finite-difference derivatives, then a compass polish.
  void climb(std::vector<double> x) {
    double fx = f(x);
    if (fx == -numeric::kInf) return;
    consider(x, fx);
    if (n_ <= 32) {
      for (int it = 0; it < opts_.newton_iterations && !unbounded_; ++it) {
        std::vector<double> g, h;
        derivatives(x, g, h);
        double gn = 0.0;
        for (double v : g) gn = std::max(gn, std::abs(v));
        if (gn < 1e-11) break;
        std::vector<double> step;
        double mu = 0.0;
        for (int tries = 0; tries < 40; ++tries) {
          std::vector<double> a(n_ * n_);
          for (std::size_t i = 0; i < n_ * n_; ++i) a[i] = -h[i];
          for (std::size_t i = 0; i < n_; ++i) a[i * n_ + i] += mu;
          if (cholesky_solve(a, n_, g, step)) break;
          step.clear();
          mu = mu == 0.0 ? 1e-8 * (1.0 + gn) : mu * 10.0;
        }
        if (step.empty()) step = g;
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
          std::vector<double> y(n_);
          for (std::size_t i = 0; i < n_; ++i) y[i] = x[i] + t * step[i];
          const double fy = f(y);
          if (fy > fx) {
            x = std::move(y);
            fx = fy;
            moved = true;
            break;
          }
        }
        consider(x, fx);
        if (!moved) break;
      }
    }
    compass(x, fx);
  }

  [[nodiscard]] double best() const { return best_; }
  [[nodiscard]] const std::vector<double>& best_x() const { return best_x_; }
  [[nodiscard]] bool unbounded() const { return unbounded_; }
  [[nodiscard]] const std::vector<double>& direction() const { return direction_; }

 private:
  void consider(const std::vector<double>& x, double fx) {
    if (fx > best_) {
      best_ = fx;
      best_x_ = x;
    }
    if (fx > opts_.unbounded_at && !unbounded_) {
      unbounded_ = true;
      direction_ = x;
    }
  }

  void derivatives(const std::vector<double>& x, std::vector<double>& g, std::vector<double>& h) const {
    g.assign(n_, 0.0);
    h.assign(n_ * n_, 0.0);
    const double f0 = f(x);
    std::vector<double> y = x;
    std::vector<double> fp(n_), fm(n_), hs(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      hs[i] = 1e-4 * (1.0 + std::abs(x[i]));
      y[i] = x[i] + hs[i];
      fp[i] = f(y);
      y[i] = x[i] - hs[i];
      fm[i] = f(y);
      y[i] = x[i];
      g[i] = (fp[i] - fm[i]) / (2.0 * hs[i]);
      h[i * n_ + i] = (fp[i] - 2.0 * f0 + fm[i]) / (hs[i] * hs[i]);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        y[i] = x[i] + hs[i];
        y[j] = x[j] + hs[j];
        const double fpp = f(y);
        y[i] = x[i];
        y[j] = x[j];
        const double v = (fpp - fp[i] - fp[j] + f0) / (hs[i] * hs[j]);
        h[i * n_ + j] = h[j * n_ + i] = v;
      }
    }
  }

  void compass(std::vector<double> x, double fx) {
    double step = 1.0;
    for (int it = 0; it < 20000 && step > 1e-13 && !unbounded_; ++it) {
      bool improved = false;
      for (std::size_t i = 0; i < n_ && !improved; ++i) {
        for (double sgn : {1.0, -1.0}) {
          std::vector<double> y = x;
          y[i] += sgn * step;
          const double fy = f(y);
          if (fy > fx + 1e-15 * (1.0 + std::abs(fx))) {
            x = std::move(y);
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      consider(x, fx);
      step = improved ? step * 2.0 : step * 0.5;
    }
  }

  const MonetaryUtility& u_;
  const RandomVariable& d_;
  const PenaltyOptions& opts_;
  std::size_t n_;
  double best_ = -numeric::kInf;
  std::vector<double> best_x_;
  bool unbounded_ = false;
  std::vector<double> direction_;
};

}  // namespace detail

inline PenaltyResult penalty(const MonetaryUtility& u, const RandomVariable& density, const PenaltyOptions& opts = {}) {
  require_density(density);
  detail::PenaltyAscent ascent(u, density, opts);
  const auto& space = density.space();
  std::vector<std::vector<double>> starts;
  starts.emplace_back(space->size(), 0.0);
  {
    std::vector<double> s(space->size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = -std::log(std::max(density[i], 1e-12));
    starts.push_back(std::move(s));
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  for (std::size_t r = 0; r < opts.random_starts; ++r) {
    std::vector<double> s(space->size());
    for (auto& v : s) v = normal(rng);
    starts.push_back(std::move(s));
  }
  for (const auto& e : opts.extra_starts) starts.emplace_back(e.values().begin(), e.values().end());
  for (auto& s : starts) {
    if (ascent.unbounded()) break;
    ascent.climb(s);
  }
  PenaltyResult r;
  if (ascent.unbounded()) {
    r.finite = false;
    r.value = numeric::kInf;
    r.diverging_direction = RandomVariable(space, ascent.direction());
  } else if (ascent.best() == -numeric::kInf) {
    fail(ErrorKind::domain, "utility is -inf on every ascent start");
  } else {
    r.value = ascent.best();
    r.argmax = RandomVariable(space, ascent.best_x());
  }
  if (u.closed_form_penalty) {
    r.closed_form = (*u.closed_form_penalty)(density);
    r.cross_check_gap = (std::isinf(*r.closed_form) && std::isinf(r.value)) ? 0.0 : std::abs(*r.closed_form - r.value);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Dual representation

struct DualRepresentation {
  std::vector<RandomVariable> densities;
  std::vector<double> penalties;
  std::size_t optimizer = 0;
};

struct DualCheckOptions {
  double tolerance = 1e-8;
  int mesh_level = 4;              // Dirichlet mesh: compositions of this integer over the atoms
  std::size_t mesh_max_atoms = 8;  // larger spaces use only the first-order density
  bool use_closed_form = false;    // closed-form penalties instead of ascent
  PenaltyOptions penalty;
};

struct DualCheckReport {
  double value = 0.0;  // u(xi)
  double dual_inf = 0.0;
  double gap = 0.0;
  RandomVariable optimizer_density;
  DualRepresentation representation;
  double min_weak_duality_slack = 0.0;
};

namespace detail {

inline RandomVariable first_order_density(const MonetaryUtility& u, const RandomVariable& xi) {
  std::vector<double> g(xi.size());
  std::vector<double> y(xi.values().begin(), xi.values().end());
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(xi[i]));
    y[i] = xi[i] + h;
    const double fp = u(RandomVariable(xi.space(), y));
    y[i] = xi[i] - h;
    const double fm = u(RandomVariable(xi.space(), y));
    y[i] = xi[i];
    g[i] = std::max(0.0, (fp - fm) / (2.0 * h));
    total += g[i];
  }
  std::vector<double> d(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (xi.weight(i) > 0.0) d[i] = total > 0.0 ? g[i] / total / xi.weight(i) : 1.0;
  }
  return RandomVariable(xi.space(), std::move(d));
}

inline void compositions(int total, std::size_t parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = 0; k <= total; ++k) {
    cur.push_back(k);
    compositions(total - k, parts, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Densities on the simplex mesh, pulled slightly towards P so penalties stay attained.
inline std::vector<RandomVariable> dirichlet_mesh(const SpacePtr& space, int level, double pull = 1e-3) {
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  detail::compositions(level, space->size(), cur, comps);
  std::vector<RandomVariable> out;
  for (const auto& c : comps) {
    std::vector<double> d(space->size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double q = static_cast<double>(c[i]) / level;
      d[i] = space->weight(i) > 0.0 ? (1.0 - pull) * q / space->weight(i) + pull : 0.0;
    }
    out.emplace_back(space, std::move(d));
  }
  return out;
}

inline DualCheckReport dual_representation_check(const MonetaryUtility& u, const RandomVariable& xi,
                                                 std::vector<RandomVariable> density_family = {},
                                                 const DualCheckOptions& opts = {}) {
  DualCheckReport r;
  r.value = u(xi);
  if (!std::isfinite(r.value)) fail(ErrorKind::domain, "utility is not finite at the position");
  auto& rep = r.representation;
  rep.densities.push_back(detail::first_order_density(u, xi));
  rep.densities.push_back(RandomVariable::constant(xi.space(), 1.0));
  if (xi.size() <= opts.mesh_max_atoms) {
    for (auto& d : dirichlet_mesh(xi.space(), opts.mesh_level)) rep.densities.push_back(std::move(d));
  }
  for (auto& d : density_family) rep.densities.push_back(std::move(d));
  rep.penalties.assign(rep.densities.size(), 0.0);
  PenaltyOptions po = opts.penalty;
  po.extra_starts.push_back(xi);
  parallel::for_each_index(rep.densities.size(), [&](std::size_t k) {
    if (opts.use_closed_form && u.closed_form_penalty) {
      rep.penalties[k] = (*u.closed_form_penalty)(rep.densities[k]);
    } else {
      rep.penalties[k] = penalty(u, rep.densities[k], po).value;
    }
  });
  r.dual_inf = numeric::kInf;
  r.min_weak_duality_slack = numeric::kInf;
  for (std::size_t k = 0; k < rep.densities.size(); ++k) {
    const double v = pairing(rep.densities[k], xi) + rep.penalties[k];
    r.min_weak_duality_slack = std::min(r.min_weak_duality_slack, v - r.value);
    if (v < r.dual_inf) {
      r.dual_inf = v;
      rep.optimizer = k;
    }
  }
  r.gap = r.dual_inf - r.value;
  r.optimizer_density = rep.densities[rep.optimizer];
  if (r.min_weak_duality_slack < -opts.tolerance * (1.0 + std::abs(r.value))) {
    fail(ErrorKind::representation_violation,
         u.name + ": E_Q[xi] + c(Q) falls below u(xi) by " + detail::fmt(-r.min_weak_duality_slack));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Continuity along monotone chains

struct ContinuityReport {
  std::vector<double> values;   // u(xi_n)
  double limit_value = 0.0;     // u(xi)
  std::vector<double> gaps;     // |u(xi_n) - u(xi)|
  std::vector<double> distances;  // sup |xi_n - xi|
  std::vector<double> sandwich;   // 2u(xi) - u(xi_n) - u(2xi - xi_n)
  double min_sandwich = 0.0;
  bool values_monotone = false;
  bool lipschitz = false;
  bool converged = false;
  bool holds = false;
};

struct ContinuityOptions {
  double tolerance = 1e-9;
};

namespace detail {

inline ContinuityReport continuity_probe(const MonetaryUtility& u, const std::vector<RandomVariable>& chain,
                                         const std::optional<RandomVariable>& limit, bool decreasing,
                                         const ContinuityOptions& opts) {
  if (chain.empty()) fail(ErrorKind::length, "empty chain");
  for (std::size_t n = 1; n < chain.size(); ++n) {
    chain[n].require_same_space(chain[0]);
    for (std::size_t i = 0; i < chain[n].size(); ++i) {
      const double step = chain[n][i] - chain[n - 1][i];
      if (decreasing ? step > 0.0 : step < 0.0) {
        fail(ErrorKind::input, std::string("chain is not ") + (decreasing ? "decreasing" : "increasing") + " at term " +
                                   std::to_string(n) + ", atom " + std::to_string(i));
      }
    }
  }
  const RandomVariable xi = limit ? *limit : chain.back();
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (decreasing ? xi[i] > chain.back()[i] : xi[i] < chain.back()[i]) {
      fail(ErrorKind::input, "limit is not below/above the chain");
    }
  }
  ContinuityReport r;
  r.limit_value = u(xi);
  const double tol = opts.tolerance;
  r.values_monotone = true;
  r.lipschitz = true;
  r.min_sandwich = numeric::kInf;
  for (std::size_t n = 0; n < chain.size(); ++n) {
    const double v = u(chain[n]);
    r.values.push_back(v);
    r.gaps.push_back(std::abs(v - r.limit_value));
    r.distances.push_back((chain[n] - xi).sup_abs());
    const double s = 2.0 * r.limit_value - v - u(xi * 2.0 - chain[n]);
    r.sandwich.push_back(s);
    r.min_sandwich = std::min(r.min_sandwich, s);
    const double scale = tol * (1.0 + std::abs(v));
    if (n > 0 && (decreasing ? v > r.values[n - 1] + scale : v < r.values[n - 1] - scale)) r.values_monotone = false;
    if (r.gaps.back() > r.distances.back() + scale) r.lipschitz = false;
  }
  r.converged = r.gaps.back() <= r.distances.back() + tol * (1.0 + std::abs(r.limit_value));
  r.holds = r.values_monotone && r.lipschitz && r.converged && r.min_sandwich >= -tol;
  return r;
}

}  // namespace detail

inline ContinuityReport continuity_from_above(const MonetaryUtility& u, const std::vector<RandomVariable>& chain,
                                              const std::optional<RandomVariable>& limit = std::nullopt,
                                              const ContinuityOptions& opts = {}) {
  return detail::continuity_probe(u, chain, limit, true, opts);
}

inline ContinuityReport continuity_from_below(const MonetaryUtility& u, const std::vector<RandomVariable>& chain,
                                              const std::optional<RandomVariable>& limit = std::nullopt,
                                              const ContinuityOptions& opts = {}) {
  return detail::continuity_probe(u, chain, limit, false, opts);
}

struct Chain {
  std::vector<RandomVariable> terms;
  std::optional<RandomVariable> limit;
  bool decreasing = true;
};

/// Runs many probes concurrently.
inline std::vector<ContinuityReport> continuity_battery(const MonetaryUtility& u, const std::vector<Chain>& chains,
                                                        const ContinuityOptions& opts = {}) {
  std::vector<ContinuityReport> out(chains.size());
  parallel::for_each_index(chains.size(), [&](std::size_t k) {
    out[k] = detail::continuity_probe(u, chains[k].terms, chains[k].limit, chains[k].decreasing, opts);
  });
  return out;
}

struct UscReport {
  double limit_value;
  double limsup;
  bool holds;
};

/// u(xi) >= limsup u(xi_n) for an order-bounded sequence converging atomwise to xi.
inline UscReport usc_sequence_check(const MonetaryUtility& u, const std::vector<RandomVariable>& seq,
                                    const RandomVariable& limit, double tol = 1e-9) {
  if (seq.empty()) fail(ErrorKind::length, "empty sequence");
  UscReport r{u(limit), -numeric::kInf, false};
  for (std::size_t n = seq.size() / 2; n < seq.size(); ++n) r.limsup = std::max(r.limsup, u(seq[n]));
  r.holds = r.limit_value >= r.limsup - tol * (1.0 + std::abs(r.limit_value));
  return r;
}

struct AxiomFailure {
  std::size_t pair;
  std::string axiom;
  double lhs;
  double rhs;
};

struct MonotonicityReport {
  std::size_t pairs_checked = 0;
  std::vector<AxiomFailure> failures;
  bool normalized = false;        // u(0) = 0
  bool cash_invariant = false;    // on every checked position
  [[nodiscard]] bool holds() const { return failures.empty() && normalized && cash_invariant; }
};

/// xi <= eta must give u(xi) <= u(eta); also checks u(0)=0 and cash invariance on the pairs.
inline MonotonicityReport monotonicity_check(const MonetaryUtility& u,
                                             const std::vector<std::pair<RandomVariable, RandomVariable>>& pairs,
                                             double tol = 1e-9) {
  MonotonicityReport r;
  if (pairs.empty()) fail(ErrorKind::length, "no pairs");
  const RandomVariable zero = RandomVariable::zero(pairs.front().first.space());
  r.normalized = std::abs(u(zero)) <= tol;
  r.cash_invariant = true;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [xi, eta] = pairs[k];
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (xi[i] > eta[i]) fail(ErrorKind::input, "pair " + std::to_string(k) + " is not ordered");
    }
    const double a = u(xi), b = u(eta);
    if (a > b + tol * (1.0 + std::abs(b))) r.failures.push_back({k, "monotonicity", a, b});
    for (double c : {-1.5, 0.25, 3.0}) {
      const double shifted = u(xi + RandomVariable::constant(xi.space(), c));
      if (std::abs(shifted - a - c) > tol * (1.0 + std::abs(a))) {
        r.cash_invariant = false;
        r.failures.push_back({k, "cash_invariance", shifted, a + c});
      }
    }
    ++r.pairs_checked;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Closure certificates

struct ConvexSetProbe {
  std::function<bool(const RandomVariable&)> membership;
  std::string description;

  bool operator()(const RandomVariable& xi) const { return membership(xi); }
};

namespace probe {

inline ConvexSetProbe norm_ball(YoungFunction phistar, double lambda) {
  return {[phistar, lambda](const RandomVariable& xi) { return luxemburg_norm(xi, phistar).value <= lambda * (1.0 + 1e-9); },
          "ball of radius " + detail::fmt(lambda) + " for " + phistar.label()};
}

inline ConvexSetProbe acceptance_set(MonetaryUtility u, double level = 0.0) {
  return {[u, level](const RandomVariable& xi) { return u(xi) >= level - 1e-12; },
          "{" + u.name + " >= " + detail::fmt(level) + "}"};
}

inline ConvexSetProbe half_space(RandomVariable eta, double eps) {
  return {[eta, eps](const RandomVariable& xi) { return pairing(eta, xi) >= eps; },
          "{E[eta xi] >= " + detail::fmt(eps) + "}"};
}

}  // namespace probe

/// Midpoints and random convex weights of member pairs stay in C.
inline bool convexity_spot_check(const ConvexSetProbe& c, const std::vector<RandomVariable>& members,
                                 std::uint64_t seed = 3, int samples = 32) {
  if (members.size() < 2) return true;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    const double w = s == 0 ? 0.5 : t(rng);
    const auto& a = members[pick(rng)];
    const auto& b = members[pick(rng)];
    if (!c(a * w + b * (1.0 - w))) return false;
  }
  return true;
}

struct ClosureReport {
  KomlosCertificate certificate;
  bool members_in_C = false;
  bool combinations_in_C = false;
  bool limit_in_order_interval = false;
  bool limit_in_C = false;
  double limit_norm = 0.0;
  std::optional<double> norm_bound;
  std::string verdict;
};

inline ClosureReport closure_certificate(const ConvexSetProbe& c, const RvSequence& seq, const YoungFunction& phistar,
                                         const KomlosOptions& opts = {}) {
  seq.validate();
  ClosureReport r;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    if (!c(seq[n])) fail(ErrorKind::input, "term " + std::to_string(n) + " is not in " + c.description);
  }
  r.members_in_C = true;
  r.norm_bound = seq.norm_bound ? *seq.norm_bound : verify_norm_bound(seq, phistar).realized_max;
  if (!std::isfinite(*r.norm_bound)) fail(ErrorKind::hypothesis, "sequence is not norm bounded");
  r.certificate = komlos_extract(seq, phistar, KomlosMode::forward_convex, opts);
  if (!r.certificate.failing_stage.empty() && r.certificate.combinations.empty()) {
    r.verdict = "extraction incomplete at stage " + r.certificate.failing_stage;
    return r;
  }
  for (std::size_t k = 0; k < r.certificate.combinations.size(); ++k) {
    if (!c(r.certificate.combinations[k])) {
      fail(ErrorKind::convexity_violation,
           "forward combination " + std::to_string(k) + " left " + c.description + ": the set is not convex");
    }
  }
  r.combinations_in_C = true;
  const auto& zeta = r.certificate.order_bound;
  r.limit_in_order_interval =
      OrderInterval(zeta).contains(r.certificate.limit, 1e-9 * (1.0 + zeta.sup_abs()));
  r.limit_in_C = c(r.certificate.limit);
  r.limit_norm = luxemburg_norm(r.certificate.limit, phistar).value;
  r.verdict = r.limit_in_C ? "limit certified in " + c.description : "limit is not in " + c.description;
  return r;
}

}  // namespace orlicz
