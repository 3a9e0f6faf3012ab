#pragma once

// Upper q-estimates for disjointly supported families and the Cesaro decay
// they imply.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/space.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Members with pairwise disjoint supports on a common space.
class DisjointFamily {
 public:
  explicit DisjointFamily(std::vector<RandomVariable> members) : members_(std::move(members)) {
    if (members_.empty()) fail(ErrorKind::input, "disjoint family needs at least one member");
    std::vector<int> owner(members_.front().size(), -1);
    for (std::size_t k = 0; k < members_.size(); ++k) {
      members_[k].require_same_space(members_.front());
      supports_.push_back(support(members_[k]));
      for (std::size_t a : supports_.back()) {
        if (owner[a] >= 0) {
          fail(ErrorKind::invariant_violation, "members " + std::to_string(owner[a]) + " and " + std::to_string(k) +
                                                   " overlap on atom " + std::to_string(a));
        }
        owner[a] = static_cast<int>(k);
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
  [[nodiscard]] const RandomVariable& operator[](std::size_t k) const { return members_[k]; }
  [[nodiscard]] const std::vector<RandomVariable>& members() const noexcept { return members_; }
  [[nodiscard]] const std::vector<std::size_t>& support_of(std::size_t k) const { return supports_[k]; }
  [[nodiscard]] const SpacePtr& space() const { return members_.front().space(); }

  [[nodiscard]] DisjointFamily prefix(std::size_t n) const {
    if (n == 0 || n > members_.size()) fail(ErrorKind::length, "prefix length out of range");
    return DisjointFamily({members_.begin(), members_.begin() + static_cast<std::ptrdiff_t>(n)});
  }

  [[nodiscard]] RandomVariable sum() const {
    RandomVariable s = RandomVariable::zero(space());
    for (const auto& m : members_) s += m;
    return s;
  }

 private:
  std::vector<RandomVariable> members_;
  std::vector<std::vector<std::size_t>> supports_;
};

struct QEstimateOptions {
  std::optional<double> declared_C;
  std::optional<Delta2Report> delta2;  // reuse a cached scan
  NormOptions norm;
};

struct QEstimateReport {
  double q = 1.0;
  double lhs = 0.0;
  double rhs_sum = 0.0;
  double empirical_C = 1.0;
  std::optional<double> declared_C;
  double q_phi = 1.0;
  double certifying_x0 = 0.0;  // where the growth profile attains the p that certifies q
  double certifying_p = 0.0;
  std::vector<double> member_norms;
};

namespace detail {

inline Delta2Report require_delta2(const YoungFunction& phi, const std::optional<Delta2Report>& cached) {
  Delta2Report rep = cached ? *cached : delta2_index(phi);
  if (!rep.is_delta2) fail(ErrorKind::hypothesis, phi.label() + " is not Delta2: no upper q-estimate with q > 1");
  return rep;
}

inline void require_q(double q, const Delta2Report& rep) {
  if (!(q >= 1.0)) fail(ErrorKind::hypothesis, "q must be at least 1");
  if (q > rep.q_phi * (1.0 + 1e-9)) {
    fail(ErrorKind::hypothesis, "q=" + fmt(q) + " exceeds q_Phi=" + fmt(rep.q_phi));
  }
}

inline double lq_sum(std::span<const double> xs, double q) {
  double s = 0.0;
  for (double x : xs) s += std::pow(x, q);
  return std::pow(s, 1.0 / q);
}

}  // namespace detail

/// ||sum xi_k||_(Phi*) against (sum ||xi_k||_(Phi*)^q)^{1/q}.
inline QEstimateReport verify_upper_q_estimate(const DisjointFamily& fam, const YoungFunction& phi, double q,
                                               const QEstimateOptions& opts = {}) {
  const Delta2Report rep = detail::require_delta2(phi, opts.delta2);
  detail::require_q(q, rep);
  const YoungFunction phistar = conjugate(phi);
  QEstimateReport r;
  r.q = q;
  r.q_phi = rep.q_phi;
  r.declared_C = opts.declared_C;
  r.certifying_p = rep.p_phi;
  for (auto [x, p] : rep.p_phi_of_x) {
    if (p == rep.p_phi) {
      r.certifying_x0 = x;
      break;
    }
  }
  for (const auto& m : fam.members()) r.member_norms.push_back(dual_orlicz_norm(m, phi, phistar, opts.norm).value);
  r.lhs = dual_orlicz_norm(fam.sum(), phi, phistar, opts.norm).value;
  r.rhs_sum = detail::lq_sum(r.member_norms, q);
  r.empirical_C = r.rhs_sum > 0.0 ? r.lhs / r.rhs_sum : 1.0;
  return r;
}

struct QTraceRow {
  std::size_t n;
  double lhs;
  double rhs;
  double ratio;
};

/// The q-estimate evaluated on every prefix length in `ns`.
inline std::vector<QTraceRow> q_estimate_trace(const DisjointFamily& fam, const YoungFunction& phi, double q,
                                               std::span<const std::size_t> ns, const QEstimateOptions& opts = {}) {
  QEstimateOptions o = opts;
  if (!o.delta2) o.delta2 = detail::require_delta2(phi, std::nullopt);
  const YoungFunction phistar = conjugate(phi);
  detail::require_q(q, *o.delta2);
  std::vector<double> norms;
  for (const auto& m : fam.members()) norms.push_back(dual_orlicz_norm(m, phi, phistar, o.norm).value);
  std::vector<QTraceRow> rows;
  RandomVariable partial = RandomVariable::zero(fam.space());
  std::size_t done = 0;
  for (std::size_t n : ns) {
    if (n == 0 || n > fam.size()) fail(ErrorKind::length, "trace length out of range");
    if (n < done) fail(ErrorKind::input, "trace lengths must be increasing");
    for (; done < n; ++done) partial += fam[done];
    const double lhs = dual_orlicz_norm(partial, phi, phistar, o.norm).value;
    const double rhs = detail::lq_sum(std::span<const double>(norms.data(), n), q);
    rows.push_back({n, lhs, rhs, rhs > 0.0 ? lhs / rhs : 1.0});
  }
  return rows;
}

struct CesaroReport {
  std::vector<double> mean_norms;  // ||(xi_1 + ... + xi_n) / n||_(Phi*), n = 1..N
  double fitted_exponent = 0.0;    // slope of log norm vs log n on [N/4, N]
  double expected_exponent = 0.0;  // 1/q - 1
  RandomVariable sup_direct;       // atomwise max_n |mean_n|
  RandomVariable sup_identity;     // sum_k |xi_k| / k
  bool identity_exact = false;
  double sup_norm = 0.0;
  double a = 0.0;  // max_k ||xi_k||_(Phi*)
  double C = 1.0;
  bool C_declared = false;
  double bound = 0.0;  // a C (sum k^{-q})^{1/q}
  bool bound_holds = false;
};

inline CesaroReport cesaro_disjoint_bounds(const DisjointFamily& fam, const YoungFunction& phi, double q,
                                           const QEstimateOptions& opts = {}) {
  const Delta2Report rep = detail::require_delta2(phi, opts.delta2);
  detail::require_q(q, rep);
  const YoungFunction phistar = conjugate(phi);
  const std::size_t N = fam.size();
  CesaroReport r;
  r.expected_exponent = 1.0 / q - 1.0;

  RandomVariable partial = RandomVariable::zero(fam.space());
  r.sup_direct = RandomVariable::zero(fam.space());
  r.sup_identity = RandomVariable::zero(fam.space());
  for (std::size_t n = 1; n <= N; ++n) {
    partial += fam[n - 1];
    const RandomVariable mean = partial / static_cast<double>(n);
    r.mean_norms.push_back(dual_orlicz_norm(mean, phi, phistar, opts.norm).value);
    r.sup_direct = r.sup_direct.zip(mean, [](double s, double x) { return std::max(s, std::abs(x)); });
    r.sup_identity += fam[n - 1].abs() / static_cast<double>(n);
    r.a = std::max(r.a, dual_orlicz_norm(fam[n - 1], phi, phistar, opts.norm).value);
  }
  r.identity_exact = r.sup_direct == r.sup_identity;

  if (N >= 4) {
    std::vector<double> lx, ly;
    for (std::size_t n = std::max<std::size_t>(1, N / 4); n <= N; ++n) {
      if (r.mean_norms[n - 1] <= 0.0) continue;
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(r.mean_norms[n - 1]));
    }
    if (lx.size() >= 2) r.fitted_exponent = numeric::least_squares(lx, ly).first;
  }

  r.sup_norm = dual_orlicz_norm(r.sup_identity, phi, phistar, opts.norm).value;
  if (opts.declared_C) {
    r.C = *opts.declared_C;
    r.C_declared = true;
  } else {
    std::vector<RandomVariable> scaled;
    for (std::size_t k = 0; k < N; ++k) scaled.push_back(fam[k].abs() / static_cast<double>(k + 1));
    QEstimateOptions o = opts;
    o.delta2 = rep;
    r.C = std::max(1.0, verify_upper_q_estimate(DisjointFamily(std::move(scaled)), phi, q, o).empirical_C);
  }
  double zeta = 0.0;
  for (std::size_t k = 1; k <= N; ++k) zeta += std::pow(static_cast<double>(k), -q);
  r.bound = r.a * r.C * std::pow(zeta, 1.0 / q);
  r.bound_holds = r.sup_norm <= r.bound * (1.0 + opts.norm.tolerance);
  return r;
}

/// A forward convex combination: weights on members first .. first + weights.size() - 1.
struct WeightRow {
  std::size_t first = 0;
  std::vector<double> weights;

  [[nodiscard]] bool valid_forward(std::size_t n, double tol = 1e-12) const {
    double s = 0.0;
    for (double w : weights) {
      if (w < 0.0) return false;
      s += w;
    }
    return first >= n && std::abs(s - 1.0) <= tol;
  }
};

struct ForwardShift {
  std::vector<RandomVariable> blocks;  // block n-1 = (xi_{n+1} + ... + xi_{2n}) / n
  std::vector<WeightRow> rows;         // zero-based member indices
};

inline ForwardShift forward_convex_shift(std::span<const RandomVariable> members) {
  if (members.size() < 2) fail(ErrorKind::length, "forward blocks need at least 2 members");
  ForwardShift out;
  for (std::size_t n = 1; 2 * n <= members.size(); ++n) {
    RandomVariable s = RandomVariable::zero(members.front().space());
    for (std::size_t k = n; k < 2 * n; ++k) s += members[k];
    out.blocks.push_back(s / static_cast<double>(n));
    out.rows.push_back({n, std::vector<double>(n, 1.0 / static_cast<double>(n))});
  }
  return out;
}

inline ForwardShift forward_convex_shift(const DisjointFamily& fam) { return forward_convex_shift(fam.members()); }

}  // namespace orlicz
