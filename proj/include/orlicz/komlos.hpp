#pragma once

// Komlos-type extraction with order-bound certificates.
//
// Pipeline for a norm-bounded sequence in L_{Phi*}:
//   1. Kadec-Pelczynski split into a uniformly integrable regular part and
//      disjointly supported singular parts.
//   2. Stabilize the regular part with forward block means until the tail is
//      Cauchy in probability, and read off the limit.
//   3. Select a subsequence of blocks whose deviations have summable modulars,
//      so their sup is in L_{Phi*}.
//   4. Recombine (Cesaro means or forward shifted blocks) and certify the
//      order bound, splitting it into regular and singular contributions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/estimates.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/space.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct RvSequence {
  std::vector<RandomVariable> terms;
  std::optional<double> norm_bound;  // declared sup_n ||xi_n||_{Phi*}
  bool p_convergent = false;
  std::optional<RandomVariable> declared_limit;
  std::string label;

  [[nodiscard]] std::size_t size() const noexcept { return terms.size(); }
  [[nodiscard]] const RandomVariable& operator[](std::size_t n) const { return terms[n]; }
  [[nodiscard]] const SpacePtr& space() const { return terms.front().space(); }

  static RvSequence generate(SpacePtr space, std::size_t n, const std::function<RandomVariable(std::size_t)>& f,
                             std::string label = {}) {
    RvSequence s;
    s.label = std::move(label);
    for (std::size_t i = 1; i <= n; ++i) {
      s.terms.push_back(f(i));
      s.terms.back().require_same_space(RandomVariable::zero(space));
    }
    return s;
  }

  void validate() const {
    if (terms.empty()) fail(ErrorKind::length, "empty sequence");
    for (const auto& t : terms) t.require_same_space(terms.front());
  }
};

struct NormBoundCheck {
  double realized_max = 0.0;
  bool respected = true;
};

inline NormBoundCheck verify_norm_bound(const RvSequence& seq, const YoungFunction& phistar, double tol = 1e-9) {
  NormBoundCheck c;
  for (const auto& t : seq.terms) c.realized_max = std::max(c.realized_max, luxemburg_norm(t, phistar).value);
  if (seq.norm_bound) c.respected = c.realized_max <= *seq.norm_bound * (1.0 + tol);
  return c;
}

// ---------------------------------------------------------------------------
// Splitting

struct KpOptions {
  double spike_level = 4.0;  // floor on the thresholds M_n, in units of Phi*
  std::vector<double> ui_levels = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
};

struct KpSplit {
  std::vector<std::size_t> indices;
  double normalization = 1.0;
  std::vector<double> budgets;
  std::vector<double> thresholds;
  std::vector<std::vector<std::size_t>> disjoint_sets;
  std::vector<RandomVariable> regular;
  std::vector<RandomVariable> singular;
  std::vector<std::pair<double, double>> ui_profile;  // (level, modulus of Phi*(regular))
  std::size_t budget_met = 0;
  bool complete = false;

  [[nodiscard]] bool has_singular() const {
    return std::any_of(disjoint_sets.begin(), disjoint_sets.end(), [](const auto& a) { return !a.empty(); });
  }
};

namespace detail {

// Smallest M with P(v > M) <= budget.
inline double budget_threshold(const std::vector<double>& v, std::span<const double> w, double budget) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  double mass = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double level = v[order[i]];
    double group = 0.0;
    std::size_t j = i;
    for (; j < order.size() && v[order[j]] == level; ++j) group += w[order[j]];
    if (mass + group > budget) return level;
    mass += group;
    i = j;
  }
  return 0.0;
}

inline double min_atom_mass(const DyadicSpace& s) {
  double m = 1.0;
  for (double w : s.weights()) {
    if (w > 0.0) m = std::min(m, w);
  }
  return m;
}

}  // namespace detail

inline KpSplit kp_split(const RvSequence& seq, const YoungFunction& phistar, const KpOptions& opts = {}) {
  seq.validate();
  KpSplit out;
  const auto& space = *seq.space();
  for (const auto& t : seq.terms) out.normalization = std::max(out.normalization, luxemburg_norm(t, phistar).value);
  const double floor_mass = detail::min_atom_mass(space);
  std::vector<bool> taken(space.size(), false);
  std::vector<RandomVariable> ui_family;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const RandomVariable& xi = seq[n];
    std::vector<double> v(xi.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = phistar(xi[i] / out.normalization);
    const double target = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(n + 1, 1000)));
    const double budget = std::max(target, floor_mass);
    const double threshold = std::max(detail::budget_threshold(v, space.weights(), budget), opts.spike_level);
    std::vector<std::size_t> set;
    double mass = 0.0;
    std::vector<double> reg(xi.size()), sing(xi.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      reg[i] = xi[i];
      if (v[i] > threshold) {
        mass += space.weight(i);
        if (!taken[i]) {
          taken[i] = true;
          set.push_back(i);
          sing[i] = xi[i];
          reg[i] = 0.0;
        }
      }
    }
    if (mass <= target) ++out.budget_met;
    out.indices.push_back(n);
    out.budgets.push_back(budget);
    out.thresholds.push_back(threshold);
    out.disjoint_sets.push_back(std::move(set));
    out.regular.emplace_back(xi.space(), std::move(reg));
    out.singular.emplace_back(xi.space(), std::move(sing));
    ui_family.push_back(out.regular.back().map([&](double x) { return phistar(x / out.normalization); }));
  }
  const RandomVariable one = RandomVariable::constant(seq.space(), 1.0);
  for (double level : opts.ui_levels) out.ui_profile.emplace_back(level, ui_modulus(ui_family, one, level));
  out.complete = out.budget_met == seq.size();
  return out;
}

// ---------------------------------------------------------------------------
// Summable subsequence

struct SubsequenceOptions {
  double l0_tol = 0.05;
  std::size_t min_selections = 3;
  std::vector<RandomVariable> pairing_fixtures;  // eta in L_Phi probing weak nullity
  std::optional<YoungFunction> phi;              // the Young function of the fixtures' space
};

struct SubsequenceCertificate {
  bool ok = false;
  std::string reason;
  std::vector<std::size_t> indices;
  std::vector<double> modulars;   // E[Phi*(xi_{n_k})]
  double modular_sum = 0.0;       // sum of the above
  double sup_modular = 0.0;       // E[Phi*(sup_k |xi_{n_k}|)]
  bool certified = false;         // sup_modular <= modular_sum <= 1
  RandomVariable order_bound;
  double order_bound_norm = 0.0;
  double prefix_excess = 0.0;  // max (|limit| - sup |combination|)^+ on the realized prefix
  std::vector<double> l0_trace;
  // weak nullity: |E[eta xi_{n_k}]| <= 2 ||eta||_Phi ||xi_{n_k}||_{Phi*}, and the envelope
  // decays like 2^{-k/p} with p the global growth exponent of Phi* (norm <= modular^{1/p})
  std::vector<std::vector<double>> pairings;
  std::vector<double> envelope;  // ||xi_{n_k}||_{Phi*} bound per selection, before the 2 ||eta|| factor
  double growth_exponent = numeric::kInf;
  bool pairing_null = true;
};

inline SubsequenceCertificate order_bounded_subsequence(std::span<const RandomVariable> terms, const YoungFunction& phistar,
                                                        const SubsequenceOptions& opts = {}) {
  SubsequenceCertificate c;
  if (terms.empty()) {
    c.reason = "empty sequence";
    return c;
  }
  const RandomVariable zero = RandomVariable::zero(terms.front().space());
  for (const auto& t : terms) c.l0_trace.push_back(l0_metric(t, zero));
  const std::size_t n = terms.size();
  const std::size_t quarter = std::max<std::size_t>(1, n / 4);
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < quarter; ++i) head = std::max(head, c.l0_trace[i]);
  for (std::size_t i = n - quarter; i < n; ++i) tail = std::max(tail, c.l0_trace[i]);
  const bool l0_null = c.l0_trace.back() <= opts.l0_tol || tail <= 0.5 * head;

  std::size_t k = 1;
  for (std::size_t i = 0; i < n && k < 1000; ++i) {
    const double m = terms[i].expectation([&](double x) { return phistar(x); });
    if (m <= std::ldexp(1.0, -static_cast<int>(k))) {
      c.indices.push_back(i);
      c.modulars.push_back(m);
      ++k;
    }
  }
  if (!l0_null) {
    c.reason = "terms do not tend to 0 in probability on the prefix";
    return c;
  }
  if (c.indices.size() < opts.min_selections) {
    c.reason = "only " + std::to_string(c.indices.size()) + " terms meet the geometric modular budget";
    return c;
  }
  std::vector<RandomVariable> chosen;
  for (std::size_t i : c.indices) chosen.push_back(terms[i]);
  c.order_bound = sup_abs(chosen);
  for (double m : c.modulars) c.modular_sum += m;
  c.sup_modular = c.order_bound.expectation([&](double x) { return phistar(x); });
  c.certified = c.sup_modular <= c.modular_sum * (1.0 + 1e-12) + 1e-300 && c.modular_sum <= 1.0;
  c.order_bound_norm = luxemburg_norm(c.order_bound, phistar).value;
  if (!opts.pairing_fixtures.empty()) {
    const YoungFunction phi = opts.phi ? *opts.phi : conjugate(phistar);
    const Delta2Report growth = delta2_index(phistar);
    if (growth.is_delta2 && !growth.p_phi_of_x.empty()) c.growth_exponent = growth.p_phi_of_x.front().second;
    for (std::size_t j = 0; j < chosen.size(); ++j) {
      const double norm = luxemburg_norm(chosen[j], phistar).value;
      c.envelope.push_back(std::isfinite(c.growth_exponent)
                               ? std::min(norm, std::pow(c.modulars[j], 1.0 / c.growth_exponent))
                               : norm);
    }
    // without a growth exponent the envelope must at least halve along the selection
    const bool decays = std::isfinite(c.growth_exponent) || c.envelope.back() <= 0.5 * c.envelope.front();
    c.pairing_null = decays;
    for (const auto& eta : opts.pairing_fixtures) {
      const double en = luxemburg_norm(eta, phi).value;
      std::vector<double> row;
      for (std::size_t j = 0; j < chosen.size(); ++j) {
        const double v = pairing(eta, chosen[j]);
        row.push_back(v);
        if (std::abs(v) > 2.0 * en * c.envelope[j] * (1.0 + 1e-9) + 1e-15) c.pairing_null = false;
      }
      c.pairings.push_back(std::move(row));
    }
  }
  c.ok = c.certified;
  if (!c.ok) c.reason = "modular certificate failed";
  return c;
}

inline SubsequenceCertificate order_bounded_subsequence(const RvSequence& seq, const YoungFunction& phistar,
                                                        const SubsequenceOptions& opts = {}) {
  seq.validate();
  return order_bounded_subsequence(std::span<const RandomVariable>(seq.terms), phistar, opts);
}

// ---------------------------------------------------------------------------
// Extraction

enum class KomlosMode { cesaro, forward_convex };

inline std::string to_string(KomlosMode m) { return m == KomlosMode::cesaro ? "cesaro" : "forward_convex"; }

/// Sparse convex weights on original sequence indices (zero-based).
struct Combination {
  std::vector<std::size_t> index;
  std::vector<double> weight;

  [[nodiscard]] bool stochastic(double tol = 1e-12) const {
    double s = 0.0;
    for (double w : weight) {
      if (w < 0.0) return false;
      s += w;
    }
    return std::abs(s - 1.0) <= tol;
  }
  [[nodiscard]] std::size_t first() const { return index.empty() ? 0 : *std::min_element(index.begin(), index.end()); }
};

struct StageRecord {
  std::string stage;
  bool ok;
  std::string detail;
};

struct KomlosOptions {
  KpOptions kp;
  double stabilize_tol = 1e-3;
  std::size_t min_blocks = 4;
  double as_tol = 0.05;
  std::optional<double> declared_C;
  SubsequenceOptions subsequence;
};

struct KomlosCertificate {
  KomlosMode mode = KomlosMode::cesaro;
  bool complete = false;
  std::string failing_stage;
  std::vector<StageRecord> stage_log;

  KpSplit split;
  std::size_t block_length = 0;
  std::vector<std::size_t> indices;  // selected blocks
  bool point_masses = false;
  std::vector<Combination> weights;
  std::vector<RandomVariable> combinations;
  RandomVariable limit;

  RandomVariable order_bound;
  double order_bound_norm = 0.0;
  double prefix_excess = 0.0;  // max (|limit| - sup |combination|)^+ on the realized prefix
  RandomVariable regular_bound;
  double regular_bound_norm = 0.0;
  RandomVariable singular_bound;
  double singular_bound_norm = 0.0;
  bool decomposition_holds = false;
  bool singular_identity_exact = false;
  double singular_a = 0.0;
  double q_used = 1.0;
  double C_used = 1.0;
  double spike_bound = 0.0;
  bool spike_bound_holds = false;

  double subsequence_modular_sum = 0.0;
  double subsequence_sup_modular = 0.0;

  std::vector<double> as_convergence;
  bool as_converged = false;
  bool order_bound_sound = false;
  bool forward_valid = false;
  std::vector<double> pairing_gaps;  // |E[eta combo_final] - E[eta limit]| per fixture

  // unsubsequenced Cesaro means of the raw sequence
  double plain_cesaro_sup_norm = 0.0;
  bool plain_cesaro_within_bound = false;
};

namespace detail {

inline void log_stage(KomlosCertificate& c, std::string stage, bool ok, std::string detail) {
  c.stage_log.push_back({stage, ok, std::move(detail)});
  if (!ok && c.failing_stage.empty()) c.failing_stage = std::move(stage);
}

struct Blocks {
  std::size_t length = 0;
  std::vector<RandomVariable> regular, singular;
  std::vector<std::vector<bool>> mask;  // atoms singular for some member of the block
};

inline Blocks make_blocks(const KpSplit& split, std::size_t L) {
  Blocks b;
  b.length = L;
  const std::size_t m = split.regular.size() / L;
  const auto& space = split.regular.front().space();
  for (std::size_t j = 0; j < m; ++j) {
    RandomVariable r = RandomVariable::zero(space), s = RandomVariable::zero(space);
    std::vector<bool> mask(space->size(), false);
    for (std::size_t n = j * L; n < (j + 1) * L; ++n) {
      r += split.regular[n];
      s += split.singular[n];
      for (std::size_t a : split.disjoint_sets[n]) mask[a] = true;
    }
    b.regular.push_back(r / static_cast<double>(L));
    b.singular.push_back(s / static_cast<double>(L));
    b.mask.push_back(std::move(mask));
  }
  return b;
}

inline double masked_l0(const RandomVariable& a, const RandomVariable& b, const std::vector<bool>& m1,
                        const std::vector<bool>& m2) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!m1[i] && !m2[i]) s += a.weight(i) * std::min(std::abs(a[i] - b[i]), 1.0);
  }
  return s;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline Combination block_weights(std::size_t block, std::size_t L, double w) {
  Combination c;
  for (std::size_t n = block * L; n < (block + 1) * L; ++n) {
    c.index.push_back(n);
    c.weight.push_back(w / static_cast<double>(L));
  }
  return c;
}

inline void append(Combination& into, const Combination& from) {
  into.index.insert(into.index.end(), from.index.begin(), from.index.end());
  into.weight.insert(into.weight.end(), from.weight.begin(), from.weight.end());
}

}  // namespace detail

inline KomlosCertificate komlos_extract(const RvSequence& seq, const YoungFunction& phistar, KomlosMode mode,
                                        const KomlosOptions& opts = {}) {
  seq.validate();
  KomlosCertificate c;
  c.mode = mode;
  const auto& space = seq.space();
  const std::size_t N = seq.size();

  if (seq.norm_bound) {
    const auto nb = verify_norm_bound(seq, phistar);
    detail::log_stage(c, "norm_bound", nb.respected,
                      "realized max " + detail::fmt(nb.realized_max) + " vs declared " + detail::fmt(*seq.norm_bound));
  }

  c.split = kp_split(seq, phistar, opts.kp);
  detail::log_stage(c, "kp_split", true,
                    "probability budget met for " + std::to_string(c.split.budget_met) + " of " + std::to_string(N) +
                        " terms; singular parts " + (c.split.has_singular() ? "present" : "absent"));

  // Stabilization by forward block means of the regular part.
  detail::Blocks blocks;
  bool stable = false;
  double cauchy = numeric::kInf;
  for (std::size_t L = 1; N / L >= opts.min_blocks; L *= 2) {
    blocks = detail::make_blocks(c.split, L);
    const std::size_t m = blocks.regular.size();
    cauchy = 0.0;
    for (std::size_t j = m / 2; j + 1 < m; ++j) {
      cauchy = std::max(cauchy, detail::masked_l0(blocks.regular[j], blocks.regular[m - 1], blocks.mask[j],
                                                  blocks.mask[m - 1]));
    }
    if (cauchy <= opts.stabilize_tol) {
      stable = true;
      break;
    }
  }
  if (!stable) {
    detail::log_stage(c, "stabilize", false,
                      "no block length leaves at least " + std::to_string(opts.min_blocks) +
                          " blocks with a Cauchy tail (last tail l0 " + detail::fmt(cauchy) + ")");
    return c;
  }
  c.block_length = blocks.length;
  const std::size_t m = blocks.regular.size();
  detail::log_stage(c, "stabilize", true,
                    "block length " + std::to_string(blocks.length) + ", " + std::to_string(m) + " blocks, tail l0 " +
                        detail::fmt(cauchy));

  // Limit: atomwise median of the last quarter of regular block means.
  {
    const std::size_t from = m - std::max<std::size_t>(1, m / 4);
    std::vector<double> lim(space->size());
    for (std::size_t a = 0; a < space->size(); ++a) {
      std::vector<double> vals, all;
      for (std::size_t j = from; j < m; ++j) {
        all.push_back(blocks.regular[j][a]);
        if (!blocks.mask[j][a]) vals.push_back(blocks.regular[j][a]);
      }
      lim[a] = detail::median(vals.empty() ? all : vals);
    }
    c.limit = RandomVariable(space, std::move(lim));
  }
  if (seq.p_convergent && seq.declared_limit) {
    const double first = l0_metric(seq.terms.front(), *seq.declared_limit);
    const double last = l0_metric(seq.terms.back(), *seq.declared_limit);
    detail::log_stage(c, "a_priori_convergence", last <= std::max(opts.as_tol, 0.5 * first),
                      "l0 to declared limit " + detail::fmt(first) + " -> " + detail::fmt(last));
  }

  // Deviations off each block's singular atoms, then a summable selection.
  std::vector<RandomVariable> dev;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> d(space->size(), 0.0);
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (!blocks.mask[j][a]) d[a] = blocks.regular[j][a] - c.limit[a];
    }
    dev.emplace_back(space, std::move(d));
  }
  SubsequenceOptions sub = opts.subsequence;
  const SubsequenceCertificate sc = order_bounded_subsequence(std::span<const RandomVariable>(dev), phistar, sub);
  if (!sc.ok) {
    detail::log_stage(c, "order_bounded_subsequence", false, sc.reason);
    return c;
  }
  c.indices = sc.indices;
  c.subsequence_modular_sum = sc.modular_sum;
  c.subsequence_sup_modular = sc.sup_modular;
  detail::log_stage(c, "order_bounded_subsequence", true,
                    std::to_string(sc.indices.size()) + " blocks, E[Phi*(sup)] " + detail::fmt(sc.sup_modular) +
                        " <= " + detail::fmt(sc.modular_sum));

  // Recombination.
  const std::size_t M = c.indices.size();
  std::vector<RandomVariable> Y, Yr, Ys;
  for (std::size_t j : c.indices) {
    Yr.push_back(blocks.regular[j]);
    Ys.push_back(blocks.singular[j]);
    Y.push_back(blocks.regular[j] + blocks.singular[j]);
  }
  c.point_masses = !c.split.has_singular();
  std::vector<RandomVariable> reg_means, sing_means;
  double factor = 1.0;
  if (c.point_masses) {
    for (std::size_t i = 0; i < M; ++i) {
      c.combinations.push_back(Y[i]);
      reg_means.push_back(Yr[i]);
      sing_means.push_back(Ys[i]);
      c.weights.push_back(detail::block_weights(c.indices[i], blocks.length, 1.0));
    }
  } else if (mode == KomlosMode::cesaro) {
    RandomVariable sr = RandomVariable::zero(space), ss = RandomVariable::zero(space);
    Combination row;
    for (std::size_t i = 0; i < M; ++i) {
      sr += Yr[i];
      ss += Ys[i];
      const double n = static_cast<double>(i + 1);
      reg_means.push_back(sr / n);
      sing_means.push_back(ss / n);
      c.combinations.push_back((sr + ss) / n);
      Combination r;
      for (std::size_t t = 0; t <= i; ++t) detail::append(r, detail::block_weights(c.indices[t], blocks.length, 1.0 / n));
      c.weights.push_back(std::move(r));
    }
  } else {
    factor = 2.0;
    for (std::size_t mm = 1; 2 * mm <= M; ++mm) {
      RandomVariable sr = RandomVariable::zero(space), ss = RandomVariable::zero(space);
      Combination r;
      for (std::size_t i = mm; i < 2 * mm; ++i) {
        sr += Yr[i];
        ss += Ys[i];
        detail::append(r, detail::block_weights(c.indices[i], blocks.length, 1.0 / static_cast<double>(mm)));
      }
      reg_means.push_back(sr / static_cast<double>(mm));
      sing_means.push_back(ss / static_cast<double>(mm));
      c.combinations.push_back((sr + ss) / static_cast<double>(mm));
      c.weights.push_back(std::move(r));
    }
  }
  if (c.combinations.empty()) {
    detail::log_stage(c, "recombine", false, "too few selected blocks for a forward combination");
    return c;
  }
  detail::log_stage(c, "recombine", true,
                    std::to_string(c.combinations.size()) + (c.point_masses ? " point masses" : " " + to_string(mode) + " combinations"));

  // Order bound and its decomposition.
  // The limit is dominated by the sup over the whole tail; the prefix sup can undershoot it.
  c.order_bound = sup_abs(std::span<const RandomVariable>(c.combinations));
  for (std::size_t a = 0; a < c.limit.size(); ++a) {
    c.prefix_excess = std::max(c.prefix_excess, std::abs(c.limit[a]) - c.order_bound[a]);
  }
  c.order_bound = lattice_max(c.order_bound, c.limit.abs());
  c.order_bound_norm = luxemburg_norm(c.order_bound, phistar).value;
  c.order_bound_sound = true;
  for (const auto& x : c.combinations) c.order_bound_sound = c.order_bound_sound && OrderInterval(c.order_bound).contains(x);
  {
    // |regular mean| <= |limit| + sup_i |dev_i| off the singular atoms; on them, bound directly.
    std::vector<RandomVariable> chosen_dev;
    for (std::size_t j : c.indices) chosen_dev.push_back(dev[j]);
    RandomVariable off = c.limit.abs() + sup_abs(std::span<const RandomVariable>(chosen_dev));
    std::vector<double> on(space->size(), 0.0);
    for (std::size_t i = 0; i < M; ++i) {
      const auto& mask = blocks.mask[c.indices[i]];
      for (std::size_t a = 0; a < on.size(); ++a) {
        if (mask[a]) on[a] = std::max(on[a], std::abs(Yr[i][a]));
      }
    }
    c.regular_bound = lattice_max(off, RandomVariable(space, std::move(on)));
    c.singular_bound = sup_abs(std::span<const RandomVariable>(sing_means));
    c.regular_bound_norm = luxemburg_norm(c.regular_bound, phistar).value;
    c.singular_bound_norm = luxemburg_norm(c.singular_bound, phistar).value;
    const RandomVariable total = c.regular_bound + c.singular_bound;
    c.decomposition_holds = OrderInterval(total).contains(c.order_bound, 1e-12 * (1.0 + total.sup_abs()));
    if (!c.point_masses && mode == KomlosMode::cesaro && blocks.length == 1) {
      RandomVariable id = RandomVariable::zero(space);
      for (std::size_t i = 0; i < M; ++i) id += Ys[i].abs() / static_cast<double>(i + 1);
      c.singular_identity_exact = id == c.singular_bound;
    }
  }
  // Analytic bound for the singular part through the upper q-estimate of disjoint sums.
  {
    const YoungFunction phi = conjugate(phistar);
    const Delta2Report rep = delta2_index(phi);
    c.q_used = rep.is_delta2 ? rep.q_phi : 1.0;
    std::vector<double> norms;
    for (const auto& s : Ys) {
      const double n = luxemburg_norm(s, phistar).value;
      norms.push_back(n);
      c.singular_a = std::max(c.singular_a, n);
    }
    if (opts.declared_C) {
      c.C_used = *opts.declared_C;
    } else if (c.singular_a > 0.0 && !c.point_masses) {
      double lq = 0.0;
      RandomVariable sum = RandomVariable::zero(space);
      for (std::size_t i = 0; i < M; ++i) {
        sum += Ys[i].abs() / static_cast<double>(i + 1);
        lq += std::pow(norms[i] / static_cast<double>(i + 1), c.q_used);
      }
      lq = std::pow(lq, 1.0 / c.q_used);
      c.C_used = std::max(1.0, lq > 0.0 ? luxemburg_norm(sum, phistar).value / lq : 1.0);
    }
    double zeta = 0.0;
    for (std::size_t i = 1; i <= M; ++i) zeta += std::pow(static_cast<double>(i), -c.q_used);
    c.spike_bound = c.point_masses ? c.singular_bound_norm : factor * c.singular_a * c.C_used * std::pow(zeta, 1.0 / c.q_used);
    c.spike_bound_holds = c.singular_bound_norm <= c.spike_bound * (1.0 + 1e-9) + 1e-300;
  }
  detail::log_stage(c, "order_bound", c.order_bound_sound && c.decomposition_holds && c.spike_bound_holds,
                    "||eta||=" + detail::fmt(c.order_bound_norm) + " regular " + detail::fmt(c.regular_bound_norm) +
                        " singular " + detail::fmt(c.singular_bound_norm) + " <= " + detail::fmt(c.spike_bound));

  // Convergence in probability of the combinations to the limit.
  for (const auto& x : c.combinations) c.as_convergence.push_back(l0_metric(x, c.limit));
  {
    const auto& tr = c.as_convergence;
    const double peak = *std::max_element(tr.begin(), tr.end());
    bool monotone = true;
    for (std::size_t i = tr.size() / 2 + 1; i < tr.size(); ++i) monotone = monotone && tr[i] <= tr[i - 1] + 1e-12;
    c.as_converged = monotone && tr.back() <= std::max(opts.as_tol, 0.5 * peak);
    detail::log_stage(c, "convergence", c.as_converged,
                      "l0 to limit: peak " + detail::fmt(peak) + ", final " + detail::fmt(tr.back()) +
                          (monotone ? ", nonincreasing tail" : ", tail not monotone"));
  }

  c.forward_valid = true;
  for (std::size_t r = 0; r < c.weights.size(); ++r) {
    const bool fwd = mode == KomlosMode::forward_convex || c.point_masses;
    c.forward_valid = c.forward_valid && c.weights[r].stochastic() && (!fwd || c.weights[r].first() >= r);
  }
  if (!c.forward_valid) detail::log_stage(c, "weights", false, "a weight row is not a valid convex combination");

  for (const auto& eta : opts.subsequence.pairing_fixtures) {
    c.pairing_gaps.push_back(std::abs(pairing(eta, c.combinations.back()) - pairing(eta, c.limit)));
  }

  {
    RandomVariable s = RandomVariable::zero(space), sup = RandomVariable::zero(space);
    for (std::size_t n = 0; n < N; ++n) {
      s += seq[n];
      const RandomVariable mean = s / static_cast<double>(n + 1);
      sup = sup.zip(mean, [](double a, double b) { return std::max(a, std::abs(b)); });
    }
    c.plain_cesaro_sup_norm = luxemburg_norm(sup, phistar).value;
    c.plain_cesaro_within_bound = c.plain_cesaro_sup_norm <= c.regular_bound_norm + c.spike_bound;
  }

  c.complete = c.failing_stage.empty();
  return c;
}

// ---------------------------------------------------------------------------
// Obstruction without Delta2

struct ObstructionInstance {
  int resolution = 0;
  RandomVariable zeta0;                  // in B_Phi
  std::vector<RandomVariable> members;   // eta_n 1_{B_n}, each in B_{Phi*}
  std::vector<double> pairings;          // E[zeta0 eta_n 1_{B_n}]
  double eps = 0.0;
};

/// Shells B_n = [4^-n, 2 4^-n) carrying zeta0 = Phi^{-1}(2^n) on B_n, so E[Phi(zeta0)] <= 1,
/// and the dual witnesses eta_n of zeta0 1_{B_n} in the Phi* modular ball.
inline ObstructionInstance obstruction_instance(const YoungFunction& phi, const YoungFunction& phistar, int k) {
  ObstructionInstance inst;
  inst.resolution = k;
  auto space = DyadicSpace::uniform(k);
  const int shells = k / 2;
  if (shells < 1) fail(ErrorKind::resolution, "resolution too coarse for a shell");
  std::vector<double> z(space->size(), 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (int n = 1; n <= shells; ++n) {
    const double lo = std::ldexp(1.0, -2 * n);
    auto [a, b] = space->atoms_of(lo, 2.0 * lo);
    const double c = phi.inverse(std::ldexp(1.0, n));
    for (std::size_t i = a; i < b; ++i) z[i] = c;
    ranges.emplace_back(a, b);
  }
  inst.zeta0 = RandomVariable(space, z);
  inst.eps = numeric::kInf;
  for (auto [a, b] : ranges) {
    std::vector<double> piece(space->size(), 0.0);
    for (std::size_t i = a; i < b; ++i) piece[i] = z[i];
    const RandomVariable x(space, std::move(piece));
    const NormResult r = dual_orlicz_norm(x, phistar, phi);
    inst.members.push_back(*r.witness);
    inst.pairings.push_back(pairing(inst.zeta0, *r.witness));
    inst.eps = std::min(inst.eps, inst.pairings.back());
  }
  return inst;
}

struct ObstructionLevel {
  int resolution = 0;
  std::size_t shells = 0;
  double eps = 0.0;
  double zeta0_modular = 0.0;
  double min_combination_pairing = 0.0;
  bool duality_floor_ok = false;
  bool l0_trend_ok = false;
  std::size_t combinations_tested = 0;
};

struct ObstructionReport {
  bool phi_is_delta2 = false;
  double floor = 0.0;
  bool found = false;
  std::vector<ObstructionLevel> levels;
  std::string verdict;
};

inline ObstructionReport non_delta2_counterexample(const YoungFunction& phi, const std::vector<int>& ladder,
                                                   double floor = 0.25, std::uint64_t seed = 1) {
  if (ladder.empty()) fail(ErrorKind::input, "empty ladder");
  ObstructionReport rep;
  rep.floor = floor;
  rep.phi_is_delta2 = delta2_index(phi).is_delta2;
  const YoungFunction phistar = conjugate(phi);
  std::mt19937_64 rng(seed);
  rep.found = true;
  for (int k : ladder) {
    const ObstructionInstance inst = obstruction_instance(phi, phistar, k);
    ObstructionLevel lv;
    lv.resolution = k;
    lv.shells = inst.members.size();
    lv.eps = inst.eps;
    lv.zeta0_modular = modular(inst.zeta0, phi);
    const std::size_t K = inst.members.size();
    const RandomVariable zero = RandomVariable::zero(inst.zeta0.space());
    // tail masses P(union_{n >= m} B_n)
    std::vector<double> tail(K + 1, 0.0);
    for (std::size_t n = K; n-- > 0;) tail[n] = tail[n + 1] + std::ldexp(1.0, -2 * static_cast<int>(n + 1));
    std::vector<std::pair<std::size_t, RandomVariable>> combos;  // (first index, combination)
    for (std::size_t mm = 0; mm < K; ++mm) combos.emplace_back(mm, inst.members[mm]);
    for (std::size_t mm = 1; 2 * mm <= K; ++mm) {
      RandomVariable s = zero;
      for (std::size_t i = mm; i < 2 * mm; ++i) s += inst.members[i];
      combos.emplace_back(mm, s / static_cast<double>(mm));
    }
    std::exponential_distribution<double> ex(1.0);
    for (std::size_t mm = 0; mm < K; ++mm) {
      for (int rep_i = 0; rep_i < 4; ++rep_i) {
        std::vector<double> w(K - mm);
        double tot = 0.0;
        for (auto& x : w) tot += (x = ex(rng));
        RandomVariable s = zero;
        for (std::size_t i = mm; i < K; ++i) s += inst.members[i] * (w[i - mm] / tot);
        combos.emplace_back(mm, std::move(s));
      }
    }
    lv.min_combination_pairing = numeric::kInf;
    lv.duality_floor_ok = true;
    lv.l0_trend_ok = true;
    for (const auto& [first, x] : combos) {
      const double p = pairing(inst.zeta0, x);
      lv.min_combination_pairing = std::min(lv.min_combination_pairing, p);
      if (p < inst.eps * (1.0 - 1e-12)) lv.duality_floor_ok = false;
      if (l0_metric(x, zero) > tail[first] * (1.0 + 1e-12)) lv.l0_trend_ok = false;
    }
    lv.combinations_tested = combos.size();
    rep.found = rep.found && lv.eps >= floor;
    rep.levels.push_back(lv);
  }
  if (rep.found) {
    rep.verdict = "obstruction certified: eps >= " + detail::fmt(floor) + " on every level";
  } else {
    rep.verdict = "no eps bounded away from 0: smallest " +
                  detail::fmt(std::min_element(rep.levels.begin(), rep.levels.end(), [](auto& a, auto& b) {
                                return a.eps < b.eps;
                              })->eps);
  }
  return rep;
}

}  // namespace orlicz
