#pragma once

// Finite dyadic probability spaces and random variables on them.
//
// A DyadicSpace of resolution k partitions [0,1) into the 2^k intervals
// [i 2^-k, (i+1) 2^-k). Uniform weights are exact powers of two, so
// expectations of dyadic step functions are computed without weight rounding.
// Refinement splits every atom in half; it is the stand-in for an atomless
// space used by all asymptotic checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/error.hpp"

namespace orlicz {

namespace detail {

// Pairwise sum of term(i) over [lo, hi). On 2^k atoms the tree is aligned with
// refinement, so a refined step function sums to the bit-identical value.
template <class Term>
double pairwise_sum(Term&& term, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return term(lo);
  if (hi == lo) return 0.0;
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(term, lo, mid) + pairwise_sum(term, mid, hi);
}

}  // namespace detail

class DyadicSpace;
using SpacePtr = std::shared_ptr<const DyadicSpace>;

class DyadicSpace {
 public:
  static constexpr int kMaxResolution = 24;

  static SpacePtr uniform(int resolution) {
    check_resolution(resolution);
    const std::size_t n = std::size_t{1} << resolution;
    return SpacePtr(new DyadicSpace(resolution, std::vector<double>(n, std::ldexp(1.0, -resolution)), true));
  }

  static SpacePtr weighted(int resolution, std::vector<double> weights) {
    check_resolution(resolution);
    const std::size_t n = std::size_t{1} << resolution;
    if (weights.size() != n) {
      fail(ErrorKind::shape, "weight vector has " + std::to_string(weights.size()) + " entries, expected " +
                                 std::to_string(n));
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::invariant_violation, "atom weights must be finite and nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) fail(ErrorKind::invariant_violation, "atom weights must sum to 1");
    return SpacePtr(new DyadicSpace(resolution, std::move(weights), false));
  }

  [[nodiscard]] int resolution() const noexcept { return resolution_; }
  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] double weight(std::size_t atom) const { return weights_.at(atom); }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] bool is_uniform() const noexcept { return uniform_; }

  /// The space at resolution k+levels; each atom's weight is split evenly.
  [[nodiscard]] SpacePtr refined(int levels) const {
    if (levels < 0) fail(ErrorKind::input, "refinement levels must be nonnegative");
    if (uniform_) return uniform(resolution_ + levels);
    check_resolution(resolution_ + levels);
    const std::size_t factor = std::size_t{1} << levels;
    std::vector<double> w;
    w.reserve(size() * factor);
    for (double x : weights_) {
      for (std::size_t j = 0; j < factor; ++j) w.push_back(std::ldexp(x, -levels));
    }
    return SpacePtr(new DyadicSpace(resolution_ + levels, std::move(w), false));
  }

  [[nodiscard]] bool same_as(const DyadicSpace& other) const noexcept {
    if (this == &other) return true;
    return resolution_ == other.resolution_ && weights_ == other.weights_;
  }

  /// Atom index range [first, last) covering the dyadic interval [lo, hi).
  [[nodiscard]] std::pair<std::size_t, std::size_t> atoms_of(double lo, double hi) const {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) fail(ErrorKind::input, "interval must lie in [0,1]");
    const double n = static_cast<double>(size());
    const double a = lo * n;
    const double b = hi * n;
    if (a != std::floor(a) || b != std::floor(b)) {
      fail(ErrorKind::resolution, "interval endpoints are not multiples of 2^-" + std::to_string(resolution_));
    }
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
  }

 private:
  DyadicSpace(int resolution, std::vector<double> weights, bool uniform)
      : resolution_(resolution), weights_(std::move(weights)), uniform_(uniform) {}

  static void check_resolution(int resolution) {
    if (resolution < 0 || resolution > kMaxResolution) {
      fail(ErrorKind::input, "resolution must be in [0, " + std::to_string(kMaxResolution) + "]");
    }
  }

  int resolution_;
  std::vector<double> weights_;
  bool uniform_;
};

/// One real value per atom of a shared, immutable DyadicSpace.
class RandomVariable {
 public:
  RandomVariable() = default;

  RandomVariable(SpacePtr space, std::vector<double> values) : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) fail(ErrorKind::input, "random variable needs a space");
    if (values_.size() != space_->size()) {
      fail(ErrorKind::shape, "value vector has " + std::to_string(values_.size()) + " entries, space has " +
                                 std::to_string(space_->size()) + " atoms");
    }
  }

  static RandomVariable constant(SpacePtr space, double c) {
    const std::size_t n = space->size();
    return {std::move(space), std::vector<double>(n, c)};
  }
  static RandomVariable zero(SpacePtr space) { return constant(std::move(space), 0.0); }

  /// c * 1_{[lo,hi)} for a dyadic interval.
  static RandomVariable interval_indicator(SpacePtr space, double lo, double hi, double c = 1.0) {
    auto [a, b] = space->atoms_of(lo, hi);
    std::vector<double> v(space->size(), 0.0);
    for (std::size_t i = a; i < b; ++i) v[i] = c;
    return {std::move(space), std::move(v)};
  }

  [[nodiscard]] bool empty() const noexcept { return !space_; }
  [[nodiscard]] const SpacePtr& space() const noexcept { return space_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double weight(std::size_t i) const { return space_->weight(i); }

  [[nodiscard]] bool compatible(const RandomVariable& other) const noexcept {
    return space_ && other.space_ && space_->same_as(*other.space_);
  }

  [[nodiscard]] RandomVariable map(const std::function<double(double)>& f) const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), f);
    return {space_, std::move(v)};
  }

  [[nodiscard]] RandomVariable zip(const RandomVariable& other, const std::function<double(double, double)>& f) const {
    require_same_space(other);
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i], other.values_[i]);
    return {space_, std::move(v)};
  }

  [[nodiscard]] double expectation() const {
    return detail::pairwise_sum([&](std::size_t i) { return space_->weight(i) * values_[i]; }, 0, values_.size());
  }

  template <class F>
  [[nodiscard]] double expectation(F&& f) const {
    return detail::pairwise_sum(
        [&](std::size_t i) {
          const double w = space_->weight(i);
          return w != 0.0 ? w * f(values_[i]) : 0.0;
        },
        0, values_.size());
  }

  [[nodiscard]] double sup_abs() const {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
  }

  [[nodiscard]] bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
  }

  [[nodiscard]] RandomVariable abs() const {
    return map([](double x) { return std::abs(x); });
  }
  [[nodiscard]] RandomVariable positive_part() const {
    return map([](double x) { return std::max(x, 0.0); });
  }
  [[nodiscard]] RandomVariable negative_part() const {
    return map([](double x) { return std::max(-x, 0.0); });
  }

  /// Step function re-expressed at resolution k+levels.
  [[nodiscard]] RandomVariable refine(int levels) const {
    if (levels == 0) return *this;
    auto fine = space_->refined(levels);
    const std::size_t factor = std::size_t{1} << levels;
    std::vector<double> v;
    v.reserve(values_.size() * factor);
    for (double x : values_) v.insert(v.end(), factor, x);
    return {std::move(fine), std::move(v)};
  }

  void require_same_space(const RandomVariable& other) const {
    if (!compatible(other)) fail(ErrorKind::shape, "random variables live on different spaces");
  }

  RandomVariable& operator+=(const RandomVariable& o) {
    require_same_space(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  RandomVariable& operator-=(const RandomVariable& o) {
    require_same_space(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  RandomVariable& operator*=(double c) {
    for (double& x : values_) x *= c;
    return *this;
  }
  RandomVariable& operator/=(double c) {
    for (double& x : values_) x /= c;
    return *this;
  }
  RandomVariable& operator+=(double c) {
    for (double& x : values_) x += c;
    return *this;
  }

  friend RandomVariable operator+(RandomVariable a, const RandomVariable& b) { return a += b; }
  friend RandomVariable operator-(RandomVariable a, const RandomVariable& b) { return a -= b; }
  friend RandomVariable operator*(RandomVariable a, double c) { return a *= c; }
  friend RandomVariable operator*(double c, RandomVariable a) { return a *= c; }
  friend RandomVariable operator/(RandomVariable a, double c) { return a /= c; }
  friend RandomVariable operator+(RandomVariable a, double c) { return a += c; }
  friend RandomVariable operator-(RandomVariable a, double c) { return a += -c; }
  friend RandomVariable operator-(RandomVariable a) { return a *= -1.0; }

  friend bool operator==(const RandomVariable& a, const RandomVariable& b) {
    return a.compatible(b) && a.values_ == b.values_;
  }

 private:
  SpacePtr space_;
  std::vector<double> values_;
};

[[nodiscard]] inline RandomVariable hadamard(const RandomVariable& a, const RandomVariable& b) {
  return a.zip(b, [](double x, double y) { return x * y; });
}
[[nodiscard]] inline RandomVariable lattice_max(const RandomVariable& a, const RandomVariable& b) {
  return a.zip(b, [](double x, double y) { return std::max(x, y); });
}
[[nodiscard]] inline RandomVariable lattice_min(const RandomVariable& a, const RandomVariable& b) {
  return a.zip(b, [](double x, double y) { return std::min(x, y); });
}

/// Atomwise sup of |xi| over a nonempty family.
[[nodiscard]] inline RandomVariable sup_abs(std::span<const RandomVariable> family) {
  if (family.empty()) fail(ErrorKind::domain, "sup over an empty family");
  RandomVariable out = family.front().abs();
  for (std::size_t k = 1; k < family.size(); ++k) {
    out = out.zip(family[k], [](double s, double x) { return std::max(s, std::abs(x)); });
  }
  return out;
}

[[nodiscard]] inline double pairing(const RandomVariable& a, const RandomVariable& b) {
  a.require_same_space(b);
  return detail::pairwise_sum([&](std::size_t i) { return a.weight(i) * a[i] * b[i]; }, 0, a.size());
}

/// Restriction xi * 1_S for a set of atom indices.
[[nodiscard]] inline RandomVariable restrict_to(const RandomVariable& xi, std::span<const std::size_t> atoms) {
  std::vector<double> v(xi.size(), 0.0);
  for (std::size_t a : atoms) v.at(a) = xi[a];
  return {xi.space(), std::move(v)};
}

/// Atoms where xi is nonzero.
[[nodiscard]] inline std::vector<std::size_t> support(const RandomVariable& xi) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (xi[i] != 0.0) s.push_back(i);
  }
  return s;
}

[[nodiscard]] inline double probability(const SpacePtr& space, std::span<const std::size_t> atoms) {
  double p = 0.0;
  for (std::size_t a : atoms) p += space->weight(a);
  return p;
}

/// E[|xi - eta| ^ 1]: the metric of convergence in probability.
[[nodiscard]] inline double l0_metric(const RandomVariable& xi, const RandomVariable& eta) {
  xi.require_same_space(eta);
  return detail::pairwise_sum(
      [&](std::size_t i) { return xi.weight(i) * std::min(std::abs(xi[i] - eta[i]), 1.0); }, 0, xi.size());
}

/// sup over the family of E[|eta xi| 1_{|eta xi| > level}].
[[nodiscard]] inline double ui_modulus(std::span<const RandomVariable> family, const RandomVariable& xi, double level) {
  if (family.empty()) fail(ErrorKind::domain, "uniform integrability modulus of an empty family");
  double worst = 0.0;
  for (const auto& eta : family) {
    eta.require_same_space(xi);
    double s = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
      const double v = std::abs(eta[i] * xi[i]);
      if (v > level) s += xi.weight(i) * v;
    }
    worst = std::max(worst, s);
  }
  return worst;
}

/// Brings a family to the finest resolution among its members.
[[nodiscard]] inline std::vector<RandomVariable> common_refinement(std::span<const RandomVariable> family) {
  int finest = 0;
  for (const auto& x : family) finest = std::max(finest, x.space()->resolution());
  std::vector<RandomVariable> out;
  out.reserve(family.size());
  for (const auto& x : family) out.push_back(x.refine(finest - x.space()->resolution()));
  for (std::size_t k = 1; k < out.size(); ++k) out[k].require_same_space(out.front());
  return out;
}

/// The order interval [-zeta, zeta] for zeta >= 0.
class OrderInterval {
 public:
  explicit OrderInterval(RandomVariable zeta) : zeta_(std::move(zeta)) {
    for (double z : zeta_.values()) {
      if (z < 0.0) fail(ErrorKind::invariant_violation, "order interval needs a nonnegative bound");
    }
  }

  [[nodiscard]] const RandomVariable& bound() const noexcept { return zeta_; }

  [[nodiscard]] bool contains(const RandomVariable& xi, double tol = 0.0) const {
    xi.require_same_space(zeta_);
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (std::abs(xi[i]) > zeta_[i] + tol) return false;
    }
    return true;
  }

 private:
  RandomVariable zeta_;
};

}  // namespace orlicz
