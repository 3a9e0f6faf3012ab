// Bounded noise converging to b, plus one unit-L2 spike per term. Cesaro and
// forward extraction both recover b; the order bound stays in L2.

#include <cmath>
#include <cstdio>
#include <random>

#include "orlicz/orlicz.hpp"

using namespace orlicz;

int main(int argc, char** argv) {
  const int k = argc > 1 ? std::atoi(argv[1]) : 10;
  const std::size_t terms = std::size_t{1} << (k - 1);
  auto space = DyadicSpace::uniform(k);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> bv(space->size()), zv(space->size());
  for (auto& x : bv) x = d(rng);
  for (auto& x : zv) x = d(rng);
  const RandomVariable b(space, bv), z(space, zv);
  const double spike = std::sqrt(static_cast<double>(space->size()));
  const auto seq = RvSequence::generate(space, terms, [&](std::size_t n) {
    std::vector<double> v(space->size(), 0.0);
    v[2 * (n - 1)] = spike;
    return b + z * std::ldexp(1.0, -static_cast<int>(n)) + RandomVariable(space, std::move(v));
  });
  const auto l2 = young::quadratic(1.0);
  std::printf("%zu terms on 2^%d atoms, spike height %.1f\n", terms, k, spike);
  for (auto mode : {KomlosMode::cesaro, KomlosMode::forward_convex}) {
    const auto c = komlos_extract(seq, l2, mode);
    std::printf("\n%s: %s\n", to_string(mode).c_str(), c.complete ? "complete" : ("stopped at " + c.failing_stage).c_str());
    for (const auto& s : c.stage_log) std::printf("  %-26s %s  %s\n", s.stage.c_str(), s.ok ? "ok  " : "FAIL", s.detail.c_str());
    if (c.combinations.empty()) continue;
    std::printf("  max |limit - b|      %.3g\n", (c.limit - b).sup_abs());
    std::printf("  ||order bound||_2    %.6f  (regular %.6f, singular %.6f)\n", c.order_bound_norm, c.regular_bound_norm,
                c.singular_bound_norm);
    std::printf("  spike bound          %.6f  (q = %.3g)\n", c.spike_bound, c.q_used);
    std::printf("  plain Cesaro sup     %.6f\n", c.plain_cesaro_sup_norm);
  }
}
