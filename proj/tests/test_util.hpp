#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nfsched/core_model.hpp"
#include "nfsched/harness.hpp"

namespace nfsched::test {

inline Instance make_instance(std::vector<Packet> packets) {
  return normalize_instance(packets).instance;
}

/// P1(2 bits, [0, 2]), P2(1 bit, [0.5, 1]).
inline Instance nested_instance() {
  return make_instance({{1, 2.0, 0.0, 2.0}, {2, 1.0, 0.5, 1.0}});
}

inline Instance single_instance() { return make_instance({{1, 1.0, 0.0, 1.0}}); }

/// Worked-example energy under shannon(noise 1): P2 at rate 2 for 0.5 s, P1 at 4/3 for 1.5 s.
inline double nested_energy() { return 0.5 * 15.0 + 1.5 * (std::pow(2.0, 8.0 / 3.0) - 1.0); }

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Seeded random instance with sizes drawn in [n_min, n_max]. The horizon is 2n, or
/// horizon_base + n when given.
inline Instance random_instance(std::uint64_t seed, std::size_t n_min, std::size_t n_max,
                                double non_fifo_prob, double horizon_base = 0.0) {
  std::mt19937_64 pick(seed * 7919 + 17);
  GeneratorConfig cfg;
  cfg.n = n_min + static_cast<std::size_t>(pick() % (n_max - n_min + 1));
  cfg.horizon = horizon_base > 0.0 ? horizon_base + static_cast<double>(cfg.n)
                                    : 2.0 * static_cast<double>(cfg.n);
  cfg.seed = seed;
  cfg.non_fifo_prob = non_fifo_prob;
  return generate(cfg);
}

}  // namespace nfsched::test
