#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nfsched/core_model.hpp"
#include "nfsched/power_model.hpp"
#include "nfsched/scheduler.hpp"

namespace nfsched {

struct GeneratorConfig {
  std::size_t n = 10;
  double horizon = 10.0;       // arrivals are drawn in [0, horizon)
  std::uint64_t seed = 1;
  double non_fifo_prob = 0.3;  // chance a packet is nested inside an earlier one
  double bits_min = 0.5;
  double bits_max = 2.0;
};

/// Deterministic random instance. The random source is std::mt19937_64 (bit-exact across
/// platforms) and uniforms are taken as the top 53 bits of each draw, so no
/// implementation-defined distribution is involved.
Instance generate(const GeneratorConfig& config);

/// Constant-rate EDF-priority baseline. Packets are taken by deadline; each claims the
/// free time left in its life time and sends at B_i over that time. If some packet would
/// find no free time, every packet instead claims the earliest share of its free time
/// proportional to its bits against later overlapping packets, which raises rates but
/// always leaves room. Feasible, generally not optimal, and carries no trace.
Schedule baseline_constant_edf(const Instance& instance, const PowerModel& model);

struct BenchRow {
  std::size_t n = 0;
  double seconds = 0.0;
  std::size_t iterations = 0;
  std::size_t max_candidates = 0;    // largest per-iteration candidate count
  std::size_t total_candidates = 0;
  bool bounds_ok = true;             // iterations <= n and every count <= n^2
};

std::vector<BenchRow> bench_complexity(std::span<const std::size_t> sizes, std::uint64_t seed,
                                       KernelKind kernel = KernelKind::Parallel);

}  // namespace nfsched
