#include "nfsched/kernels.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <omp.h>

#include "nfsched/core_model.hpp"
#include "nfsched/error.hpp"

namespace nfsched {

namespace {

std::vector<double> distinct_sorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values) {
    if (out.empty() || v - out.back() > kInstantTolerance) out.push_back(v);
  }
  return out;
}

std::vector<double> starts_of(std::span<const ShiftedPacket> packets) {
  std::vector<double> v;
  v.reserve(packets.size());
  for (const auto& p : packets) v.push_back(p.arrival);
  return distinct_sorted(std::move(v));
}

std::vector<double> ends_of(std::span<const ShiftedPacket> packets) {
  std::vector<double> v;
  v.reserve(packets.size());
  for (const auto& p : packets) v.push_back(p.deadline);
  return distinct_sorted(std::move(v));
}

bool better_position(const Candidate& a, const Candidate& b) {
  if (a.start != b.start) return a.start < b.start;
  return a.end < b.end;
}

}  // namespace

std::vector<Candidate> evaluate_candidates_serial(std::span<const ShiftedPacket> packets) {
  const auto starts = starts_of(packets);
  const auto ends = ends_of(packets);
  std::vector<Candidate> out;
  for (double s : starts) {
    for (double e : ends) {
      if (e - s <= kInstantTolerance) continue;
      Candidate c{s, e, 0.0, 0, 0.0};
      for (const auto& p : packets) {
        if (p.arrival >= s - kInstantTolerance && p.deadline <= e + kInstantTolerance) {
          c.bits += p.bits;
          ++c.members;
        }
      }
      if (c.members == 0) continue;
      c.rate = c.bits / (e - s);
      out.push_back(c);
    }
  }
  return out;
}

std::vector<Candidate> evaluate_candidates_parallel(std::span<const ShiftedPacket> packets) {
  const auto starts = starts_of(packets);
  const auto ends = ends_of(packets);

  std::vector<std::size_t> by_deadline(packets.size());
  std::iota(by_deadline.begin(), by_deadline.end(), std::size_t{0});
  std::sort(by_deadline.begin(), by_deadline.end(), [&](std::size_t a, std::size_t b) {
    if (packets[a].deadline != packets[b].deadline) return packets[a].deadline < packets[b].deadline;
    return a < b;
  });

  const auto n_starts = static_cast<std::ptrdiff_t>(starts.size());
  std::vector<std::vector<Candidate>> per_start(starts.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < n_starts; ++k) {
    const double s = starts[static_cast<std::size_t>(k)];
    auto& row = per_start[static_cast<std::size_t>(k)];
    double bits = 0.0;
    std::size_t members = 0;
    std::size_t cursor = 0;
    for (double e : ends) {
      while (cursor < by_deadline.size() &&
             packets[by_deadline[cursor]].deadline <= e + kInstantTolerance) {
        const auto& p = packets[by_deadline[cursor]];
        if (p.arrival >= s - kInstantTolerance) {
          bits += p.bits;
          ++members;
        }
        ++cursor;
      }
      if (e - s <= kInstantTolerance || members == 0) continue;
      row.push_back({s, e, bits, members, bits / (e - s)});
    }
  }

  std::size_t total = 0;
  for (const auto& row : per_start) total += row.size();
  std::vector<Candidate> out;
  out.reserve(total);
  for (auto& row : per_start) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<Candidate> evaluate_candidates(std::span<const ShiftedPacket> packets, KernelKind kind) {
  return kind == KernelKind::Serial ? evaluate_candidates_serial(packets)
                                    : evaluate_candidates_parallel(packets);
}

std::size_t select_best_index(std::span<const Candidate> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "empty candidate list");
  double max_rate = 0.0;
  for (const auto& c : candidates) max_rate = std::max(max_rate, c.rate);
  const double floor = max_rate * (1.0 - kRateTieTolerance);
  std::size_t best = candidates.size();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (candidates[k].rate < floor) continue;
    if (best == candidates.size() || better_position(candidates[k], candidates[best])) best = k;
  }
  return best;
}

std::size_t select_best_index_parallel(std::span<const Candidate> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "empty candidate list");
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
  double max_rate = 0.0;
#pragma omp parallel for reduction(max : max_rate)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    max_rate = std::max(max_rate, candidates[static_cast<std::size_t>(k)].rate);
  }
  const double floor = max_rate * (1.0 - kRateTieTolerance);

  std::size_t best = candidates.size();
#pragma omp parallel
  {
    std::size_t local = candidates.size();
#pragma omp for nowait
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      if (candidates[idx].rate < floor) continue;
      if (local == candidates.size() || better_position(candidates[idx], candidates[local])) {
        local = idx;
      }
    }
#pragma omp critical
    {
      if (local != candidates.size() &&
          (best == candidates.size() || better_position(candidates[local], candidates[best]))) {
        best = local;
      }
    }
  }
  return best;
}

}  // namespace nfsched
