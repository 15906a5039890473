#pragma once

// Candidate sub-interval evaluation, the hot loop of the scheduler.
//
// Two implementations produce the same candidate list: a serial reference that
// applies the containment definition directly (O(N^3) per call), and an OpenMP
// kernel that sweeps each start over packets in deadline order (O(N^2) per call).

#include <cstddef>
#include <span>
#include <vector>

namespace nfsched {

/// A not-yet-scheduled packet with its current (shifted) window.
struct ShiftedPacket {
  int id = 0;
  double bits = 0.0;
  double arrival = 0.0;
  double deadline = 0.0;

  friend bool operator==(const ShiftedPacket&, const ShiftedPacket&) = default;
};

/// A window [start, end] with the total bits and count of packets it fully contains.
struct Candidate {
  double start = 0.0;
  double end = 0.0;
  double bits = 0.0;
  std::size_t members = 0;
  double rate = 0.0;
};

enum class KernelKind { Serial, Parallel };

/// Every (arrival, deadline) window with end > start containing at least one packet,
/// ordered by start then end. Duplicate instants (within kInstantTolerance) are merged.
std::vector<Candidate> evaluate_candidates_serial(std::span<const ShiftedPacket> packets);
std::vector<Candidate> evaluate_candidates_parallel(std::span<const ShiftedPacket> packets);
std::vector<Candidate> evaluate_candidates(std::span<const ShiftedPacket> packets, KernelKind kind);

/// Relative tolerance under which two candidate rates count as equal.
inline constexpr double kRateTieTolerance = 1e-12;

/// Index of the maximum-rate candidate; among rates within kRateTieTolerance of the
/// maximum, the smallest start wins, then the smallest end. Requires a non-empty list.
std::size_t select_best_index(std::span<const Candidate> candidates);

/// Same selection as select_best_index, reduced across OpenMP threads.
std::size_t select_best_index_parallel(std::span<const Candidate> candidates);

}  // namespace nfsched
