#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nfsched/core_model.hpp"
#include "nfsched/kernels.hpp"
#include "nfsched/power_model.hpp"

namespace nfsched {

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A window of the current (shifted) timeline with the packets it contains.
struct SubInterval {
  double start = 0.0;
  double end = 0.0;
  std::vector<int> contained;
  double rate = 0.0;
};

/// One packet transmitting at a constant rate over [start, end] of real time.
struct Segment {
  int packet = 0;
  double start = 0.0;
  double end = 0.0;
  double rate = 0.0;

  double length() const { return end - start; }
};

/// Dense N x M table of per-(packet, epoch) transmission times.
class AllocationTable {
 public:
  AllocationTable() = default;
  AllocationTable(std::size_t packets, std::size_t epochs)
      : rows_(packets), cols_(epochs), data_(packets * epochs, 0.0) {}

  double& operator()(std::size_t packet, std::size_t epoch) { return data_[packet * cols_ + epoch]; }
  double operator()(std::size_t packet, std::size_t epoch) const {
    return data_[packet * cols_ + epoch];
  }
  std::size_t packets() const { return rows_; }
  std::size_t epochs() const { return cols_; }
  double row_sum(std::size_t packet) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// The part of real time still unassigned, as ascending disjoint pieces. Shifted time x
/// is the point at cumulative length x along the pieces.
class TimeMap {
 public:
  TimeMap() = default;
  explicit TimeMap(std::vector<Interval> pieces);
  static TimeMap identity(double horizon) { return TimeMap({{0.0, horizon}}); }

  std::span<const Interval> pieces() const { return pieces_; }
  double length() const;

  /// Real-time pieces that shifted [a, b] maps onto. Throws InconsistentTrace if
  /// [a, b] reaches outside [0, length()].
  std::vector<Interval> image(double a, double b) const;
  /// The map left after deleting shifted [a, b].
  TimeMap without(double a, double b) const;

 private:
  std::vector<Interval> pieces_;
};

struct IterationRecord {
  SubInterval chosen;               // in the shifted timeline of this iteration
  std::vector<Interval> pieces;     // chosen window mapped back to real time
  TimeMap map_before;               // timeline in effect when the window was chosen
  std::size_t candidates = 0;       // candidate windows examined
  std::size_t active_packets = 0;
};

struct IterationTrace {
  std::vector<IterationRecord> iterations;
};

struct Schedule {
  std::vector<double> rates;       // index = packet id - 1
  AllocationTable tau;
  std::vector<Segment> segments;   // ascending by start; may be empty for tau-only schedules
  double energy = 0.0;
  std::optional<IterationTrace> trace;
};

/// All candidate windows over the given packets, each with its contained set.
std::vector<SubInterval> enumerate_subintervals(std::span<const ShiftedPacket> active);

/// Maximum-rate window; near-equal rates resolve to the smallest start, then end.
SubInterval select_max_rate(std::span<const SubInterval> candidates);

/// Ids of packets whose window lies inside [start, end].
std::vector<int> contained_packets(std::span<const ShiftedPacket> active, double start, double end);

/// Deletes the window [start, end] from the timeline of the remaining packets:
/// instants before it stay, instants inside clamp to start, later ones move back by its length.
std::vector<ShiftedPacket> shift_out(Interval window, std::span<const ShiftedPacket> packets);

/// Maps a shifted interval of iteration `iteration` (zero-based) back to real time.
std::vector<Interval> unshift(const IterationTrace& trace, std::size_t iteration, Interval shifted);

/// Earliest-deadline-first over the given real-time pieces, every member at `rate`.
/// Throws InternalIdle / InternalDeadlineMiss if the pieces cannot be filled exactly.
std::vector<Segment> edf_fill(std::span<const Interval> pieces, std::span<const Packet> members,
                              double rate);

struct SolveOptions {
  KernelKind kernel = KernelKind::Parallel;
};

/// The energy-optimal schedule: repeatedly pick the densest window, fill it by EDF at its
/// rate, delete it from the timeline, until every packet is placed.
Schedule solve(const Instance& instance, const PowerModel& model, SolveOptions options = {});

/// Intersects segments with the epoch grid. Time falling outside a packet's epochs is dropped.
AllocationTable tau_from_segments(const EpochDecomposition& decomposition,
                                  std::span<const Segment> segments);

/// Lays a tau table out on the timeline (packets in id order inside each epoch) with
/// per-packet rates B_i / sum_j tau_ij, and computes the energy.
Schedule schedule_from_tau(const Instance& instance, const EpochDecomposition& decomposition,
                           const PowerModel& model, AllocationTable tau);

/// Sum of time * f(rate) over packets, using time = B_i / r_i.
double energy_of_rates(const Instance& instance, const PowerModel& model,
                       std::span<const double> rates);

}  // namespace nfsched
