#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace nfsched {

/// Instants closer than this (seconds) are treated as the same instant.
inline constexpr double kInstantTolerance = 1e-9;

struct Packet {
  int id = 0;
  double bits = 0.0;
  double arrival = 0.0;
  double deadline = 0.0;

  double lifetime() const { return deadline - arrival; }

  friend bool operator==(const Packet&, const Packet&) = default;
};

/// A validated problem instance: packets sorted by arrival, first arrival at 0,
/// ids dense 1..N in sorted order, horizon = latest deadline.
class Instance {
 public:
  Instance() = default;

  /// Wraps packets that are already normalized. Throws MalformedPacket otherwise.
  explicit Instance(std::vector<Packet> packets);

  std::span<const Packet> packets() const { return packets_; }
  const Packet& packet(int id) const { return packets_.at(static_cast<std::size_t>(id - 1)); }
  std::size_t size() const { return packets_.size(); }
  double horizon() const { return horizon_; }

 private:
  std::vector<Packet> packets_;
  double horizon_ = 0.0;
};

struct NormalizedInstance {
  Instance instance;
  /// original_ids[k] is the caller's id for normalized packet k+1.
  std::vector<int> original_ids;
  /// Amount subtracted from every caller time.
  double time_offset = 0.0;
};

/// Sorts by (arrival, deadline, id), shifts the earliest arrival to 0 and renumbers 1..N.
NormalizedInstance normalize_instance(std::span<const Packet> raw_packets);

struct Epoch {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

/// Instant grid, epochs and the containment sets between packets and epochs.
/// Epoch and packet indices in the sets are zero-based (packet id - 1, epoch j - 1).
struct EpochDecomposition {
  std::vector<double> instants;
  std::vector<Epoch> epochs;
  /// For each packet, the epochs inside its life time (ascending, contiguous).
  std::vector<std::vector<std::size_t>> epochs_of_packet;
  /// For each epoch, the packets whose life time covers it (ascending).
  std::vector<std::vector<std::size_t>> packets_of_epoch;

  std::size_t epoch_count() const { return epochs.size(); }
  std::size_t packet_count() const { return epochs_of_packet.size(); }
  bool contains(std::size_t packet, std::size_t epoch) const;
};

EpochDecomposition decompose(const Instance& instance);

/// Ids of packets whose life time sits strictly inside an earlier-arriving packet's life time.
std::set<int> is_non_fifo(const Instance& instance);

/// Ids of packets sharing an arrival instant with another packet.
std::set<int> equal_arrivals(const Instance& instance);

/// Builds the per-epoch packet sets from per-packet epoch sets (or the reverse).
std::vector<std::vector<std::size_t>> transpose_sets(
    const std::vector<std::vector<std::size_t>>& sets, std::size_t target_count);

}  // namespace nfsched
