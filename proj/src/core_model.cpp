#include "nfsched/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "nfsched/error.hpp"

namespace nfsched {

namespace {

void check_packet(const Packet& p) {
  const std::string who = "packet " + std::to_string(p.id);
  if (!std::isfinite(p.bits) || !std::isfinite(p.arrival) || !std::isfinite(p.deadline)) {
    throw Error(ErrorCode::MalformedPacket, who + " has a non-finite field");
  }
  if (p.id < 1) throw Error(ErrorCode::MalformedPacket, who + " has id < 1");
  if (p.bits <= 0.0) throw Error(ErrorCode::MalformedPacket, who + " has bits <= 0");
  if (p.arrival < 0.0) throw Error(ErrorCode::MalformedPacket, who + " has a negative arrival");
  if (p.deadline <= p.arrival) {
    throw Error(ErrorCode::MalformedPacket, who + " has deadline <= arrival");
  }
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInstance: return "EmptyInstance";
    case ErrorCode::MalformedPacket: return "MalformedPacket";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::BracketOverflow: return "BracketOverflow";
    case ErrorCode::ZeroRate: return "ZeroRate";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::InconsistentTrace: return "InconsistentTrace";
    case ErrorCode::InternalIdle: return "InternalIdle";
    case ErrorCode::InternalDeadlineMiss: return "InternalDeadlineMiss";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InfeasibleInput: return "InfeasibleInput";
    case ErrorCode::NotOptimal: return "NotOptimal";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

bool is_internal(ErrorCode code) {
  switch (code) {
    case ErrorCode::InconsistentTrace:
    case ErrorCode::InternalIdle:
    case ErrorCode::InternalDeadlineMiss:
    case ErrorCode::BracketOverflow:
      return true;
    default:
      return false;
  }
}

Instance::Instance(std::vector<Packet> packets) : packets_(std::move(packets)) {
  if (packets_.empty()) throw Error(ErrorCode::EmptyInstance, "no packets");
  for (std::size_t k = 0; k < packets_.size(); ++k) {
    const Packet& p = packets_[k];
    check_packet(p);
    if (p.id != static_cast<int>(k + 1)) {
      throw Error(ErrorCode::MalformedPacket,
                  "packet " + std::to_string(p.id) + " is not numbered densely in arrival order");
    }
    if (k > 0 && p.arrival < packets_[k - 1].arrival) {
      throw Error(ErrorCode::MalformedPacket,
                  "packet " + std::to_string(p.id) + " arrives before its predecessor");
    }
    horizon_ = std::max(horizon_, p.deadline);
  }
  if (packets_.front().arrival != 0.0) {
    throw Error(ErrorCode::MalformedPacket, "first arrival is not at instant 0");
  }
}

NormalizedInstance normalize_instance(std::span<const Packet> raw_packets) {
  if (raw_packets.empty()) throw Error(ErrorCode::EmptyInstance, "no packets");
  std::unordered_set<int> seen;
  for (const Packet& p : raw_packets) {
    check_packet(p);
    if (!seen.insert(p.id).second) {
      throw Error(ErrorCode::MalformedPacket, "packet " + std::to_string(p.id) + " id repeated");
    }
  }

  std::vector<Packet> sorted(raw_packets.begin(), raw_packets.end());
  std::sort(sorted.begin(), sorted.end(), [](const Packet& a, const Packet& b) {
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    if (a.deadline != b.deadline) return a.deadline < b.deadline;
    return a.id < b.id;
  });

  NormalizedInstance out;
  out.time_offset = sorted.front().arrival;
  out.original_ids.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    Packet& p = sorted[k];
    out.original_ids.push_back(p.id);
    p.id = static_cast<int>(k + 1);
    p.arrival -= out.time_offset;
    p.deadline -= out.time_offset;
  }
  out.instance = Instance(std::move(sorted));
  return out;
}

bool EpochDecomposition::contains(std::size_t packet, std::size_t epoch) const {
  const auto& run = epochs_of_packet.at(packet);
  return std::binary_search(run.begin(), run.end(), epoch);
}

EpochDecomposition decompose(const Instance& instance) {
  EpochDecomposition d;
  std::vector<double> raw;
  raw.reserve(2 * instance.size());
  for (const Packet& p : instance.packets()) {
    raw.push_back(p.arrival);
    raw.push_back(p.deadline);
  }
  std::sort(raw.begin(), raw.end());
  for (double t : raw) {
    if (d.instants.empty() || t - d.instants.back() > kInstantTolerance) d.instants.push_back(t);
  }
  // Merged clusters keep their first member; pin the ends to the exact bounds.
  d.instants.front() = 0.0;
  d.instants.back() = instance.horizon();

  for (std::size_t j = 1; j < d.instants.size(); ++j) {
    d.epochs.push_back({d.instants[j - 1], d.instants[j]});
  }

  d.epochs_of_packet.resize(instance.size());
  for (const Packet& p : instance.packets()) {
    auto& run = d.epochs_of_packet[static_cast<std::size_t>(p.id - 1)];
    for (std::size_t j = 0; j < d.epochs.size(); ++j) {
      const Epoch& e = d.epochs[j];
      if (e.start >= p.arrival - kInstantTolerance && e.end <= p.deadline + kInstantTolerance) {
        run.push_back(j);
      }
    }
  }
  d.packets_of_epoch = transpose_sets(d.epochs_of_packet, d.epochs.size());
  return d;
}

std::vector<std::vector<std::size_t>> transpose_sets(
    const std::vector<std::vector<std::size_t>>& sets, std::size_t target_count) {
  std::vector<std::vector<std::size_t>> out(target_count);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j : sets[i]) out.at(j).push_back(i);
  }
  return out;
}

std::set<int> is_non_fifo(const Instance& instance) {
  std::set<int> ids;
  const auto packets = instance.packets();
  for (const Packet& inner : packets) {
    for (const Packet& outer : packets) {
      if (outer.arrival < inner.arrival && inner.deadline < outer.deadline) {
        ids.insert(inner.id);
        break;
      }
    }
  }
  return ids;
}

std::set<int> equal_arrivals(const Instance& instance) {
  std::set<int> ids;
  const auto packets = instance.packets();
  for (std::size_t k = 1; k < packets.size(); ++k) {
    if (packets[k].arrival - packets[k - 1].arrival <= kInstantTolerance) {
      ids.insert(packets[k - 1].id);
      ids.insert(packets[k].id);
    }
  }
  return ids;
}

}  // namespace nfsched
