#include "nfsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nfsched/error.hpp"

namespace nfsched {

namespace {

double time_scale(double horizon) { return std::max(1.0, std::abs(horizon)); }

// Pieces shorter than this fraction of the time scale are float residue, not time.
constexpr double kSliverFraction = 1e-12;
// Slack allowed when EDF finishes a packet just past a boundary.
constexpr double kEdfFraction = 1e-9;

}  // namespace

double AllocationTable::row_sum(std::size_t packet) const {
  double s = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) s += (*this)(packet, j);
  return s;
}

// ---------------------------------------------------------------------------
// TimeMap

TimeMap::TimeMap(std::vector<Interval> pieces) : pieces_(std::move(pieces)) {}

double TimeMap::length() const {
  double total = 0.0;
  for (const auto& p : pieces_) total += p.length();
  return total;
}

std::vector<Interval> TimeMap::image(double a, double b) const {
  const double scale = time_scale(pieces_.empty() ? 1.0 : pieces_.back().end);
  const double total = length();
  const double slack = kEdfFraction * scale;
  if (a < -slack || b > total + slack || b < a) {
    throw Error(ErrorCode::InconsistentTrace,
                "shifted interval [" + std::to_string(a) + ", " + std::to_string(b) +
                    "] outside mapped length " + std::to_string(total));
  }
  const double sliver = kSliverFraction * scale;
  std::vector<Interval> out;
  double offset = 0.0;
  for (const auto& piece : pieces_) {
    const double lo = std::max(a, offset);
    const double hi = std::min(b, offset + piece.length());
    if (hi - lo > sliver) {
      out.push_back({piece.start + (lo - offset), std::min(piece.end, piece.start + (hi - offset))});
    }
    offset += piece.length();
  }
  // Snap the final piece onto its real end when the window runs to the end of the map.
  if (!out.empty() && b >= total - sliver) out.back().end = pieces_.back().end;
  return out;
}

TimeMap TimeMap::without(double a, double b) const {
  const double sliver = kSliverFraction * time_scale(pieces_.empty() ? 1.0 : pieces_.back().end);
  std::vector<Interval> kept;
  double offset = 0.0;
  for (const auto& piece : pieces_) {
    const double len = piece.length();
    // Part before a.
    const double before = std::min(len, a - offset);
    if (before > sliver) kept.push_back({piece.start, piece.start + before});
    // Part after b.
    const double skip = std::max(0.0, b - offset);
    if (len - skip > sliver) kept.push_back({piece.start + skip, piece.end});
    offset += len;
  }
  return TimeMap(std::move(kept));
}

// ---------------------------------------------------------------------------
// Candidate windows

std::vector<int> contained_packets(std::span<const ShiftedPacket> active, double start, double end) {
  std::vector<int> ids;
  for (const auto& p : active) {
    if (p.arrival >= start - kInstantTolerance && p.deadline <= end + kInstantTolerance) {
      ids.push_back(p.id);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<SubInterval> enumerate_subintervals(std::span<const ShiftedPacket> active) {
  const auto candidates = evaluate_candidates_serial(active);
  std::vector<SubInterval> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.push_back({c.start, c.end, contained_packets(active, c.start, c.end), c.rate});
  }
  return out;
}

SubInterval select_max_rate(std::span<const SubInterval> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "no sub-intervals to choose from");
  std::vector<Candidate> flat;
  flat.reserve(candidates.size());
  for (const auto& s : candidates) flat.push_back({s.start, s.end, 0.0, s.contained.size(), s.rate});
  return candidates[select_best_index(flat)];
}

// ---------------------------------------------------------------------------
// Time shifting

namespace {

double shift_instant(double t, double a, double d) {
  if (t <= a) return t;
  if (t <= d) return a;
  return t - (d - a);
}

}  // namespace

std::vector<ShiftedPacket> shift_out(Interval window, std::span<const ShiftedPacket> packets) {
  std::vector<ShiftedPacket> out(packets.begin(), packets.end());
  for (auto& p : out) {
    p.arrival = shift_instant(p.arrival, window.start, window.end);
    p.deadline = shift_instant(p.deadline, window.start, window.end);
  }
  return out;
}

std::vector<Interval> unshift(const IterationTrace& trace, std::size_t iteration, Interval shifted) {
  if (iteration >= trace.iterations.size()) {
    throw Error(ErrorCode::InconsistentTrace, "iteration " + std::to_string(iteration) +
                                                  " not recorded");
  }
  return trace.iterations[iteration].map_before.image(shifted.start, shifted.end);
}

// ---------------------------------------------------------------------------
// EDF fill

std::vector<Segment> edf_fill(std::span<const Interval> pieces, std::span<const Packet> members,
                              double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::ZeroRate, "EDF fill needs a positive rate");
  std::vector<Segment> out;
  if (pieces.empty()) {
    if (!members.empty()) throw Error(ErrorCode::InternalDeadlineMiss, "no time for members");
    return out;
  }
  const double tol = kEdfFraction * time_scale(pieces.back().end);

  std::vector<double> remaining(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) remaining[k] = members[k].bits / rate;
  std::vector<bool> done(members.size(), false);

  for (const Interval& piece : pieces) {
    double t = piece.start;
    while (t < piece.end - tol) {
      // Earliest deadline among arrived, unfinished members; ties go to the lower id.
      std::size_t pick = members.size();
      double next_arrival = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < members.size(); ++k) {
        if (done[k]) continue;
        const Packet& m = members[k];
        if (m.arrival > t + tol) {
          next_arrival = std::min(next_arrival, m.arrival);
          continue;
        }
        if (pick == members.size() || m.deadline < members[pick].deadline ||
            (m.deadline == members[pick].deadline && m.id < members[pick].id)) {
          pick = k;
        }
      }
      if (pick == members.size()) {
        throw Error(ErrorCode::InternalIdle, "nothing to send at t=" + std::to_string(t) +
                                                 " inside [" + std::to_string(piece.start) + ", " +
                                                 std::to_string(piece.end) + "]");
      }

      const Packet& m = members[pick];
      const double limit = std::min(piece.end, next_arrival);
      double end;
      if (t + remaining[pick] <= limit + tol) {
        end = t + remaining[pick];
        remaining[pick] = 0.0;
        done[pick] = true;
      } else {
        end = limit;
        remaining[pick] -= limit - t;
      }
      if (end > m.deadline + tol) {
        throw Error(ErrorCode::InternalDeadlineMiss,
                    "packet " + std::to_string(m.id) + " still sending at " + std::to_string(end) +
                        " past deadline " + std::to_string(m.deadline));
      }
      if (!out.empty() && out.back().packet == m.id && out.back().end == t) {
        out.back().end = end;
      } else {
        out.push_back({m.id, t, end, rate});
      }
      t = end;
    }
  }

  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!done[k] && remaining[k] * rate > 1e-12 * members[k].bits) {
      throw Error(ErrorCode::InternalDeadlineMiss,
                  "packet " + std::to_string(members[k].id) + " unfinished, " +
                      std::to_string(remaining[k] * rate) + " bits left");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assembly

AllocationTable tau_from_segments(const EpochDecomposition& decomposition,
                                  std::span<const Segment> segments) {
  AllocationTable tau(decomposition.packet_count(), decomposition.epoch_count());
  const auto& instants = decomposition.instants;
  for (const Segment& s : segments) {
    const auto packet = static_cast<std::size_t>(s.packet - 1);
    if (packet >= tau.packets()) {
      throw Error(ErrorCode::DimensionMismatch, "segment for unknown packet " + std::to_string(s.packet));
    }
    // First epoch whose end is past the segment start.
    auto it = std::upper_bound(instants.begin() + 1, instants.end(), s.start);
    for (auto j = static_cast<std::size_t>(it - instants.begin()) - 1;
         j < decomposition.epoch_count(); ++j) {
      const Epoch& e = decomposition.epochs[j];
      if (e.start >= s.end) break;
      const double overlap = std::min(e.end, s.end) - std::max(e.start, s.start);
      if (overlap > 0.0 && decomposition.contains(packet, j)) tau(packet, j) += overlap;
    }
  }
  return tau;
}

double energy_of_rates(const Instance& instance, const PowerModel& model,
                       std::span<const double> rates) {
  std::vector<RateEntry> entries;
  entries.reserve(rates.size());
  for (const Packet& p : instance.packets()) {
    const double r = rates[static_cast<std::size_t>(p.id - 1)];
    entries.push_back({p.id, r, r > 0.0 ? p.bits / r : 0.0});
  }
  return schedule_energy(model, entries);
}

Schedule schedule_from_tau(const Instance& instance, const EpochDecomposition& decomposition,
                           const PowerModel& model, AllocationTable tau) {
  Schedule s;
  s.rates.resize(instance.size());
  for (const Packet& p : instance.packets()) {
    const auto i = static_cast<std::size_t>(p.id - 1);
    const double total = tau.row_sum(i);
    s.rates[i] = total > 0.0 ? p.bits / total : 0.0;
  }
  for (std::size_t j = 0; j < decomposition.epoch_count(); ++j) {
    double t = decomposition.epochs[j].start;
    for (std::size_t i : decomposition.packets_of_epoch[j]) {
      const double len = tau(i, j);
      if (len <= 0.0) continue;
      s.segments.push_back({static_cast<int>(i + 1), t, t + len, s.rates[i]});
      t += len;
    }
  }
  s.tau = std::move(tau);
  s.energy = energy_of_rates(instance, model, s.rates);
  return s;
}

Schedule solve(const Instance& instance, const PowerModel& model, SolveOptions options) {
  std::vector<ShiftedPacket> active;
  active.reserve(instance.size());
  for (const Packet& p : instance.packets()) active.push_back({p.id, p.bits, p.arrival, p.deadline});

  Schedule schedule;
  schedule.rates.assign(instance.size(), 0.0);
  IterationTrace trace;
  TimeMap map = TimeMap::identity(instance.horizon());

  while (!active.empty()) {
    const auto candidates = evaluate_candidates(active, options.kernel);
    const std::size_t best = options.kernel == KernelKind::Serial
                                 ? select_best_index(candidates)
                                 : select_best_index_parallel(candidates);
    const Candidate& c = candidates[best];

    IterationRecord record;
    record.chosen = {c.start, c.end, contained_packets(active, c.start, c.end), 0.0};
    // Summed in id order so both kernels report bit-identical rates.
    double bits = 0.0;
    for (int id : record.chosen.contained) bits += instance.packet(id).bits;
    const double rate = bits / (c.end - c.start);
    record.chosen.rate = rate;
    record.candidates = candidates.size();
    record.active_packets = active.size();
    record.map_before = map;
    record.pieces = map.image(c.start, c.end);

    std::vector<Packet> members;
    members.reserve(record.chosen.contained.size());
    for (int id : record.chosen.contained) {
      members.push_back(instance.packet(id));
      schedule.rates[static_cast<std::size_t>(id - 1)] = rate;
    }
    auto segments = edf_fill(record.pieces, members, rate);
    schedule.segments.insert(schedule.segments.end(), segments.begin(), segments.end());

    std::vector<ShiftedPacket> rest;
    rest.reserve(active.size() - members.size());
    for (const auto& p : active) {
      if (!std::binary_search(record.chosen.contained.begin(), record.chosen.contained.end(), p.id)) {
        rest.push_back(p);
      }
    }
    active = shift_out({c.start, c.end}, rest);
    map = map.without(c.start, c.end);
    trace.iterations.push_back(std::move(record));
  }

  std::sort(schedule.segments.begin(), schedule.segments.end(),
            [](const Segment& a, const Segment& b) { return a.start < b.start; });
  const auto decomposition = decompose(instance);
  schedule.tau = tau_from_segments(decomposition, schedule.segments);
  schedule.energy = energy_of_rates(instance, model, schedule.rates);
  schedule.trace = std::move(trace);
  return schedule;
}

}  // namespace nfsched
