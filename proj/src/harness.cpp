#include "nfsched/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "nfsched/error.hpp"

namespace nfsched {

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  /// In [0, 1).
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double between(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

Instance generate(const GeneratorConfig& config) {
  if (config.n < 1) throw Error(ErrorCode::ConfigInvalid, "n must be at least 1");
  if (!(config.horizon > 0.0)) throw Error(ErrorCode::ConfigInvalid, "horizon must be positive");
  if (!(config.non_fifo_prob >= 0.0 && config.non_fifo_prob <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "non_fifo_prob must lie in [0, 1]");
  }
  if (!(config.bits_min > 0.0 && config.bits_max >= config.bits_min)) {
    throw Error(ErrorCode::ConfigInvalid, "bits range must be positive and ordered");
  }

  Uniform rng(config.seed);
  std::vector<double> arrivals(config.n);
  for (double& a : arrivals) a = rng.next() * config.horizon;
  std::sort(arrivals.begin(), arrivals.end());

  std::vector<Packet> packets;
  packets.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    Packet p;
    p.id = static_cast<int>(i + 1);
    p.bits = rng.between(config.bits_min, config.bits_max);
    const double nest_draw = rng.next();
    if (i > 0 && nest_draw < config.non_fifo_prob) {
      const auto k = std::min(i - 1, static_cast<std::size_t>(rng.next() * static_cast<double>(i)));
      const Packet& outer = packets[k];
      // Trim both ends of the outer window so nesting chains shrink slowly.
      p.arrival = outer.arrival + outer.lifetime() * rng.between(0.02, 0.3);
      p.deadline = outer.deadline - outer.lifetime() * rng.between(0.02, 0.3);
    } else {
      p.arrival = arrivals[i];
      p.deadline = p.arrival + config.horizon * rng.between(0.05, 0.5);
    }
    packets.push_back(p);
  }
  return normalize_instance(packets).instance;
}

namespace {

/// Free time as ascending disjoint intervals.
class FreeTime {
 public:
  explicit FreeTime(double horizon) : free_{{0.0, horizon}} {}

  std::vector<Interval> within(double a, double b) const {
    std::vector<Interval> out;
    for (const auto& f : free_) {
      const double lo = std::max(a, f.start), hi = std::min(b, f.end);
      if (hi > lo) out.push_back({lo, hi});
    }
    return out;
  }

  void take(const std::vector<Interval>& pieces) {
    for (const auto& p : pieces) {
      std::vector<Interval> next;
      for (const auto& f : free_) {
        if (p.end <= f.start || p.start >= f.end) {
          next.push_back(f);
          continue;
        }
        if (p.start > f.start) next.push_back({f.start, p.start});
        if (p.end < f.end) next.push_back({p.end, f.end});
      }
      free_ = std::move(next);
    }
  }

 private:
  std::vector<Interval> free_;
};

double measure(const std::vector<Interval>& pieces) {
  double s = 0.0;
  for (const auto& p : pieces) s += p.length();
  return s;
}

std::vector<Interval> earliest(const std::vector<Interval>& pieces, double amount) {
  std::vector<Interval> out;
  for (const auto& p : pieces) {
    if (amount <= 0.0) break;
    const double len = std::min(p.length(), amount);
    out.push_back({p.start, p.start + len});
    amount -= len;
  }
  return out;
}

bool overlaps(const Packet& a, const Packet& b) {
  return std::min(a.deadline, b.deadline) - std::max(a.arrival, b.arrival) > kInstantTolerance;
}

/// Returns false when some packet finds no free time and `share` is off.
bool reserve(const Instance& instance, bool share, std::vector<std::vector<Interval>>& claims) {
  std::vector<Packet> order(instance.packets().begin(), instance.packets().end());
  std::sort(order.begin(), order.end(), [](const Packet& a, const Packet& b) {
    if (a.deadline != b.deadline) return a.deadline < b.deadline;
    return a.id < b.id;
  });
  const double min_time = 1e-9 * std::max(1.0, instance.horizon());
  FreeTime free(instance.horizon());
  claims.assign(instance.size(), {});
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Packet& p = order[k];
    auto pieces = free.within(p.arrival, p.deadline);
    const double available = measure(pieces);
    if (available <= min_time) {
      if (!share) return false;
      throw Error(ErrorCode::InternalDeadlineMiss,
                  "baseline found no time for packet " + std::to_string(p.id));
    }
    if (share) {
      double later = 0.0;
      for (std::size_t m = k + 1; m < order.size(); ++m) {
        if (overlaps(p, order[m])) later += order[m].bits;
      }
      pieces = earliest(pieces, available * p.bits / (p.bits + later));
    }
    free.take(pieces);
    claims[static_cast<std::size_t>(p.id - 1)] = std::move(pieces);
  }
  return true;
}

}  // namespace

Schedule baseline_constant_edf(const Instance& instance, const PowerModel& model) {
  std::vector<std::vector<Interval>> claims;
  if (!reserve(instance, false, claims)) reserve(instance, true, claims);

  Schedule s;
  s.rates.resize(instance.size());
  for (const Packet& p : instance.packets()) {
    const auto i = static_cast<std::size_t>(p.id - 1);
    s.rates[i] = p.bits / measure(claims[i]);
    for (const auto& piece : claims[i]) s.segments.push_back({p.id, piece.start, piece.end, s.rates[i]});
  }
  std::sort(s.segments.begin(), s.segments.end(),
            [](const Segment& a, const Segment& b) { return a.start < b.start; });
  s.tau = tau_from_segments(decompose(instance), s.segments);
  s.energy = energy_of_rates(instance, model, s.rates);
  return s;
}

std::vector<BenchRow> bench_complexity(std::span<const std::size_t> sizes, std::uint64_t seed,
                                       KernelKind kernel) {
  std::vector<BenchRow> rows;
  const auto model = PowerModel::shannon(1.0);
  for (std::size_t n : sizes) {
    GeneratorConfig cfg;
    cfg.n = n;
    cfg.horizon = static_cast<double>(n);
    cfg.seed = seed;
    const Instance instance = generate(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    const Schedule schedule = solve(instance, model, {kernel});
    const auto t1 = std::chrono::steady_clock::now();

    BenchRow row;
    row.n = n;
    row.seconds = std::chrono::duration<double>(t1 - t0).count();
    row.iterations = schedule.trace->iterations.size();
    for (const auto& it : schedule.trace->iterations) {
      row.max_candidates = std::max(row.max_candidates, it.candidates);
      row.total_candidates += it.candidates;
    }
    row.bounds_ok = row.iterations <= n && row.max_candidates <= n * n;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nfsched
