#include "nfsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <omp.h>

#include "nfsched/error.hpp"

namespace nfsched {

namespace {

constexpr double kTimeFloor = 1e-12;
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 80;
constexpr double kMinCurvature = 1e-300;

/// Sparse view of the time table: one slot per (packet, feasible epoch) pair.
struct Layout {
  std::vector<std::size_t> epoch_begin;  // slots of epoch j: [epoch_begin[j], epoch_begin[j+1])
  std::vector<std::size_t> slot_packet;
  std::vector<double> capacity;
};

Layout make_layout(const EpochDecomposition& d) {
  Layout l;
  l.epoch_begin.push_back(0);
  for (std::size_t j = 0; j < d.epoch_count(); ++j) {
    for (std::size_t i : d.packets_of_epoch[j]) l.slot_packet.push_back(i);
    l.epoch_begin.push_back(l.slot_packet.size());
    l.capacity.push_back(d.epochs[j].length());
  }
  return l;
}

std::vector<double> totals_of(const Layout& l, std::span<const double> x, std::size_t n) {
  std::vector<double> t(n, 0.0);
  for (std::size_t s = 0; s < x.size(); ++s) t[l.slot_packet[s]] += x[s];
  return t;
}

double energy_of(const Instance& instance, const PowerModel& model, std::span<const double> totals) {
  double e = 0.0;
  for (const Packet& p : instance.packets()) {
    e += packet_cost(model, p.bits, std::max(totals[static_cast<std::size_t>(p.id - 1)], kTimeFloor));
  }
  return e;
}

OracleSolution finish(const Instance& instance, const PowerModel& model, const EpochDecomposition& d,
                      const Layout& l, std::span<const double> x) {
  OracleSolution sol;
  sol.tau = AllocationTable(instance.size(), d.epoch_count());
  for (std::size_t j = 0; j < d.epoch_count(); ++j) {
    for (std::size_t s = l.epoch_begin[j]; s < l.epoch_begin[j + 1]; ++s) {
      sol.tau(l.slot_packet[s], j) = x[s];
    }
  }
  sol.total_times = totals_of(l, x, instance.size());
  sol.rates.resize(instance.size());
  sol.energy = 0.0;
  for (const Packet& p : instance.packets()) {
    const auto i = static_cast<std::size_t>(p.id - 1);
    const double t = sol.total_times[i];
    sol.rates[i] = t > 0.0 ? p.bits / t : std::numeric_limits<double>::infinity();
    sol.energy += t > 0.0 ? packet_cost(model, p.bits, t) : std::numeric_limits<double>::infinity();
  }
  return sol;
}

}  // namespace

double packet_cost(const PowerModel& model, double bits, double time) {
  return time * model.power(bits / time);
}

double packet_cost_derivative(const PowerModel& model, double bits, double time) {
  return -model.g(bits / time);
}

void project_capped_simplex(std::span<double> x, double cap) {
  const std::vector<double> unit(x.size(), 1.0);
  project_weighted_capped_simplex(x, unit, cap);
}

void project_weighted_capped_simplex(std::span<double> x, std::span<const double> w, double cap) {
  double positive_sum = 0.0;
  for (double v : x) positive_sum += std::max(v, 0.0);
  if (positive_sum <= cap) {
    for (double& v : x) v = std::max(v, 0.0);
    return;
  }
  // x_s = max(y_s - mu / w_s, 0) with mu chosen so the sum is cap. Coordinate s is
  // active while mu < w_s y_s; walk the breakpoints from the largest down.
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return w[a] * x[a] > w[b] * x[b]; });
  double sum_y = 0.0, sum_inv_w = 0.0, mu = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t s = order[k];
    if (x[s] <= 0.0) break;
    sum_y += x[s];
    sum_inv_w += 1.0 / w[s];
    mu = (sum_y - cap) / sum_inv_w;
    const double next = k + 1 < order.size() ? w[order[k + 1]] * x[order[k + 1]] : 0.0;
    if (mu >= next) break;
  }
  for (std::size_t s = 0; s < x.size(); ++s) x[s] = std::max(x[s] - mu / w[s], 0.0);
}

double packet_cost_curvature(const PowerModel& model, double bits, double time) {
  // h''(T) = g'(r) B / T^2 with r = B / T; g' by central difference.
  const double r = bits / time;
  const double h = 1e-4 * r;
  const double dg = (model.g(r + h) - model.g(r - h)) / (2.0 * h);
  return dg * bits / (time * time);
}

OracleSolution solve_projected_gradient(const Instance& instance, const PowerModel& model,
                                        double tol, std::size_t max_iters) {
  const auto d = decompose(instance);
  const Layout l = make_layout(d);
  const std::size_t n = instance.size();

  // Even split of each epoch among its feasible packets.
  std::vector<double> x(l.slot_packet.size());
  for (std::size_t j = 0; j < d.epoch_count(); ++j) {
    const std::size_t b = l.epoch_begin[j], e = l.epoch_begin[j + 1];
    for (std::size_t s = b; s < e; ++s) x[s] = l.capacity[j] / static_cast<double>(e - b);
  }

  std::vector<double> totals = totals_of(l, x, n);
  double energy = energy_of(instance, model, totals);
  std::vector<double> grad(n), curvature(n), trial(x.size()), weight(x.size());
  const auto packets = instance.packets();

  OracleSolution best;
  bool converged = false;
  double last_decrease = std::numeric_limits<double>::infinity();
  std::size_t iter = 0;
  for (; iter < max_iters; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = std::max(totals[i], kTimeFloor);
      grad[i] = packet_cost_derivative(model, packets[i].bits, t);
      curvature[i] = std::max(packet_cost_curvature(model, packets[i].bits, t), kMinCurvature);
    }
    for (std::size_t s = 0; s < x.size(); ++s) weight[s] = curvature[l.slot_packet[s]];

    double step = 1.0;
    double trial_energy = energy;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      for (std::size_t s = 0; s < x.size(); ++s) trial[s] = x[s] - step * grad[l.slot_packet[s]] / weight[s];
      for (std::size_t j = 0; j < d.epoch_count(); ++j) {
        const std::size_t b = l.epoch_begin[j], len = l.epoch_begin[j + 1] - b;
        project_weighted_capped_simplex(std::span<double>(trial.data() + b, len),
                                        std::span<const double>(weight.data() + b, len), l.capacity[j]);
      }
      double directional = 0.0;
      for (std::size_t s = 0; s < x.size(); ++s) directional += grad[l.slot_packet[s]] * (trial[s] - x[s]);
      const auto trial_totals = totals_of(l, trial, n);
      trial_energy = energy_of(instance, model, trial_totals);
      if (trial_energy <= energy + kArmijo * directional) {
        accepted = true;
        break;
      }
    }

    double decrease = 0.0;
    if (accepted && trial_energy < energy) {
      decrease = (energy - trial_energy) / energy;
      x.swap(trial);
      totals = totals_of(l, x, n);
      energy = trial_energy;
    }
    last_decrease = decrease;
    if (decrease < tol) {
      converged = true;
      ++iter;
      break;
    }
  }

  best = finish(instance, model, d, l, x);
  best.iterations = iter;
  best.residual = last_decrease;
  best.converged = converged;
  return best;
}

namespace {

/// All ways to split `total` grid steps among `parts` packets.
std::vector<std::vector<int>> compositions(int total, std::size_t parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(parts, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
    if (k + 1 == parts) {
      cur[k] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[k] = v;
      rec(k + 1, left - v);
    }
  };
  rec(0, total);
  return out;
}

}  // namespace

OracleSolution solve_grid(const Instance& instance, const PowerModel& model, int resolution) {
  if (resolution < 10) throw Error(ErrorCode::ConfigInvalid, "grid resolution must be >= 10");
  const auto d = decompose(instance);
  if (instance.size() > 3 || d.epoch_count() > 5) {
    throw Error(ErrorCode::TooLarge, "grid search is limited to N <= 3 and M <= 5");
  }
  const Layout l = make_layout(d);
  const std::size_t n = instance.size();
  const auto packets = instance.packets();

  // Single-packet epochs are fully given to their packet: cost falls as time grows.
  std::vector<double> fixed_totals(n, 0.0);
  std::vector<std::size_t> shared;
  for (std::size_t j = 0; j < d.epoch_count(); ++j) {
    if (d.packets_of_epoch[j].size() == 1) {
      fixed_totals[d.packets_of_epoch[j][0]] += l.capacity[j];
    } else if (!d.packets_of_epoch[j].empty()) {
      shared.push_back(j);
    }
  }

  std::vector<double> x(l.slot_packet.size(), 0.0);
  for (std::size_t j = 0; j < d.epoch_count(); ++j) {
    if (d.packets_of_epoch[j].size() == 1) x[l.epoch_begin[j]] = l.capacity[j];
  }
  if (shared.empty()) {
    auto sol = finish(instance, model, d, l, x);
    sol.iterations = 1;
    return sol;
  }

  // The widest shared epoch is enumerated innermost against cached per-packet costs.
  const auto inner_pos = static_cast<std::size_t>(
      std::max_element(shared.begin(), shared.end(), [&](std::size_t a, std::size_t b) {
        return d.packets_of_epoch[a].size() < d.packets_of_epoch[b].size();
      }) - shared.begin());
  const std::size_t inner = shared[inner_pos];
  std::vector<std::size_t> outer = shared;
  outer.erase(outer.begin() + static_cast<std::ptrdiff_t>(inner_pos));

  std::vector<std::vector<std::vector<int>>> outer_options;
  std::size_t outer_count = 1;
  for (std::size_t j : outer) {
    outer_options.push_back(compositions(resolution, d.packets_of_epoch[j].size()));
    outer_count *= outer_options.back().size();
  }
  const auto inner_options = compositions(resolution, d.packets_of_epoch[inner].size());
  const auto& inner_packets = d.packets_of_epoch[inner];
  const double inner_unit = l.capacity[inner] / resolution;

  double best_energy = std::numeric_limits<double>::infinity();
  std::size_t best_outer = 0, best_inner = 0;
  const auto outer_total = static_cast<std::ptrdiff_t>(outer_count);

#pragma omp parallel
  {
    double local_energy = std::numeric_limits<double>::infinity();
    std::size_t local_outer = 0, local_inner = 0;
    std::vector<double> base(n);
    std::vector<std::vector<double>> table(inner_packets.size(),
                                           std::vector<double>(static_cast<std::size_t>(resolution) + 1));
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t oc = 0; oc < outer_total; ++oc) {
      base = fixed_totals;
      auto rest = static_cast<std::size_t>(oc);
      for (std::size_t k = 0; k < outer.size(); ++k) {
        const auto& opts = outer_options[k];
        const auto& split = opts[rest % opts.size()];
        rest /= opts.size();
        const auto& members = d.packets_of_epoch[outer[k]];
        const double unit = l.capacity[outer[k]] / resolution;
        for (std::size_t m = 0; m < members.size(); ++m) base[members[m]] += split[m] * unit;
      }
      double others = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(inner_packets.begin(), inner_packets.end(), i) != inner_packets.end()) continue;
        others += base[i] > 0.0 ? packet_cost(model, packets[i].bits, base[i])
                                : std::numeric_limits<double>::infinity();
      }
      if (!std::isfinite(others)) continue;
      for (std::size_t m = 0; m < inner_packets.size(); ++m) {
        const std::size_t i = inner_packets[m];
        for (int k = 0; k <= resolution; ++k) {
          const double t = base[i] + k * inner_unit;
          table[m][static_cast<std::size_t>(k)] =
              t > 0.0 ? packet_cost(model, packets[i].bits, t) : std::numeric_limits<double>::infinity();
        }
      }
      for (std::size_t ic = 0; ic < inner_options.size(); ++ic) {
        double e = others;
        for (std::size_t m = 0; m < inner_packets.size(); ++m) {
          e += table[m][static_cast<std::size_t>(inner_options[ic][m])];
        }
        if (e < local_energy) {
          local_energy = e;
          local_outer = static_cast<std::size_t>(oc);
          local_inner = ic;
        }
      }
    }
#pragma omp critical
    {
      if (local_energy < best_energy ||
          (local_energy == best_energy &&
           std::make_pair(local_outer, local_inner) < std::make_pair(best_outer, best_inner))) {
        best_energy = local_energy;
        best_outer = local_outer;
        best_inner = local_inner;
      }
    }
  }

  auto place = [&](std::size_t j, const std::vector<int>& split) {
    const double unit = l.capacity[j] / resolution;
    for (std::size_t m = 0; m < split.size(); ++m) x[l.epoch_begin[j] + m] = split[m] * unit;
  };
  auto rest = best_outer;
  for (std::size_t k = 0; k < outer.size(); ++k) {
    const auto& opts = outer_options[k];
    place(outer[k], opts[rest % opts.size()]);
    rest /= opts.size();
  }
  place(inner, inner_options[best_inner]);

  auto sol = finish(instance, model, d, l, x);
  sol.iterations = outer_count * inner_options.size();
  return sol;
}

Schedule oracle_schedule(const Instance& instance, const PowerModel& model,
                         const OracleSolution& solution) {
  return schedule_from_tau(instance, decompose(instance), model, solution.tau);
}

}  // namespace nfsched
