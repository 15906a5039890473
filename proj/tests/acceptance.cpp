// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "nfsched/error.hpp"
#include "nfsched/harness.hpp"
#include "nfsched/io.hpp"
#include "nfsched/oracle.hpp"
#include "nfsched/scheduler.hpp"
#include "nfsched/verifier.hpp"

using namespace nfsched;
namespace fs = std::filesystem;

namespace {

const PowerModel kShannon = PowerModel::shannon(1.0);

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Instance random_instance(std::uint64_t seed, std::size_t n, double non_fifo_prob) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.horizon = 10.0 + static_cast<double>(n);
  cfg.seed = seed;
  cfg.non_fifo_prob = non_fifo_prob;
  return generate(cfg);
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int number, const char* name, const Outcome& o, double secs) {
  std::printf("criterion %d %-28s %s  %s (%.2fs)\n", number, name, o.pass ? "PASS" : "FAIL",
              o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool monotone(const Schedule& s) {
  const auto& it = s.trace->iterations;
  for (std::size_t g = 1; g < it.size(); ++g)
    if (it[g].chosen.rate > it[g - 1].chosen.rate * (1.0 + 1e-12)) return false;
  return true;
}

// Rate monotonicity and baseline tallies accumulated over every instance solved by the suite.
std::size_t monotone_checked = 0, monotone_violations = 0;

Schedule solve_tracked(const Instance& inst, const PowerModel& model) {
  auto s = solve(inst, model);
  ++monotone_checked;
  if (!monotone(s)) ++monotone_violations;
  return s;
}

Outcome criterion_oracle_equivalence() {
  double worst_energy = 0.0, worst_rate = 0.0;
  std::size_t non_fifo = 0, unconverged = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const auto inst = random_instance(1000 + seed, n, seed % 2 ? 0.6 : 0.0);
    if (!is_non_fifo(inst).empty()) ++non_fifo;
    const auto s = solve_tracked(inst, kShannon);
    const auto o = solve_projected_gradient(inst, kShannon);
    if (!o.converged) ++unconverged;
    worst_energy = std::max(worst_energy, rel(s.energy, o.energy));
    for (std::size_t i = 0; i < n; ++i) worst_rate = std::max(worst_rate, rel(s.rates[i], o.rates[i]));
  }
  Outcome out;
  out.pass = worst_energy <= 1e-5 && worst_rate <= 1e-4;
  out.detail = fmt("200 instances (%.0f non-FIFO), max energy gap %.2e, max rate gap %.2e",
                   static_cast<double>(non_fifo), worst_energy, worst_rate);
  if (unconverged) out.detail += fmt(", %.0f oracle runs hit the iteration cap", static_cast<double>(unconverged));
  return out;
}

Outcome criterion_grid() {
  double worst_abs = 0.0, worst_rel = 0.0;
  int tested = 0;
  for (std::uint64_t seed = 1; tested < 30; ++seed) {
    const auto inst = random_instance(5000 + seed, 2 + seed % 2, 0.5);
    if (decompose(inst).epoch_count() > 5) continue;
    ++tested;
    const auto grid = solve_grid(inst, kShannon, 200);
    const auto pgd = solve_projected_gradient(inst, kShannon);
    worst_abs = std::max(worst_abs, std::abs(grid.energy - pgd.energy));
    worst_rel = std::max(worst_rel, rel(grid.energy, pgd.energy));
  }
  Outcome out;
  out.pass = worst_rel <= 1e-3;
  out.detail = fmt("30 instances, max relative gap %.2e (absolute %.2e J)", worst_rel, worst_abs);
  return out;
}

struct Corpus {
  std::vector<Instance> instances;
  std::vector<Schedule> schedules;
};

Outcome criterion_conditions(Corpus& corpus) {
  std::size_t bad_feasible = 0, bad_optimal = 0, bad_cert = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const std::size_t n = 1 + seed % 30;
    const auto inst = random_instance(20000 + seed, n, static_cast<double>(seed % 5) / 4.0);
    auto s = solve_tracked(inst, kShannon);
    if (!check_feasible(inst, s).feasible) {
      ++bad_feasible;
    } else if (!check_optimality(inst, s, kShannon).optimal) {
      ++bad_optimal;
    } else {
      try {
        const auto c = extract_certificate(inst, s, kShannon);
        const double r = std::max({c.max_rate_residual, c.max_stationarity_residual, c.max_slackness_residual});
        worst = std::max(worst, r);
        bool finite = true;
        for (double b : c.beta) finite = finite && std::isfinite(b) && b >= 0.0;
        for (const auto& g : c.gamma) finite = finite && std::isfinite(g.value) && g.value >= 0.0;
        for (double e : c.eta) finite = finite && e == 0.0;
        if (r > 1e-8 || !finite) ++bad_cert;
      } catch (const Error&) {
        ++bad_cert;
      }
    }
    corpus.instances.push_back(inst);
    corpus.schedules.push_back(std::move(s));
  }
  Outcome out;
  out.pass = bad_feasible == 0 && bad_optimal == 0 && bad_cert == 0;
  out.detail = fmt("1000 instances, infeasible %.0f, not optimal %.0f", static_cast<double>(bad_feasible),
                   static_cast<double>(bad_optimal)) +
               fmt(", certificate failures %.0f, max residual %.2e", static_cast<double>(bad_cert), worst);
  return out;
}

Outcome criterion_perturbation() {
  int tested = 0, unchanged = 0, rejected = 0, contradictions = 0;
  for (std::uint64_t seed = 1; tested < 50 && seed < 10000; ++seed) {
    const auto inst = random_instance(40000 + seed, 2 + seed % 5, 0.6);
    const auto d = decompose(inst);
    const auto s = solve_tracked(inst, kShannon);
    const auto oracle = solve_projected_gradient(inst, kShannon);

    // First epoch shared by two packets where one of them has positive time.
    std::size_t j = d.epoch_count(), from = 0, to = 0;
    for (std::size_t e = 0; e < d.epoch_count() && j == d.epoch_count(); ++e) {
      const auto& f = d.packets_of_epoch[e];
      if (f.size() < 2) continue;
      for (std::size_t a : f) {
        if (s.tau(a, e) > 1e-9 * d.epochs[e].length()) {
          j = e;
          from = a;
          to = f[0] == a ? f[1] : f[0];
          break;
        }
      }
    }
    if (j == d.epoch_count()) continue;
    ++tested;
    auto tau = s.tau;
    const double delta = std::min(0.01 * d.epochs[j].length(), tau(from, j));
    tau(from, j) -= delta;
    tau(to, j) += delta;
    const auto p = schedule_from_tau(inst, d, kShannon, tau);
    const bool same = std::abs(p.energy - s.energy) <= 1e-9 * s.energy;
    const bool fails = !check_optimality(inst, p, kShannon).optimal;
    if (same) ++unchanged;
    if (fails) ++rejected;
    if (!same && !fails) ++contradictions;
    if (fails && p.energy < oracle.energy * (1.0 - 1e-9)) ++contradictions;
  }
  Outcome out;
  out.pass = tested == 50 && contradictions == 0;
  out.detail = fmt("%.0f perturbations, %.0f rejected by the conditions, %.0f energy-neutral",
                   tested, rejected, unchanged) +
               fmt(", %.0f contradictions", contradictions);
  return out;
}

Outcome criterion_monotone() {
  // The golden corpus joins the instances solved above.
  const fs::path dir(NFSCHED_CORPUS_DIR);
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() != ".json") continue;
      const auto doc = parse_instance(read_text(entry.path().string()));
      solve_tracked(normalize_instance(doc.packets).instance, PowerModel::shannon(doc.noise_power));
    }
  }
  Outcome out;
  out.pass = monotone_violations == 0 && monotone_checked > 0;
  out.detail = fmt("%.0f traces, %.0f violations", static_cast<double>(monotone_checked),
                   static_cast<double>(monotone_violations));
  return out;
}

Outcome criterion_worked_example() {
  const auto inst = normalize_instance(std::vector<Packet>{{1, 2.0, 0.0, 2.0}, {2, 1.0, 0.5, 1.0}}).instance;
  const auto s = solve_tracked(inst, kShannon);
  const auto o = solve_projected_gradient(inst, kShannon);
  const bool rates = std::abs(s.rates[1] - 2.0) <= 1e-12 && std::abs(s.rates[0] - 4.0 / 3.0) <= 1e-12;
  const bool energy = std::abs(s.energy - 15.5244) <= 1e-4 && rel(s.energy, o.energy) <= 1e-5;
  Outcome out;
  out.pass = rates && energy;
  out.detail = fmt("r1 %.15f, r2 %.15f, energy %.6f J", s.rates[0], s.rates[1], s.energy) +
               fmt(" (oracle %.6f J)", o.energy);
  return out;
}

Outcome criterion_complexity() {
  const std::vector<std::size_t> sizes{10, 20, 40, 80, 160, 200};
  const auto rows = bench_complexity(sizes, 7);
  bool bounds = true;
  double t200 = 0.0;
  for (const auto& r : rows) {
    bounds = bounds && r.bounds_ok && r.iterations <= r.n && r.max_candidates <= r.n * r.n;
    if (r.n == 200) t200 = r.seconds;
  }
  // Disjoint windows of varied density force one iteration per packet.
  std::vector<Packet> chain;
  double t = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double len = 0.5 + 0.01 * ((i * 37) % 100);
    chain.push_back({i, 0.5 + 0.015 * ((i * 53) % 100), t, t + len});
    t += len;
  }
  const auto worst = normalize_instance(chain).instance;
  const auto t0 = Clock::now();
  const auto s = solve_tracked(worst, kShannon);
  const double t_worst = seconds_since(t0);
  std::size_t max_candidates = 0;
  for (const auto& it : s.trace->iterations) max_candidates = std::max(max_candidates, it.candidates);
  bounds = bounds && s.trace->iterations.size() <= 200 && max_candidates <= 200 * 200;

  Outcome out;
  out.pass = bounds && t200 < 10.0 && t_worst < 10.0;
  out.detail = std::string("bounds ") + (bounds ? "hold" : "violated") +
               fmt(", N=200 solved in %.3f s (generated), %.3f s (%.0f iterations)", t200, t_worst,
                   static_cast<double>(s.trace->iterations.size()));
  return out;
}

Outcome criterion_baseline(const Corpus& corpus) {
  std::size_t worse = 0, non_fifo = 0, strict = 0;
  for (std::size_t k = 0; k < corpus.instances.size(); ++k) {
    const auto& inst = corpus.instances[k];
    const double opt = corpus.schedules[k].energy;
    const double base = baseline_constant_edf(inst, kShannon).energy;
    if (base < opt * (1.0 - 1e-12)) ++worse;
    if (!is_non_fifo(inst).empty()) {
      ++non_fifo;
      if (base > opt * (1.0 + 1e-9)) ++strict;
    }
  }
  Outcome out;
  out.pass = worse == 0 && non_fifo > 0 && 2 * strict >= non_fifo;
  out.detail = fmt("%.0f instances, baseline below optimum %.0f", static_cast<double>(corpus.instances.size()),
                   static_cast<double>(worse)) +
               fmt(", strict on %.0f of %.0f non-FIFO", static_cast<double>(strict), static_cast<double>(non_fifo));
  return out;
}

template <typename F>
void run(int number, const char* name, F&& f) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  report(number, name, o, seconds_since(t0));
}

}  // namespace

int main() {
  Corpus corpus;
  run(1, "oracle equivalence", criterion_oracle_equivalence);
  run(2, "grid cross-check", criterion_grid);
  run(3, "necessary conditions", [&] { return criterion_conditions(corpus); });
  run(4, "sufficiency perturbation", criterion_perturbation);
  run(5, "iteration rate monotonicity", criterion_monotone);
  run(6, "worked example", criterion_worked_example);
  run(7, "complexity", criterion_complexity);
  run(8, "baseline dominance", [&] { return criterion_baseline(corpus); });
  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
