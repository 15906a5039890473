// Times the serial reference candidate scan against the OpenMP kernel, and full solves
// with each, on generated instances of growing size.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "nfsched/harness.hpp"
#include "nfsched/kernels.hpp"
#include "nfsched/scheduler.hpp"

using namespace nfsched;
using clock_type = std::chrono::steady_clock;

namespace {

template <class F>
double seconds_of(F&& f, int reps) {
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double>(clock_type::now() - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t max_n = argc > 1 ? static_cast<std::size_t>(std::atoi(argv[1])) : 200;
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%6s %14s %14s %14s %14s %s\n", "n", "scan_serial", "scan_omp", "solve_serial", "solve_omp",
              "same");
  const auto model = PowerModel::shannon(1.0);
  std::vector<std::size_t> sizes;
  for (std::size_t n = 10; n < max_n; n *= 2) sizes.push_back(n);
  sizes.push_back(max_n);
  for (std::size_t n : sizes) {
    GeneratorConfig cfg;
    cfg.n = n;
    cfg.horizon = static_cast<double>(n);
    cfg.seed = 7;
    const Instance instance = generate(cfg);
    std::vector<ShiftedPacket> active;
    for (const auto& p : instance.packets()) active.push_back({p.id, p.bits, p.arrival, p.deadline});

    const int reps = n <= 40 ? 20 : 3;
    std::size_t sink = 0;
    const double scan_serial = seconds_of([&] { sink += evaluate_candidates_serial(active).size(); }, reps);
    const double scan_omp = seconds_of([&] { sink += evaluate_candidates_parallel(active).size(); }, reps);
    double e_serial = 0.0, e_omp = 0.0;
    const double solve_serial =
        seconds_of([&] { e_serial = solve(instance, model, {KernelKind::Serial}).energy; }, 1);
    const double solve_omp =
        seconds_of([&] { e_omp = solve(instance, model, {KernelKind::Parallel}).energy; }, 1);
    std::printf("%6zu %14.6f %14.6f %14.6f %14.6f %s\n", n, scan_serial, scan_omp, solve_serial, solve_omp,
                e_serial == e_omp ? "yes" : "no");
    if (sink == 0) std::printf("empty\n");
  }
  return 0;
}
