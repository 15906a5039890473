// nfsched: energy-minimal transmission schedules for packets with individual deadlines.
//
// Exit codes: 0 success, 1 validation failure, 2 malformed input, 3 internal error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nfsched/error.hpp"
#include "nfsched/harness.hpp"
#include "nfsched/io.hpp"
#include "nfsched/oracle.hpp"
#include "nfsched/scheduler.hpp"
#include "nfsched/verifier.hpp"

using namespace nfsched;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitMalformed = 2;
constexpr int kExitInternal = 3;

struct ModelFlags {
  std::string power = "shannon";
  std::optional<double> noise;
  double exponent = 2.0;
  double scale = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--power", power, "Power-rate law")->check(CLI::IsMember({"shannon", "monomial"}));
    cmd->add_option("--noise", noise, "Noise power (W) for the shannon law; defaults to the instance file");
    cmd->add_option("--exponent", exponent, "Exponent of the monomial law");
    cmd->add_option("--scale", scale, "Scale of the monomial law");
  }

  PowerModel build(double file_noise) const {
    if (power == "monomial") return PowerModel::monomial(exponent, scale);
    return PowerModel::shannon(noise.value_or(file_noise));
  }
};

struct Loaded {
  Instance instance;
  double noise_power = 1.0;
};

Loaded load_instance(const std::string& path) {
  const auto doc = parse_instance(read_text(path));
  return {normalize_instance(doc.packets).instance, doc.noise_power};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::vector<std::size_t> parse_sizes(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(static_cast<std::size_t>(std::stoul(item)));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimal packet transmission scheduling"};
  app.require_subcommand(1);

  // gen
  GeneratorConfig gen_cfg;
  std::string gen_out;
  double gen_noise = 1.0;
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--n", gen_cfg.n, "Packet count");
  gen->add_option("--seed", gen_cfg.seed, "Random seed");
  gen->add_option("--horizon", gen_cfg.horizon, "Arrival span in seconds");
  gen->add_option("--non-fifo-prob", gen_cfg.non_fifo_prob, "Probability of nesting a packet");
  gen->add_option("--bits-min", gen_cfg.bits_min, "Smallest packet size");
  gen->add_option("--bits-max", gen_cfg.bits_max, "Largest packet size");
  gen->add_option("--noise", gen_noise, "noise_power written into the file");
  gen->add_option("-o,--output", gen_out, "Output file (default stdout)");

  // solve
  std::string solve_in, solve_out, solve_kernel = "parallel";
  ModelFlags solve_model;
  auto* solve_cmd = app.add_subcommand("solve", "Compute the optimal schedule");
  solve_cmd->add_option("instance", solve_in, "Instance JSON")->required();
  solve_cmd->add_option("-o,--output", solve_out, "Output file (default stdout)");
  solve_cmd->add_option("--kernel", solve_kernel, "Candidate kernel")
      ->check(CLI::IsMember({"serial", "parallel"}));
  solve_model.attach(solve_cmd);

  // oracle
  std::string oracle_in, oracle_out, oracle_method = "pgd";
  double oracle_tol = kDefaultOracleTolerance;
  std::size_t oracle_iters = kDefaultOracleIterations;
  int oracle_resolution = 200;
  ModelFlags oracle_model;
  auto* oracle_cmd = app.add_subcommand("oracle", "Solve with a reference convex solver");
  oracle_cmd->add_option("instance", oracle_in, "Instance JSON")->required();
  oracle_cmd->add_option("-o,--output", oracle_out, "Output file (default stdout)");
  oracle_cmd->add_option("--method", oracle_method, "pgd or grid")->check(CLI::IsMember({"pgd", "grid"}));
  oracle_cmd->add_option("--tol", oracle_tol, "Relative energy decrease at which to stop");
  oracle_cmd->add_option("--max-iters", oracle_iters, "Iteration cap");
  oracle_cmd->add_option("--resolution", oracle_resolution, "Grid steps per epoch");
  oracle_model.attach(oracle_cmd);

  // validate
  std::string val_instance, val_schedule, val_cert;
  ModelFlags val_model;
  auto* validate = app.add_subcommand("validate", "Check a schedule for feasibility and optimality");
  validate->add_option("instance", val_instance, "Instance JSON")->required();
  validate->add_option("schedule", val_schedule, "Schedule JSON")->required();
  validate->add_option("--certificate", val_cert, "Write KKT multipliers as JSON ('-' for stdout)");
  val_model.attach(validate);

  // compare
  std::vector<std::string> cmp_in;
  double cmp_tol = 1e-5;
  ModelFlags cmp_model;
  auto* compare = app.add_subcommand("compare", "Solve and run the oracle; print the energy gap");
  compare->add_option("instances", cmp_in, "Instance JSON files")->required();
  compare->add_option("--tol", cmp_tol, "Largest acceptable relative gap");
  cmp_model.attach(compare);

  // trace
  std::string trace_in, trace_out;
  ModelFlags trace_model;
  auto* trace = app.add_subcommand("trace", "Per-epoch transmission times of the optimal schedule as CSV");
  trace->add_option("instance", trace_in, "Instance JSON")->required();
  trace->add_option("-o,--output", trace_out, "Output file (default stdout)");
  trace_model.attach(trace);

  // bench
  std::string bench_sizes = "10,20,40,80,160,200";
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Time the scheduler and check its counting bounds");
  bench->add_option("--sizes", bench_sizes, "Comma-separated packet counts");
  bench->add_option("--seed", bench_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitMalformed;
  }

  try {
    if (*gen) {
      emit(gen_out, dump_instance(generate(gen_cfg), gen_noise));
      return 0;
    }
    if (*solve_cmd) {
      const auto in = load_instance(solve_in);
      const auto kernel = solve_kernel == "serial" ? KernelKind::Serial : KernelKind::Parallel;
      const auto schedule = solve(in.instance, solve_model.build(in.noise_power), {kernel});
      emit(solve_out, schedule_to_json(schedule).dump(2) + "\n");
      return 0;
    }
    if (*oracle_cmd) {
      const auto in = load_instance(oracle_in);
      const auto model = oracle_model.build(in.noise_power);
      const auto sol = oracle_method == "grid" ? solve_grid(in.instance, model, oracle_resolution)
                                               : solve_projected_gradient(in.instance, model, oracle_tol, oracle_iters);
      emit(oracle_out, oracle_to_json(in.instance, sol).dump(2) + "\n");
      if (!sol.converged) {
        std::cerr << "DidNotConverge: residual " << sol.residual << " after " << sol.iterations
                  << " iterations; returning best iterate\n";
        return kExitValidation;
      }
      return 0;
    }
    if (*validate) {
      const auto in = load_instance(val_instance);
      const auto model = val_model.build(in.noise_power);
      const auto schedule = parse_schedule(read_text(val_schedule), in.instance);
      const auto feas = check_feasible(in.instance, schedule);
      if (!feas.feasible) {
        VerificationReport r;
        r.feasibility = feas;
        std::cout << format_report(r);
        return kExitValidation;
      }
      const auto report = check_optimality(in.instance, schedule, model);
      std::cout << format_report(report);
      if (!report.optimal) return kExitValidation;
      if (!val_cert.empty()) {
        emit(val_cert, certificate_to_json(extract_certificate(in.instance, schedule, model)).dump(2) + "\n");
      }
      return 0;
    }
    if (*compare) {
      std::vector<std::string> lines(cmp_in.size());
      std::vector<int> status(cmp_in.size(), 0);
      const auto count = static_cast<std::ptrdiff_t>(cmp_in.size());
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        std::ostringstream os;
        try {
          const auto in = load_instance(cmp_in[idx]);
          const auto model = cmp_model.build(in.noise_power);
          const auto schedule = solve(in.instance, model);
          const auto oracle = solve_projected_gradient(in.instance, model);
          const double gap = (schedule.energy - oracle.energy) / oracle.energy;
          os.precision(10);
          os << cmp_in[idx] << ": scheduler " << schedule.energy << " oracle " << oracle.energy
             << " relative gap " << gap;
          if (std::abs(gap) > cmp_tol) {
            os << " EXCEEDS " << cmp_tol;
            status[idx] = kExitValidation;
          }
        } catch (const Error& e) {
          os << cmp_in[idx] << ": " << e.what();
          status[idx] = is_internal(e.code()) ? kExitInternal : kExitMalformed;
        }
        lines[idx] = os.str();
      }
      int rc = 0;
      for (std::size_t k = 0; k < lines.size(); ++k) {
        std::cout << lines[k] << "\n";
        rc = std::max(rc, status[k]);
      }
      return rc;
    }
    if (*trace) {
      const auto in = load_instance(trace_in);
      const auto schedule = solve(in.instance, trace_model.build(in.noise_power));
      emit(trace_out, tau_csv(in.instance, schedule));
      return 0;
    }
    if (*bench) {
      const auto sizes = parse_sizes(bench_sizes);
      const auto rows = bench_complexity(sizes, bench_seed);
      std::printf("%6s %12s %10s %14s %16s %s\n", "n", "seconds", "iterations", "max_candidates",
                  "total_candidates", "bounds");
      bool ok = true;
      for (const auto& r : rows) {
        std::printf("%6zu %12.6f %10zu %14zu %16zu %s\n", r.n, r.seconds, r.iterations, r.max_candidates,
                    r.total_candidates, r.bounds_ok ? "ok" : "VIOLATED");
        ok = ok && r.bounds_ok;
      }
      return ok ? 0 : kExitInternal;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    if (e.code() == ErrorCode::InfeasibleInput || e.code() == ErrorCode::NotOptimal) return kExitValidation;
    return is_internal(e.code()) ? kExitInternal : kExitMalformed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMalformed;
  }
  return 0;
}
