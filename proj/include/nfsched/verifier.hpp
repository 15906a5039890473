#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nfsched/core_model.hpp"
#include "nfsched/power_model.hpp"
#include "nfsched/scheduler.hpp"

namespace nfsched {

struct Violation {
  std::string check;
  int packet = 0;          // 0 when not tied to a packet
  std::size_t epoch = 0;   // 1-based, 0 when not tied to an epoch
  std::string detail;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

/// Feasible packets of one epoch split by whether they get positive time there.
struct EpochConditions {
  std::size_t epoch = 0;  // 1-based
  std::vector<int> positive;
  std::vector<int> idle;
  bool equal_rates_ok = true;   // all packets with positive time share one rate
  bool rate_order_ok = true;    // those rates dominate every idle packet's rate
  bool non_idling_ok = true;    // the epoch is completely used
};

struct VerificationReport {
  FeasibilityReport feasibility;
  bool positive_rates_ok = true;
  bool constant_rate_ok = true;
  std::vector<EpochConditions> epochs;
  std::optional<bool> monotone_iteration_rates_ok;  // only when a trace is present
  std::set<int> equal_arrivals;                     // informational
  std::vector<Violation> violations;
  bool optimal = false;
};

/// Lagrange multipliers witnessing optimality of a schedule.
struct KKTCertificate {
  struct GammaEntry {
    int packet = 0;
    std::size_t epoch = 0;  // 1-based
    double value = 0.0;
  };
  std::vector<double> beta;    // per epoch
  std::vector<GammaEntry> gamma;  // one per feasible (packet, epoch) pair
  std::vector<double> lambda;  // per packet
  std::vector<double> eta;     // per packet, always 0
  double max_rate_residual = 0.0;          // |g(r) - (beta - gamma)| / max(1, beta)
  double max_stationarity_residual = 0.0;  // |beta - gamma - lambda| / max(1, beta)
  double max_slackness_residual = 0.0;
};

/// Causality, deadlines, overlap, bit conservation and epoch capacity.
/// Throws DimensionMismatch when the schedule does not fit the instance.
FeasibilityReport check_feasible(const Instance& instance, const Schedule& schedule);

/// Constant rates, non-idling epochs, the per-epoch rate conditions and (with a trace)
/// non-increasing iteration rates. Throws InfeasibleInput for an infeasible schedule.
VerificationReport check_optimality(const Instance& instance, const Schedule& schedule,
                                    const PowerModel& model);

/// Builds beta_j = g(common rate of epoch j), gamma = beta - g(r_i) on idle pairs,
/// lambda_i = g(r_i), eta = 0, and checks stationarity and complementary slackness.
/// Throws NotOptimal when the schedule fails the conditions or a multiplier check.
KKTCertificate extract_certificate(const Instance& instance, const Schedule& schedule,
                                   const PowerModel& model);

std::string format_report(const VerificationReport& report);

}  // namespace nfsched
