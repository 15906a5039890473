#include "nfsched/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nfsched/error.hpp"

namespace nfsched {

namespace {

constexpr double kTimeFraction = 1e-9;
constexpr double kBitsRelative = 1e-9;
constexpr double kRateRelative = 1e-9;
constexpr double kPositiveTimeFraction = 1e-9;
constexpr double kCertificateTolerance = 1e-8;

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void require_dimensions(const Instance& instance, const EpochDecomposition& d,
                        const Schedule& schedule) {
  if (schedule.rates.size() != instance.size() || schedule.tau.packets() != instance.size() ||
      schedule.tau.epochs() != d.epoch_count()) {
    throw Error(ErrorCode::DimensionMismatch,
                "schedule has " + std::to_string(schedule.rates.size()) + " rates and a " +
                    std::to_string(schedule.tau.packets()) + "x" +
                    std::to_string(schedule.tau.epochs()) + " table; instance needs " +
                    std::to_string(instance.size()) + "x" + std::to_string(d.epoch_count()));
  }
  for (const Segment& s : schedule.segments) {
    if (s.packet < 1 || static_cast<std::size_t>(s.packet) > instance.size()) {
      throw Error(ErrorCode::DimensionMismatch, "segment for unknown packet " + std::to_string(s.packet));
    }
  }
}

bool rates_equal(double a, double b) {
  return std::abs(a - b) <= kRateRelative * std::max(std::abs(a), std::abs(b));
}

}  // namespace

FeasibilityReport check_feasible(const Instance& instance, const Schedule& schedule) {
  const auto d = decompose(instance);
  require_dimensions(instance, d, schedule);
  FeasibilityReport report;
  const double tol = kTimeFraction * std::max(1.0, instance.horizon());
  auto fail = [&](std::string check, int packet, std::size_t epoch, std::string detail) {
    report.feasible = false;
    report.violations.push_back({std::move(check), packet, epoch, std::move(detail)});
  };

  // (a) segments inside life times, and well formed.
  std::vector<double> delivered(instance.size(), 0.0);
  for (const Segment& s : schedule.segments) {
    const Packet& p = instance.packet(s.packet);
    if (!(s.end > s.start)) fail("segment", s.packet, 0, "empty or reversed segment at " + num(s.start));
    if (s.start < p.arrival - tol) {
      fail("causality", s.packet, 0, "sends at " + num(s.start) + " before arrival " + num(p.arrival));
    }
    if (s.end > p.deadline + tol) {
      fail("deadline", s.packet, 0, "sends until " + num(s.end) + " after deadline " + num(p.deadline));
    }
    delivered[static_cast<std::size_t>(s.packet - 1)] += s.length() * s.rate;
  }

  // (b) no two segments overlap.
  std::vector<Segment> sorted(schedule.segments.begin(), schedule.segments.end());
  std::sort(sorted.begin(), sorted.end(), [](const Segment& a, const Segment& b) {
    return a.start < b.start;
  });
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k].start < sorted[k - 1].end - tol) {
      fail("overlap", sorted[k].packet, 0,
           "overlaps packet " + std::to_string(sorted[k - 1].packet) + " at " + num(sorted[k].start));
    }
  }

  // (c) bit conservation, from segments when present and always from tau * rate.
  for (const Packet& p : instance.packets()) {
    const auto i = static_cast<std::size_t>(p.id - 1);
    if (!schedule.segments.empty() &&
        std::abs(delivered[i] - p.bits) > kBitsRelative * p.bits) {
      fail("bits", p.id, 0, "segments deliver " + num(delivered[i]) + " of " + num(p.bits));
    }
    const double via_tau = schedule.tau.row_sum(i) * schedule.rates[i];
    if (std::abs(via_tau - p.bits) > kBitsRelative * p.bits) {
      fail("bits", p.id, 0, "tau * rate delivers " + num(via_tau) + " of " + num(p.bits));
    }
  }

  // (d) tau non-negative and supported on the packet's epochs.
  for (std::size_t i = 0; i < instance.size(); ++i) {
    for (std::size_t j = 0; j < d.epoch_count(); ++j) {
      const double t = schedule.tau(i, j);
      if (t < -tol) fail("tau_sign", static_cast<int>(i + 1), j + 1, "negative time " + num(t));
      if (!d.contains(i, j) && t > tol) {
        fail("tau_support", static_cast<int>(i + 1), j + 1, "time " + num(t) + " outside life time");
      }
    }
  }

  // (e) epoch capacity.
  for (std::size_t j = 0; j < d.epoch_count(); ++j) {
    double used = 0.0;
    for (std::size_t i = 0; i < instance.size(); ++i) used += schedule.tau(i, j);
    if (used > d.epochs[j].length() + tol) {
      fail("capacity", 0, j + 1, "uses " + num(used) + " of " + num(d.epochs[j].length()));
    }
  }
  return report;
}

VerificationReport check_optimality(const Instance& instance, const Schedule& schedule,
                                    const PowerModel& /*model*/) {
  VerificationReport report;
  report.feasibility = check_feasible(instance, schedule);
  if (!report.feasibility.feasible) {
    throw Error(ErrorCode::InfeasibleInput,
                std::to_string(report.feasibility.violations.size()) + " feasibility violations");
  }
  const auto d = decompose(instance);
  report.equal_arrivals = equal_arrivals(instance);
  auto fail = [&](std::string check, int packet, std::size_t epoch, std::string detail) {
    report.violations.push_back({std::move(check), packet, epoch, std::move(detail)});
  };

  for (const Packet& p : instance.packets()) {
    if (!(schedule.rates[static_cast<std::size_t>(p.id - 1)] > 0.0)) {
      report.positive_rates_ok = false;
      fail("positive_rate", p.id, 0, "rate is not positive");
    }
  }

  // Each packet keeps one rate on every segment.
  for (const Segment& s : schedule.segments) {
    const double r = schedule.rates[static_cast<std::size_t>(s.packet - 1)];
    if (!rates_equal(s.rate, r)) {
      report.constant_rate_ok = false;
      fail("constant_rate", s.packet, 0, "segment rate " + num(s.rate) + " differs from " + num(r));
    }
  }

  for (std::size_t j = 0; j < d.epoch_count(); ++j) {
    EpochConditions ec;
    ec.epoch = j + 1;
    const double len = d.epochs[j].length();
    double used = 0.0;
    for (std::size_t i : d.packets_of_epoch[j]) {
      const double t = schedule.tau(i, j);
      used += t;
      (t > kPositiveTimeFraction * len ? ec.positive : ec.idle).push_back(static_cast<int>(i + 1));
    }
    // An epoch no packet can use is a gap in the traffic, not idling.
    if (!d.packets_of_epoch[j].empty() && std::abs(used - len) > kTimeFraction * std::max(1.0, len)) {
      ec.non_idling_ok = false;
      fail("non_idling", 0, ec.epoch, "uses " + num(used) + " of " + num(len));
    }
    auto rate = [&](int id) { return schedule.rates[static_cast<std::size_t>(id - 1)]; };
    for (std::size_t a = 1; a < ec.positive.size(); ++a) {
      if (!rates_equal(rate(ec.positive[a]), rate(ec.positive[0]))) {
        ec.equal_rates_ok = false;
        fail("equal_rates", ec.positive[a], ec.epoch,
             "rate " + num(rate(ec.positive[a])) + " vs packet " + std::to_string(ec.positive[0]) +
                 " at " + num(rate(ec.positive[0])));
      }
    }
    for (int i : ec.positive) {
      for (int k : ec.idle) {
        const double ri = rate(i);
        const double rk = rate(k);
        if (ri < rk - kRateRelative * std::max(ri, rk)) {
          ec.rate_order_ok = false;
          fail("rate_order", k, ec.epoch,
               "idle packet rate " + num(rk) + " exceeds sending packet " + std::to_string(i) +
                   " at " + num(ri));
        }
      }
    }
    report.epochs.push_back(std::move(ec));
  }

  if (schedule.trace) {
    bool ok = true;
    const auto& it = schedule.trace->iterations;
    for (std::size_t g = 1; g < it.size(); ++g) {
      const double prev = it[g - 1].chosen.rate;
      const double cur = it[g].chosen.rate;
      if (cur > prev * (1.0 + kRateRelative)) {
        ok = false;
        fail("monotone_iterations", 0, 0,
             "iteration " + std::to_string(g + 1) + " rate " + num(cur) + " above " + num(prev));
      }
    }
    report.monotone_iteration_rates_ok = ok;
  }

  report.optimal = report.violations.empty();
  return report;
}

KKTCertificate extract_certificate(const Instance& instance, const Schedule& schedule,
                                   const PowerModel& model) {
  const auto report = check_optimality(instance, schedule, model);
  if (!report.optimal) {
    throw Error(ErrorCode::NotOptimal, std::to_string(report.violations.size()) +
                                           " optimality conditions fail");
  }
  const auto d = decompose(instance);
  KKTCertificate cert;
  cert.lambda.resize(instance.size());
  cert.eta.assign(instance.size(), 0.0);
  for (std::size_t i = 0; i < instance.size(); ++i) cert.lambda[i] = model.g(schedule.rates[i]);

  auto reject = [](const std::string& what) { throw Error(ErrorCode::NotOptimal, what); };

  cert.beta.resize(d.epoch_count());
  for (const auto& ec : report.epochs) {
    const std::size_t j = ec.epoch - 1;
    double common = 0.0;
    for (int id : ec.positive) common = std::max(common, schedule.rates[static_cast<std::size_t>(id - 1)]);
    const double beta = model.g(common);
    cert.beta[j] = beta;
    const double scale = std::max(1.0, beta);
    const double len = d.epochs[j].length();

    double used = 0.0;
    for (std::size_t i : d.packets_of_epoch[j]) used += schedule.tau(i, j);
    cert.max_slackness_residual =
        std::max(cert.max_slackness_residual, std::abs(beta * (used - len)) / (scale * std::max(1.0, len)));

    for (std::size_t i : d.packets_of_epoch[j]) {
      const int id = static_cast<int>(i + 1);
      const bool sending = std::find(ec.positive.begin(), ec.positive.end(), id) != ec.positive.end();
      double gamma = sending ? 0.0 : beta - cert.lambda[i];
      if (gamma < 0.0) {
        if (gamma < -kCertificateTolerance * scale) {
          reject("negative gamma " + num(gamma) + " for packet " + std::to_string(id) +
                 " in epoch " + std::to_string(j + 1));
        }
        gamma = 0.0;
      }
      cert.gamma.push_back({id, j + 1, gamma});

      const double r = schedule.rates[i];
      // r = g^-1(beta - gamma), compared where the multipliers live: beta - gamma cancels
      // below the precision of beta when a slow packet idles beside a fast one.
      cert.max_rate_residual = std::max(cert.max_rate_residual, std::abs(model.g(r) - (beta - gamma)) / scale);
      cert.max_stationarity_residual =
          std::max(cert.max_stationarity_residual, std::abs(beta - gamma - cert.lambda[i]) / scale);
      cert.max_slackness_residual = std::max(
          cert.max_slackness_residual, std::abs(gamma * schedule.tau(i, j)) / (scale * std::max(1.0, len)));
    }
  }

  if (cert.max_rate_residual > kCertificateTolerance) {
    reject("rate recovery residual " + num(cert.max_rate_residual));
  }
  if (cert.max_stationarity_residual > kCertificateTolerance) {
    reject("stationarity residual " + num(cert.max_stationarity_residual));
  }
  if (cert.max_slackness_residual > kCertificateTolerance) {
    reject("complementary slackness residual " + num(cert.max_slackness_residual));
  }
  for (double b : cert.beta) {
    if (!std::isfinite(b) || b < 0.0) reject("invalid beta " + num(b));
  }
  for (double l : cert.lambda) {
    if (!std::isfinite(l)) reject("non-finite lambda");
  }
  return cert;
}

std::string format_report(const VerificationReport& report) {
  std::ostringstream os;
  auto mark = [](bool ok) { return ok ? "ok" : "FAIL"; };
  os << "feasible:            " << mark(report.feasibility.feasible) << "\n";
  os << "positive rates:      " << mark(report.positive_rates_ok) << "\n";
  os << "constant rates:      " << mark(report.constant_rate_ok) << "\n";
  bool idle_ok = true, eq_ok = true, order_ok = true;
  for (const auto& ec : report.epochs) {
    idle_ok = idle_ok && ec.non_idling_ok;
    eq_ok = eq_ok && ec.equal_rates_ok;
    order_ok = order_ok && ec.rate_order_ok;
  }
  os << "non-idling epochs:   " << mark(idle_ok) << "\n";
  os << "equal epoch rates:   " << mark(eq_ok) << "\n";
  os << "epoch rate ordering: " << mark(order_ok) << "\n";
  if (report.monotone_iteration_rates_ok) {
    os << "monotone iterations: " << mark(*report.monotone_iteration_rates_ok) << "\n";
  }
  if (!report.equal_arrivals.empty()) {
    os << "note: packets with equal arrival instants:";
    for (int id : report.equal_arrivals) os << ' ' << id;
    os << "\n";
  }
  auto line = [&](const Violation& v) {
    os << "  [" << v.check << "]";
    if (v.packet != 0) os << " packet " << v.packet;
    if (v.epoch != 0) os << " epoch " << v.epoch;
    os << ": " << v.detail << "\n";
  };
  for (const auto& v : report.feasibility.violations) line(v);
  for (const auto& v : report.violations) line(v);
  os << "optimal:             " << (report.optimal ? "yes" : "no") << "\n";
  return os.str();
}

}  // namespace nfsched
