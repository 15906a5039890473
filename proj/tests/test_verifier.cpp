#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nfsched/error.hpp"
#include "nfsched/harness.hpp"
#include "nfsched/verifier.hpp"
#include "test_util.hpp"

using namespace nfsched;

namespace {

const auto kShannon = PowerModel::shannon(1.0);

bool has_check(const std::vector<Violation>& v, const std::string& name, int packet) {
  for (const auto& x : v)
    if (x.check == name && (packet == 0 || x.packet == packet)) return true;
  return false;
}

std::string checks_of(const std::vector<Violation>& v) {
  std::string out;
  for (const auto& x : v) out += x.check + "(" + std::to_string(x.packet) + ") ";
  return out;
}

}  // namespace

TEST_CASE("solver output on the nested instance is feasible and optimal") {
  const auto inst = test::nested_instance();
  const auto s = solve(inst, kShannon);
  CHECK(check_feasible(inst, s).feasible);
  const auto r = check_optimality(inst, s, kShannon);
  CHECK(r.optimal);
  CHECK(r.monotone_iteration_rates_ok == true);
  REQUIRE(r.epochs.size() == 3);
  CHECK(r.epochs[1].positive == std::vector<int>{2});
  CHECK(r.epochs[1].idle == std::vector<int>{1});
  CHECK(r.equal_arrivals.empty());
}

TEST_CASE("feasibility violations") {
  const auto inst = test::nested_instance();
  auto s = solve(inst, kShannon);

  SUBCASE("causality") {
    auto bad = s;
    bad.segments = {{1, 0.5, 1.0, s.rates[0]}, {2, 0.0, 0.5, 2.0}, {1, 1.0, 2.0, s.rates[0]}};
    const auto r = check_feasible(inst, bad);
    CHECK_FALSE(r.feasible);
    CHECK(has_check(r.violations, "causality", 2));
  }
  SUBCASE("bit conservation") {
    const auto one = test::single_instance();
    auto bad = solve(one, kShannon);
    bad.rates[0] = 0.9;
    for (auto& seg : bad.segments) seg.rate = 0.9;
    const auto r = check_feasible(one, bad);
    CHECK_FALSE(r.feasible);
    CHECK(has_check(r.violations, "bits", 1));
  }
  SUBCASE("overlap") {
    auto bad = s;
    bad.segments.push_back({1, 0.6, 0.7, s.rates[0]});
    CHECK_FALSE(check_feasible(inst, bad).feasible);
  }
  SUBCASE("dimension mismatch") {
    auto bad = s;
    bad.rates.pop_back();
    CHECK_THROWS_AS(check_feasible(inst, bad), Error);
  }
}

TEST_CASE("non-optimal allocations are rejected") {
  const auto inst = test::nested_instance();
  const auto d = decompose(inst);
  auto tau = solve(inst, kShannon).tau;
  // Move 0.1 s of epoch [0.5, 1] from P2 to P1.
  tau(1, 1) -= 0.1;
  tau(0, 1) += 0.1;
  const auto s = schedule_from_tau(inst, d, kShannon, tau);
  CHECK(check_feasible(inst, s).feasible);
  const auto r = check_optimality(inst, s, kShannon);
  CHECK_FALSE(r.optimal);
  CHECK_FALSE(r.epochs[1].equal_rates_ok);
  CHECK_THROWS_AS(extract_certificate(inst, s, kShannon), Error);
  CHECK(s.energy > solve(inst, kShannon).energy);
}

TEST_CASE("idle epochs are rejected") {
  const auto inst = test::make_instance({{1, 1.0, 0.0, 2.0}});
  const auto d = decompose(inst);
  AllocationTable tau(1, 1);
  tau(0, 0) = 1.0;
  const auto s = schedule_from_tau(inst, d, kShannon, tau);
  CHECK(check_feasible(inst, s).feasible);
  const auto r = check_optimality(inst, s, kShannon);
  CHECK_FALSE(r.optimal);
  CHECK_FALSE(r.epochs[0].non_idling_ok);
}

TEST_CASE("infeasible input to check_optimality") {
  const auto one = test::single_instance();
  auto bad = solve(one, kShannon);
  bad.segments[0].start = -0.5;
  try {
    check_optimality(one, bad, kShannon);
    FAIL("expected InfeasibleInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleInput);
  }
}

TEST_CASE("a suboptimal baseline fails the conditions") {
  const auto inst = test::make_instance({{1, 1.0, 0.0, 2.0}, {2, 4.0, 1.0, 3.0}});
  const auto b = baseline_constant_edf(inst, kShannon);
  CHECK(check_feasible(inst, b).feasible);
  CHECK_FALSE(check_optimality(inst, b, kShannon).optimal);
}

TEST_CASE("certificate on the nested instance") {
  const auto inst = test::nested_instance();
  const auto c = extract_certificate(inst, solve(inst, kShannon), kShannon);
  REQUIRE(c.beta.size() == 3);
  const double g2 = kShannon.g(2.0), g43 = kShannon.g(4.0 / 3.0);
  CHECK(c.beta[1] == doctest::Approx(g2).epsilon(1e-12));
  CHECK(c.beta[0] == doctest::Approx(g43).epsilon(1e-12));
  bool found = false;
  for (const auto& e : c.gamma) {
    if (e.packet == 1 && e.epoch == 2) {
      found = true;
      CHECK(e.value == doctest::Approx(g2 - g43).epsilon(1e-12));
      CHECK(e.value > 0.0);
    } else {
      CHECK(e.value == 0.0);
    }
  }
  CHECK(found);
  CHECK(c.lambda[0] == doctest::Approx(g43));
  CHECK(c.lambda[1] == doctest::Approx(g2));
  CHECK(c.eta == std::vector<double>{0.0, 0.0});
  const auto s = solve(inst, kShannon);
  for (const auto& e : c.gamma) {
    const double r = s.rates[static_cast<std::size_t>(e.packet - 1)];
    CHECK(std::abs(kShannon.g_inverse(c.beta[e.epoch - 1] - e.value) - r) <= 1e-8 * r);
  }
}

TEST_CASE("certificate on a single packet") {
  const auto inst = test::single_instance();
  const auto c = extract_certificate(inst, solve(inst, kShannon), kShannon);
  CHECK(c.beta == std::vector<double>{kShannon.g(1.0)});
  CHECK(c.lambda == std::vector<double>{kShannon.g(1.0)});
  for (const auto& e : c.gamma) CHECK(e.value == 0.0);
}

TEST_CASE("certificate invariants on random instances") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto inst = test::random_instance(seed, 1, 20, 0.5);
    const auto model = seed % 2 ? kShannon : PowerModel::monomial(2.5, 0.7);
    const auto s = solve(inst, model);
    CAPTURE(seed);
    const auto f = check_feasible(inst, s);
    CHECK_MESSAGE(f.feasible, checks_of(f.violations));
    const auto r1 = check_optimality(inst, s, model);
    const auto r2 = check_optimality(inst, s, model);
    CHECK_MESSAGE(r1.optimal, checks_of(r1.violations));
    CHECK(format_report(r1) == format_report(r2));
    const auto c = extract_certificate(inst, s, model);
    const auto d = decompose(inst);
    for (double b : c.beta) CHECK((std::isfinite(b) && b >= 0.0));
    for (const auto& e : c.gamma) {
      CHECK((std::isfinite(e.value) && e.value >= 0.0));
      const double r = s.rates[static_cast<std::size_t>(e.packet - 1)];
      const double beta = c.beta[e.epoch - 1];
      CHECK(std::abs(model.g(r) - (beta - e.value)) <= 1e-8 * std::max(1.0, beta));
      // Complementary slackness.
      CHECK(e.value * s.tau(static_cast<std::size_t>(e.packet - 1), e.epoch - 1) <=
            1e-8 * std::max(1.0, e.value));
    }
    CHECK(c.max_rate_residual <= 1e-8);
    CHECK(c.max_stationarity_residual <= 1e-8);
    CHECK(c.max_slackness_residual <= 1e-8);
    CHECK(c.gamma.size() ==
          [&] {
            std::size_t n = 0;
            for (const auto& row : d.epochs_of_packet) n += row.size();
            return n;
          }());
  }
}

TEST_CASE("equal arrivals are flagged") {
  const auto inst = test::make_instance({{1, 1.0, 0.0, 1.0}, {2, 2.0, 0.0, 2.0}});
  const auto r = check_optimality(inst, solve(inst, kShannon), kShannon);
  CHECK(r.optimal);
  CHECK(r.equal_arrivals == std::set<int>{1, 2});
}
