#include "nfsched/power_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nfsched/error.hpp"

namespace nfsched {

namespace {

constexpr double kTwoLn2 = 2.0 * std::numbers::ln2;
constexpr int kMaxBracketDoublings = 1000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_rate(double rate) {
  if (!(rate >= 0.0)) throw Error(ErrorCode::NegativeRate, "rate " + std::to_string(rate));
}

}  // namespace

PowerModel::PowerModel(Law law) : law_(law) {
  std::visit(Overloaded{
                 [](const ShannonLaw& s) {
                   if (!(s.noise_power > 0.0) || !std::isfinite(s.noise_power)) {
                     throw Error(ErrorCode::ConfigInvalid, "noise power must be positive");
                   }
                 },
                 [](const MonomialLaw& m) {
                   if (!(m.exponent > 1.0) || !std::isfinite(m.exponent)) {
                     throw Error(ErrorCode::ConfigInvalid, "monomial exponent must exceed 1");
                   }
                   if (!(m.scale > 0.0) || !std::isfinite(m.scale)) {
                     throw Error(ErrorCode::ConfigInvalid, "monomial scale must be positive");
                   }
                 },
             },
             law_);
}

std::string PowerModel::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ShannonLaw& s) { os << "shannon(noise=" << s.noise_power << ")"; },
                 [&](const MonomialLaw& m) {
                   os << "monomial(exponent=" << m.exponent << ", scale=" << m.scale << ")";
                 },
             },
             law_);
  return os.str();
}

double PowerModel::power(double rate) const {
  require_rate(rate);
  return std::visit(Overloaded{
                        [&](const ShannonLaw& s) { return s.noise_power * std::expm1(kTwoLn2 * rate); },
                        [&](const MonomialLaw& m) { return m.scale * std::pow(rate, m.exponent); },
                    },
                    law_);
}

double PowerModel::power_derivative(double rate) const {
  require_rate(rate);
  return std::visit(Overloaded{
                        [&](const ShannonLaw& s) {
                          return s.noise_power * kTwoLn2 * std::exp(kTwoLn2 * rate);
                        },
                        [&](const MonomialLaw& m) {
                          return m.scale * m.exponent * std::pow(rate, m.exponent - 1.0);
                        },
                    },
                    law_);
}

double PowerModel::g(double rate) const {
  require_rate(rate);
  return std::visit(Overloaded{
                        [&](const ShannonLaw& s) {
                          // N (x e^x - e^x + 1) with x = 2r ln2, written to avoid cancellation
                          // for small x: x e^x - expm1(x) = x expm1(x) - (expm1(x) - x).
                          const double x = kTwoLn2 * rate;
                          const double em1 = std::expm1(x);
                          double tail;  // expm1(x) - x
                          if (x < 1e-3) {
                            tail = x * x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)));
                          } else {
                            tail = em1 - x;
                          }
                          return s.noise_power * (x * em1 - tail);
                        },
                        [&](const MonomialLaw& m) {
                          return m.scale * (m.exponent - 1.0) * std::pow(rate, m.exponent);
                        },
                    },
                    law_);
}

double PowerModel::g_inverse(double y) const {
  if (!(y >= 0.0)) throw Error(ErrorCode::NegativeInput, "g_inverse of " + std::to_string(y));
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) throw Error(ErrorCode::BracketOverflow, "g_inverse of infinity");

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  for (;;) {
    const double g_hi = g(hi);
    if (std::isnan(g_hi)) break;
    if (g_hi >= y) break;
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxBracketDoublings) break;
  }
  if (doublings > kMaxBracketDoublings || std::isnan(g(hi))) {
    throw Error(ErrorCode::BracketOverflow, "no bracket for g_inverse(" + std::to_string(y) + ")");
  }

  // Bisect to full precision; the contract |g(r) - y| <= 1e-9 max(1, y) is met long before.
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = g(mid);
    if (g_mid == y) return mid;
    if (g_mid < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double a = std::abs(g(lo) - y);
  const double b = std::abs(g(hi) - y);
  return a <= b ? lo : hi;
}

double monomial_g_inverse(const MonomialLaw& law, double y) {
  if (!(y >= 0.0)) throw Error(ErrorCode::NegativeInput, "g_inverse of " + std::to_string(y));
  return std::pow(y / (law.scale * (law.exponent - 1.0)), 1.0 / law.exponent);
}

double schedule_energy(const PowerModel& model, std::span<const RateEntry> rates) {
  double total = 0.0;
  for (const RateEntry& e : rates) {
    if (!(e.rate > 0.0) || !(e.time > 0.0)) {
      throw Error(ErrorCode::ZeroRate, "packet " + std::to_string(e.id) + " has no positive rate");
    }
    total += e.time * model.power(e.rate);
  }
  return total;
}

double energy_for_time(const PowerModel& model, double bits, double time) {
  return time * model.power(bits / time);
}

}  // namespace nfsched
