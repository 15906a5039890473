#pragma once

#include <span>
#include <string>
#include <variant>

namespace nfsched {

/// p = noise * (2^(2r) - 1), the AWGN capacity law solved for power.
struct ShannonLaw {
  double noise_power = 1.0;
};

/// p = scale * r^exponent with exponent > 1.
struct MonomialLaw {
  double exponent = 2.0;
  double scale = 1.0;
};

/// Convex increasing power-rate law f with f(0) = 0, plus the marginal-energy
/// function g(r) = r f'(r) - f(r) and its inverse.
class PowerModel {
 public:
  using Law = std::variant<ShannonLaw, MonomialLaw>;

  /// Throws ConfigInvalid for a non-positive noise/scale or an exponent <= 1.
  explicit PowerModel(Law law);

  static PowerModel shannon(double noise_power) { return PowerModel(ShannonLaw{noise_power}); }
  static PowerModel monomial(double exponent, double scale) {
    return PowerModel(MonomialLaw{exponent, scale});
  }

  const Law& law() const { return law_; }
  std::string describe() const;

  /// f(r). Throws NegativeRate for r < 0.
  double power(double rate) const;
  /// f'(r), analytic.
  double power_derivative(double rate) const;
  /// g(r) = r f'(r) - f(r).
  double g(double rate) const;
  /// Solves g(r) = y by bisection on a geometrically grown bracket.
  double g_inverse(double y) const;

 private:
  Law law_;
};

inline double power_of_rate(const PowerModel& model, double rate) { return model.power(rate); }
inline double g_of_rate(const PowerModel& model, double rate) { return model.g(rate); }
inline double g_inverse(const PowerModel& model, double y) { return model.g_inverse(y); }

/// Closed-form inverse of g for the monomial law, used to cross-check the bisection.
double monomial_g_inverse(const MonomialLaw& law, double y);

struct RateEntry {
  int id = 0;
  double rate = 0.0;
  double time = 0.0;  // B_i / r_i
};

/// Sum over packets of time * f(rate). Throws ZeroRate if any rate or time is not positive.
double schedule_energy(const PowerModel& model, std::span<const RateEntry> rates);

/// Energy of sending `bits` in `time` seconds at a constant rate: T f(B/T).
double energy_for_time(const PowerModel& model, double bits, double time);

}  // namespace nfsched
