#pragma once

// Reference solvers for the allocation problem, independent of the window-selection
// scheduler: a projected-gradient method on the per-epoch time table, and an exhaustive
// grid search for tiny instances.

#include <cstddef>
#include <span>
#include <vector>

#include "nfsched/core_model.hpp"
#include "nfsched/power_model.hpp"
#include "nfsched/scheduler.hpp"

namespace nfsched {

struct OracleSolution {
  AllocationTable tau;
  std::vector<double> total_times;
  std::vector<double> rates;
  double energy = 0.0;
  std::size_t iterations = 0;
  /// Relative energy decrease of the last step (projected gradient); 0 for the grid.
  double residual = 0.0;
  /// False when the projected gradient hit max_iters before the decrease fell below tol.
  bool converged = true;
};

inline constexpr double kDefaultOracleTolerance = 1e-14;
inline constexpr std::size_t kDefaultOracleIterations = 200000;

OracleSolution solve_projected_gradient(const Instance& instance, const PowerModel& model,
                                        double tol = kDefaultOracleTolerance,
                                        std::size_t max_iters = kDefaultOracleIterations);

/// Enumerates every split of each shared epoch on a grid of `resolution` steps.
/// Requires N <= 3, M <= 5 (TooLarge otherwise) and resolution >= 10 (ConfigInvalid).
OracleSolution solve_grid(const Instance& instance, const PowerModel& model, int resolution);

/// Euclidean projection of x onto {x >= 0, sum x <= cap}, in place.
void project_capped_simplex(std::span<double> x, double cap);
/// Projection onto the same set in the norm sum_s w_s x_s^2 (w > 0), in place.
void project_weighted_capped_simplex(std::span<double> x, std::span<const double> w, double cap);

/// h(T) = T f(B/T), the energy of sending B bits in T seconds.
double packet_cost(const PowerModel& model, double bits, double time);
/// dh/dT = f(B/T) - (B/T) f'(B/T) = -g(B/T).
double packet_cost_derivative(const PowerModel& model, double bits, double time);
/// d^2h/dT^2, used to scale the gradient steps.
double packet_cost_curvature(const PowerModel& model, double bits, double time);

/// Oracle output as a schedule (tau laid out per epoch), for the verifier and the CLI.
Schedule oracle_schedule(const Instance& instance, const PowerModel& model,
                         const OracleSolution& solution);

}  // namespace nfsched
