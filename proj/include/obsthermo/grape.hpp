#pragma once

#include <cstdint>
#include <vector>

#include "obsthermo/dynamics.hpp"

namespace obsthermo {

enum class StepRule { kFixed, kBacktracking };
enum class InitPulse { kZeros, kRandom };
enum class TargetSign { kMaximize, kMinimize };

/// Configuration of the Mayer-type terminal optimization
/// J[u] = <S, rho(tau)>.
struct OptimizationConfig {
  int n_slots = 1;
  double horizon = 1.0;
  int max_iters = 200;
  double gradient_tol = 1e-6;
  StepRule step_rule = StepRule::kBacktracking;
  InitPulse init_pulse = InitPulse::kRandom;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  double initial_step = 1.0;
  TargetSign target_sign = TargetSign::kMaximize;
  bool clip_amplitudes = false;
  double amplitude_bound = 0.0;

  void validate() const;
};

struct OptimizationResult {
  ControlSchedule schedule;
  std::vector<double> objective_history;
  double terminal_output = 0.0;
  bool converged = false;
  int iterations = 0;
  std::uint64_t seed = 0;
};

/// Terminal objective <S, rho(tau)> for a given schedule.
double terminal_objective(const BilinearControlSystem& sys,
                          const DensityState& rho0,
                          const ControlSchedule& sched);

/// Exact gradient of the terminal objective with respect to every slot
/// amplitude: forward-propagated states, backward-propagated costate, and
/// eigen-differentiated per-slot propagators.
RealMatrix adjoint_gradient(const BilinearControlSystem& sys,
                            const DensityState& rho0,
                            const ControlSchedule& sched);

/// Central-difference gradient (J(u_k + eps) - J(u_k - eps)) / (2 eps); the
/// independent check for adjoint_gradient.
RealMatrix finite_diff_gradient(const BilinearControlSystem& sys,
                                const DensityState& rho0,
                                const ControlSchedule& sched, double eps);

/// Gradient-ascent GRAPE with optional backtracking line search. Fixed seed
/// and config give a bit-identical result.
OptimizationResult grape_optimize(const BilinearControlSystem& sys,
                                  const DensityState& rho0,
                                  const OptimizationConfig& cfg);

}  // namespace obsthermo
