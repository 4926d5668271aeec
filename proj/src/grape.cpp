#include "obsthermo/grape.hpp"

#include <cmath>
#include <random>

namespace obsthermo {

void OptimizationConfig::validate() const {
  if (n_slots < 1) throw ValidationError("OptimizationConfig: n_slots >= 1");
  if (!(horizon > 0.0)) throw ValidationError("OptimizationConfig: tau > 0");
  if (!(gradient_tol > 0.0) || !(initial_step > 0.0) || !(init_scale >= 0.0)) {
    throw ValidationError("OptimizationConfig: tolerances must be positive");
  }
  if (max_iters < 0) throw ValidationError("OptimizationConfig: max_iters >= 0");
}

namespace {

Operator slot_hamiltonian(const BilinearControlSystem& sys,
                          const ControlSchedule& sched, int k) {
  Operator h = sys.drift;
  for (int c = 0; c < sys.n_controls(); ++c) {
    h += sched.amplitudes(k, c) * sys.controls[c];
  }
  return h;
}

/// Directional (Frechet) derivative of U = exp(-i H dt) along the control
/// direction Hc, evaluated in the eigenbasis of H: dU = V (W o Phi) V^dag
/// with W = V^dag (-i dt Hc) V and Phi the divided-difference kernel of exp.
Operator propagator_derivative(const Eigen::SelfAdjointEigenSolver<Operator>& es,
                               const Operator& hc, double dt) {
  const RealVector& lambda = es.eigenvalues();
  const Operator& vmat = es.eigenvectors();
  const auto n = lambda.size();
  Operator w = vmat.adjoint() * (Complex(0, -dt) * hc) * vmat;
  for (Eigen::Index a = 0; a < n; ++a) {
    const Complex ea = std::exp(Complex(0, -lambda(a) * dt));
    for (Eigen::Index b = 0; b < n; ++b) {
      const double gap = (lambda(a) - lambda(b)) * dt;
      Complex phi;
      if (std::abs(gap) < 1e-7) {
        // exp(mu_a) with a second-order correction in the gap.
        phi = ea * Complex(1.0, 0.5 * gap) * (1.0 - gap * gap / 6.0);
      } else {
        const Complex eb = std::exp(Complex(0, -lambda(b) * dt));
        phi = (ea - eb) / Complex(0, -gap);
      }
      w(a, b) *= phi;
    }
  }
  return vmat * w * vmat.adjoint();
}

double objective_sign(TargetSign sign) {
  return sign == TargetSign::kMaximize ? 1.0 : -1.0;
}

/// Uniform draw in [-1, 1] mapped directly from the engine's 64-bit output,
/// so a fixed seed gives the same pulse on every standard library.
double uniform_pm1(std::mt19937_64& rng) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

}  // namespace

double terminal_objective(const BilinearControlSystem& sys,
                          const DensityState& rho0,
                          const ControlSchedule& sched) {
  const auto states = propagate(sys, sched, rho0);
  return measured_output(states.back(), sys.observable);
}

RealMatrix adjoint_gradient(const BilinearControlSystem& sys,
                            const DensityState& rho0,
                            const ControlSchedule& sched) {
  sys.validate();
  sched.validate(sys.n_controls());
  const double dt = sched.dt();
  const int n_slots = sched.n_slots;
  const int nc = sys.n_controls();

  std::vector<Eigen::SelfAdjointEigenSolver<Operator>> eigs;
  eigs.reserve(n_slots);
  std::vector<Operator> unitaries;
  unitaries.reserve(n_slots);
  std::vector<Operator> states;
  states.reserve(n_slots + 1);
  states.push_back(rho0.rho);
  for (int k = 0; k < n_slots; ++k) {
    eigs.emplace_back(slot_hamiltonian(sys, sched, k));
    const auto& es = eigs.back();
    StateVector phases(es.eigenvalues().size());
    for (Eigen::Index a = 0; a < phases.size(); ++a) {
      phases(a) = std::exp(Complex(0, -es.eigenvalues()(a) * dt));
    }
    unitaries.push_back(es.eigenvectors() * phases.asDiagonal() *
                        es.eigenvectors().adjoint());
    states.push_back(unitaries.back() * states.back() *
                     unitaries.back().adjoint());
  }

  // Costate sweep: Lambda_k = U_k^dag ... U_N^dag S U_N ... U_k, so that
  // J = <Lambda_{k+1}, U_k rho_k U_k^dag> for every k.
  RealMatrix grad(n_slots, nc);
  Operator costate = sys.observable;
  for (int k = n_slots - 1; k >= 0; --k) {
    for (int c = 0; c < nc; ++c) {
      const Operator du = propagator_derivative(eigs[k], sys.controls[c], dt);
      const Complex val =
          (costate * du * states[k] * unitaries[k].adjoint()).trace();
      grad(k, c) = 2.0 * val.real();
    }
    costate = unitaries[k].adjoint() * costate * unitaries[k];
  }
  return grad;
}

RealMatrix finite_diff_gradient(const BilinearControlSystem& sys,
                                const DensityState& rho0,
                                const ControlSchedule& sched, double eps) {
  if (!(eps > 0.0)) {
    throw ValidationError("finite_diff_gradient: eps must be positive");
  }
  RealMatrix grad(sched.n_slots, sys.n_controls());
  ControlSchedule perturbed = sched;
  for (int k = 0; k < sched.n_slots; ++k) {
    for (int c = 0; c < sys.n_controls(); ++c) {
      perturbed.amplitudes(k, c) = sched.amplitudes(k, c) + eps;
      const double plus = terminal_objective(sys, rho0, perturbed);
      perturbed.amplitudes(k, c) = sched.amplitudes(k, c) - eps;
      const double minus = terminal_objective(sys, rho0, perturbed);
      perturbed.amplitudes(k, c) = sched.amplitudes(k, c);
      grad(k, c) = (plus - minus) / (2.0 * eps);
    }
  }
  return grad;
}

OptimizationResult grape_optimize(const BilinearControlSystem& sys,
                                  const DensityState& rho0,
                                  const OptimizationConfig& cfg) {
  sys.validate();
  cfg.validate();

  ControlSchedule sched;
  sched.t0 = 0.0;
  sched.t1 = cfg.horizon;
  sched.n_slots = cfg.n_slots;
  sched.amplitudes = RealMatrix::Zero(cfg.n_slots, sys.n_controls());
  if (cfg.init_pulse == InitPulse::kRandom) {
    std::mt19937_64 rng(cfg.seed);
    for (int k = 0; k < cfg.n_slots; ++k) {
      for (int c = 0; c < sys.n_controls(); ++c) {
        sched.amplitudes(k, c) = cfg.init_scale * uniform_pm1(rng);
      }
    }
  }

  const double sign = objective_sign(cfg.target_sign);
  OptimizationResult result;
  result.seed = cfg.seed;
  double objective = terminal_objective(sys, rho0, sched);
  result.objective_history.push_back(objective);
  if (!std::isfinite(objective)) {
    throw NumericalError("grape_optimize: non-finite objective");
  }

  double step = cfg.initial_step;
  bool converged = false;
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    const RealMatrix grad = adjoint_gradient(sys, rho0, sched);
    const double grad_inf = grad.cwiseAbs().maxCoeff();
    if (grad_inf < cfg.gradient_tol) {
      converged = true;
      break;
    }

    if (cfg.step_rule == StepRule::kFixed) {
      sched.amplitudes += sign * step * grad;
      if (cfg.clip_amplitudes) {
        sched.amplitudes = sched.amplitudes.cwiseMax(-cfg.amplitude_bound)
                               .cwiseMin(cfg.amplitude_bound);
      }
      objective = terminal_objective(sys, rho0, sched);
      if (!std::isfinite(objective)) {
        throw NumericalError("grape_optimize: diverged under fixed step");
      }
    } else {
      // Armijo backtracking on the signed objective.
      const double grad_sq = grad.squaredNorm();
      bool accepted = false;
      while (step > 1e-14) {
        ControlSchedule trial = sched;
        trial.amplitudes += sign * step * grad;
        if (cfg.clip_amplitudes) {
          trial.amplitudes = trial.amplitudes.cwiseMax(-cfg.amplitude_bound)
                                 .cwiseMin(cfg.amplitude_bound);
        }
        const double trial_objective = terminal_objective(sys, rho0, trial);
        if (std::isfinite(trial_objective) &&
            sign * trial_objective >=
                sign * objective + 1e-4 * step * grad_sq) {
          sched = trial;
          objective = trial_objective;
          step *= 1.5;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    result.objective_history.push_back(objective);
  }

  result.schedule = sched;
  result.terminal_output = objective;
  result.converged = converged;
  result.iterations = iter;
  return result;
}

}  // namespace obsthermo
