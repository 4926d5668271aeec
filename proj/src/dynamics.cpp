#include "obsthermo/dynamics.hpp"

#include <cmath>

namespace obsthermo {

void BilinearControlSystem::validate() const {
  if (dim <= 0 || drift.rows() != dim || drift.cols() != dim) {
    throw ValidationError("BilinearControlSystem: bad drift dimensions");
  }
  if (!is_hermitian(drift, 1e-12)) {
    throw ValidationError("BilinearControlSystem: drift not Hermitian");
  }
  for (const Operator& c : controls) {
    if (c.rows() != dim || c.cols() != dim || !is_hermitian(c, 1e-12)) {
      throw ValidationError("BilinearControlSystem: bad control Hamiltonian");
    }
  }
  if (observable.rows() != dim || !is_hermitian(observable, 1e-12)) {
    throw ValidationError("BilinearControlSystem: bad observable");
  }
}

void ControlSchedule::validate(int n_controls) const {
  if (!(t1 > t0)) {
    throw ValidationError("ControlSchedule: t1 must exceed t0");
  }
  if (n_slots < 1 || amplitudes.rows() != n_slots ||
      amplitudes.cols() != n_controls) {
    throw ValidationError("ControlSchedule: amplitude shape mismatch");
  }
  if (!amplitudes.allFinite()) {
    throw ValidationError("ControlSchedule: non-finite amplitude");
  }
}

std::vector<DensityState> propagate(const BilinearControlSystem& sys,
                                    const ControlSchedule& sched,
                                    const DensityState& rho0) {
  sys.validate();
  sched.validate(sys.n_controls());
  if (rho0.dim() != sys.dim) {
    throw ValidationError("propagate: initial state dimension mismatch");
  }
  const double dt = sched.dt();
  std::vector<DensityState> states;
  states.reserve(sched.n_slots + 1);
  states.push_back(rho0);
  Operator rho = rho0.rho;
  for (int k = 0; k < sched.n_slots; ++k) {
    Operator h = sys.drift;
    for (int c = 0; c < sys.n_controls(); ++c) {
      h += sched.amplitudes(k, c) * sys.controls[c];
    }
    const Operator u = expm_unitary(h, dt);
    rho = u * rho * u.adjoint();
    rho = 0.5 * (rho + rho.adjoint().eval());
    states.push_back(DensityState::unchecked(rho));
  }
  return states;
}

ControlSchedule gaussian_schedule(double t0, double t1, int n_slots,
                                  double amplitude, double center,
                                  double sigma) {
  if (sigma <= 0.0) {
    throw ValidationError("gaussian_schedule: sigma must be positive");
  }
  ControlSchedule sched;
  sched.t0 = t0;
  sched.t1 = t1;
  sched.n_slots = n_slots;
  sched.amplitudes.resize(n_slots, 1);
  const double dt = (t1 - t0) / n_slots;
  for (int k = 0; k < n_slots; ++k) {
    const double t_mid = t0 + (k + 0.5) * dt;
    const double arg = (t_mid - center) / sigma;
    sched.amplitudes(k, 0) = amplitude * std::exp(-0.5 * arg * arg);
  }
  sched.validate(1);
  return sched;
}

ThermoTrajectory record_thermo(const BilinearControlSystem& sys,
                               const OperatorBasis& v,
                               const std::vector<DensityState>& states,
                               const ControlSchedule& sched) {
  sys.validate();
  sched.validate(sys.n_controls());
  if (states.size() != static_cast<std::size_t>(sched.n_slots) + 1) {
    throw ValidationError("record_thermo: states/schedule length mismatch");
  }
  const int nc = sys.n_controls();
  const HamiltonianSplit drift_split = split_hamiltonian(sys.drift, v);
  std::vector<HamiltonianSplit> control_splits;
  for (int c = 0; c < nc; ++c) {
    control_splits.push_back(split_hamiltonian(sys.controls[c], v));
  }

  const double log_n = std::log(static_cast<double>(sys.dim));
  ThermoTrajectory traj;
  traj.dt = sched.dt();
  traj.states = states;
  traj.samples.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const int slot = std::min<int>(static_cast<int>(k), sched.n_slots - 1);
    HamiltonianSplit split = drift_split;
    for (int c = 0; c < nc; ++c) {
      const double u = sched.amplitudes(slot, c);
      split.h_o += u * control_splits[c].h_o;
      split.h_u += u * control_splits[c].h_u;
      split.h_coeffs += u * control_splits[c].h_coeffs;
    }
    const DensityState& rho = states[k];
    StateDecomposition dec = decompose_state(rho, v);

    ThermoSample sample;
    sample.t = sched.t0 + static_cast<double>(k) * traj.dt;
    std::tie(sample.obs_energy, sample.unobs_energy) = energies(rho, split);
    sample.entropy = generalized_entropy(dec);
    sample.dissipation = heat_rate(rho, dissipation_operator(split));
    sample.output = measured_output(rho, sys.observable);
    sample.psd_violation = dec.psd_violation;
    sample.theta = dec.theta;
    sample.h_coeffs = split.h_coeffs;
    if (sample.entropy < -1e-10 || sample.entropy > log_n + 1e-10) {
      throw NumericalError("record_thermo: entropy outside [0, log n]");
    }
    traj.samples.push_back(std::move(sample));
  }
  return traj;
}

}  // namespace obsthermo
