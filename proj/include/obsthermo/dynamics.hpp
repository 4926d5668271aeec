#pragma once

#include <vector>

#include "obsthermo/thermo.hpp"

namespace obsthermo {

/// Bilinear quantum control system: drift H_0, control Hamiltonians H_i and
/// a measured Hermitian observable. H(t) = H_0 + sum_i u_i(t) H_i.
struct BilinearControlSystem {
  int dim = 0;
  Operator drift;
  std::vector<Operator> controls;
  Operator observable;

  int n_controls() const { return static_cast<int>(controls.size()); }
  void validate() const;
};

/// Piecewise-constant control amplitudes on a uniform grid over [t0, t1].
struct ControlSchedule {
  double t0 = 0.0;
  double t1 = 0.0;
  int n_slots = 0;
  RealMatrix amplitudes;  // n_slots x n_controls

  double dt() const { return (t1 - t0) / n_slots; }
  void validate(int n_controls) const;
};

/// Time series of thermodynamic samples at slot boundaries, with the
/// propagated states retained alongside.
struct ThermoTrajectory {
  std::vector<ThermoSample> samples;
  std::vector<DensityState> states;
  double dt = 0.0;
};

/// Evolves rho0 slot by slot with exact per-slot propagators
/// exp(-i H(u_k) dt). States are re-Hermitized after each conjugation so the
/// representation stays exactly Hermitian over long runs.
std::vector<DensityState> propagate(const BilinearControlSystem& sys,
                                    const ControlSchedule& sched,
                                    const DensityState& rho0);

/// Single-control schedule sampled from A exp(-(t - t_c)^2 / (2 sigma^2)) at
/// slot midpoints.
ControlSchedule gaussian_schedule(double t0, double t1, int n_slots,
                                  double amplitude, double center,
                                  double sigma);

/// Computes the full thermodynamic record along a propagated trajectory. The
/// sample at boundary k is evaluated against the instantaneous H(u_k) (the
/// final boundary reuses the last slot's amplitudes). Splits of the drift and
/// controls are computed once and combined by linearity.
ThermoTrajectory record_thermo(const BilinearControlSystem& sys,
                               const OperatorBasis& v,
                               const std::vector<DensityState>& states,
                               const ControlSchedule& sched);

}  // namespace obsthermo
