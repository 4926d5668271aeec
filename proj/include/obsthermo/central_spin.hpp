#pragma once

#include <vector>

#include "obsthermo/dynamics.hpp"

namespace obsthermo {

/// Central spin-1/2 coupled by isotropic Heisenberg exchange to n_bath
/// mutually non-interacting bath spins in a common z-field. Controlled by a
/// tunable field on the central spin only; the measured output is a central
/// spin magnetization component.
struct CentralSpinSpec {
  int n_bath = 1;
  double field = 0.0;
  std::vector<double> couplings;  // one per bath spin, typically negative
  char control_axis = 'y';
  char measurement_axis = 'x';
};

/// Assembles the drift -B(sz(x)I + I(x)sum_j sz_j) + sum_j gamma_j (sx(x)sx_j
/// + sy(x)sy_j + sz(x)sz_j), the stored control operator -sigma_axis(x)I (so
/// positive schedule amplitudes reproduce H_c = -u(t) sigma_y (x) I), and the
/// observable sigma_axis(x)I.
BilinearControlSystem build_central_spin(const CentralSpinSpec& spec);

/// Closed-form dim(L) of the equal-coupling central spin model, by parity of
/// the bath size.
long long dim_formula(int n_bath);

/// Product state with every spin aligned to +z.
DensityState all_up_state(int n_sites);

}  // namespace obsthermo
