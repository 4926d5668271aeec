#include "obsthermo/central_spin.hpp"

#include <cmath>

namespace obsthermo {

namespace {

const Operator& axis_pauli(char axis) {
  switch (axis) {
    case 'x':
      return pauli_x();
    case 'y':
      return pauli_y();
    case 'z':
      return pauli_z();
    default:
      throw ValidationError("central spin: axis must be one of x, y, z");
  }
}

}  // namespace

BilinearControlSystem build_central_spin(const CentralSpinSpec& spec) {
  if (spec.n_bath < 1) {
    throw ValidationError("central spin: need at least one bath spin");
  }
  if (static_cast<int>(spec.couplings.size()) != spec.n_bath) {
    throw ValidationError("central spin: one coupling per bath spin required");
  }
  for (double g : spec.couplings) {
    if (!std::isfinite(g)) {
      throw ValidationError("central spin: non-finite coupling");
    }
  }
  const int n_sites = spec.n_bath + 1;
  const auto dim = Eigen::Index(1) << n_sites;

  Operator drift = Operator::Zero(dim, dim);
  drift -= spec.field * embed_site(pauli_z(), 0, n_sites);
  for (int j = 1; j <= spec.n_bath; ++j) {
    drift -= spec.field * embed_site(pauli_z(), j, n_sites);
  }
  for (int j = 1; j <= spec.n_bath; ++j) {
    const double gamma = spec.couplings[j - 1];
    drift += gamma * (embed_site(pauli_x(), 0, n_sites) *
                          embed_site(pauli_x(), j, n_sites) +
                      embed_site(pauli_y(), 0, n_sites) *
                          embed_site(pauli_y(), j, n_sites) +
                      embed_site(pauli_z(), 0, n_sites) *
                          embed_site(pauli_z(), j, n_sites));
  }

  BilinearControlSystem sys;
  sys.dim = static_cast<int>(dim);
  sys.drift = drift;
  // Stored as -sigma(x)I so that H_c(t) = -u(t) sigma_y (x) I_b holds with
  // positive schedule amplitudes.
  sys.controls.push_back(-embed_site(axis_pauli(spec.control_axis), 0, n_sites));
  sys.observable = embed_site(axis_pauli(spec.measurement_axis), 0, n_sites);
  sys.validate();
  return sys;
}

long long dim_formula(int n_bath) {
  if (n_bath < 1) {
    throw ValidationError("dim_formula: n_bath must be >= 1");
  }
  const long long n = n_bath;
  if (n % 2 == 0) {
    return (2 + n) * (9 + 4 * n * (4 + n)) / 6;
  }
  return (1 + n) * (3 + 2 * n) * (7 + 2 * n) / 6;
}

DensityState all_up_state(int n_sites) {
  const auto dim = Eigen::Index(1) << n_sites;
  Operator rho = Operator::Zero(dim, dim);
  rho(0, 0) = 1.0;
  return DensityState::checked(rho);
}

}  // namespace obsthermo
