#pragma once

#include <vector>

#include "obsthermo/lie_closure.hpp"

namespace obsthermo {

/// Hermitian, unit-trace, positive semidefinite state with purity metadata.
struct DensityState {
  Operator rho;
  double purity = 0.0;

  int dim() const { return static_cast<int>(rho.rows()); }

  /// Validating factory: trace 1 to 1e-12, eigenvalues >= -1e-10, purity in
  /// [1/n, 1 + 1e-10].
  static DensityState checked(const Operator& rho);

  /// Fast path for states produced by unitary propagation; recomputes the
  /// purity but skips the spectral PSD check.
  static DensityState unchecked(const Operator& rho);
};

/// Split of a state relative to an orthonormal observability basis:
/// rho = I/n + rho_o + rho_u with rho_o in span(iV) and rho_u orthogonal
/// to it.
struct StateDecomposition {
  Operator rho_o;
  Operator rho_u;
  RealVector theta;              // <B_i, rho>
  DensityState effective_state;  // rho_o + I/n, clamped per below
  /// Magnitude of the most negative eigenvalue of rho_o + I/n before
  /// clamping; zero when the effective state was already PSD. Nothing in the
  /// theory guarantees positivity of the effective state, and for truncated
  /// observability spaces the violation can be O(1), so it is recorded
  /// rather than treated as fatal.
  double psd_violation = 0.0;
};

/// Split of a Hamiltonian: h_o in span(iV), h_u the rest (including any
/// identity component).
struct HamiltonianSplit {
  Operator h_o;
  Operator h_u;
  RealVector h_coeffs;  // <B_j, h>
};

/// Negative eigenvalues of rho_o + I/n are clamped to zero with trace
/// renormalization. Violations beyond this tolerance are genuine (not
/// roundoff); they are recorded in StateDecomposition::psd_violation, and
/// operations whose derivation assumes a positive effective state
/// (entropy_rate, clausius_entropy_rate) refuse to run past it.
inline constexpr double kEffectiveStatePsdTol = 1e-9;

/// Projects rho - I/n onto the orthonormal basis v.
StateDecomposition decompose_state(const DensityState& rho,
                                   const OperatorBasis& v);

/// y = Tr(S rho).
double measured_output(const DensityState& rho, const Operator& s);

HamiltonianSplit split_hamiltonian(const Operator& h, const OperatorBasis& v);

enum class StationarityClass {
  kCommutesWithL,
  kSimultaneousEigenvector,
  kNeither,
};

/// Classifies every element of v against the Lie basis: commuting with all
/// of L, a simultaneous eigenvector of every ad_H (complex proportionality
/// of [H, B] to B), or neither. These are the sufficient conditions for the
/// projection and evolution operators to commute, i.e. for a stationary
/// generalized entropy.
std::vector<StationarityClass> stationarity_check(const OperatorBasis& v,
                                                  const OperatorBasis& lie);

}  // namespace obsthermo
