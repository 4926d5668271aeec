#pragma once

#include <vector>

#include "obsthermo/observability.hpp"

namespace obsthermo {

/// One row of the recorded thermodynamic time series. Times are in units of
/// hbar*gamma/Ha and energies in Ha/gamma; internally everything is
/// dimensionless with hbar = 1.
struct ThermoSample {
  double t = 0.0;
  double obs_energy = 0.0;    // O = <H_o, rho>
  double unobs_energy = 0.0;  // U = <H_u, rho>
  double entropy = 0.0;       // S, in nats
  double dissipation = 0.0;   // <D, rho>
  double output = 0.0;        // y = <S_obs, rho>
  double psd_violation = 0.0; // clamp magnitude of the effective state
  RealVector theta;
  RealVector h_coeffs;
};

/// (O, U) with O + U = <H, rho>.
std::pair<double, double> energies(const DensityState& rho,
                                   const HamiltonianSplit& split);

/// D = i[H_o, H_u]; Hermitian, zero iff the split commutes.
Operator dissipation_operator(const HamiltonianSplit& split);

/// Instantaneous heat rate <D, rho> (valid while H is time-independent).
double heat_rate(const DensityState& rho, const Operator& d);

/// Centered finite differences of a uniformly sampled series; one-sided at
/// the endpoints. Throws on fewer than 3 samples.
std::vector<double> series_derivative(const std::vector<double>& values,
                                      double dt);

/// S = -sum lambda log lambda over the clamped effective state spectrum,
/// with 0 log 0 = 0.
double generalized_entropy(const StateDecomposition& dec);

/// Analytic entropy rate -<d rho_o/dt, log(rho_o + I/n)> under unitary
/// dynamics generated by split.h_o + split.h_u.
double entropy_rate(const DensityState& rho, const StateDecomposition& dec,
                    const HamiltonianSplit& split, const OperatorBasis& v);

/// Clausius-like per-channel form -sum_j (<D_j>/h_j) <B_j, log(rho_o + I/n)>.
/// Requires an abelian observability basis; channels with |h_j| < 1e-12 are
/// skipped when their dissipator is also negligible and rejected otherwise.
double clausius_entropy_rate(const DensityState& rho,
                             const StateDecomposition& dec,
                             const HamiltonianSplit& split,
                             const OperatorBasis& v);

/// Pure-state Fisher information: the Gram matrix <B_i, B_j> of the basis.
RealMatrix fisher_pure(const OperatorBasis& v);

/// Independent SLD route: solves 2 B_j = L_j rho + rho L_j entrywise in the
/// eigenbasis of rho (entries with lambda_a + lambda_b < 1e-12 dropped) and
/// returns F_ij = (1/2) <rho, [L_i, L_j]_+>. States that are neither strictly
/// positive nor pure raise NumericalError where a dropped entry carries
/// weight of B_j.
RealMatrix sld_fisher_oracle(const DensityState& rho, const OperatorBasis& v);

/// Q_dot = -sum_ij (theta_dot_i h_j + theta_i h_dot_j) F_ij.
double heat_rate_fisher(const RealVector& theta, const RealVector& theta_dot,
                        const RealVector& h, const RealVector& h_dot,
                        const RealMatrix& fisher);

}  // namespace obsthermo
