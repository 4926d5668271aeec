#include "obsthermo/observability.hpp"

#include <cmath>

namespace obsthermo {

DensityState DensityState::checked(const Operator& rho) {
  if (rho.rows() != rho.cols()) {
    throw ValidationError("DensityState: matrix must be square");
  }
  if (!is_hermitian(rho, 1e-10)) {
    throw ValidationError("DensityState: matrix must be Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-12 * std::max(1.0, rho.norm())) {
    throw ValidationError("DensityState: trace must be 1");
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw ValidationError("DensityState: negative eigenvalue");
  }
  DensityState out;
  out.rho = rho;
  out.purity = (rho * rho).trace().real();
  const double n = static_cast<double>(rho.rows());
  if (out.purity < 1.0 / n - 1e-10 || out.purity > 1.0 + 1e-10) {
    throw ValidationError("DensityState: purity outside [1/n, 1]");
  }
  return out;
}

DensityState DensityState::unchecked(const Operator& rho) {
  DensityState out;
  out.rho = rho;
  out.purity = (rho * rho).trace().real();
  return out;
}

namespace {

/// rho_o + I/n with negative eigenvalues clamped to zero and the trace
/// renormalized; reports the violation magnitude through *violation.
DensityState clamp_effective_state(const Operator& rho_o, double* violation) {
  const auto n = rho_o.rows();
  Operator eff = rho_o + Operator::Identity(n, n) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Operator> es(eff);
  RealVector lambda = es.eigenvalues();
  *violation = std::max(0.0, -lambda.minCoeff());
  if (lambda.minCoeff() < 0.0) {
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      lambda(k) = std::max(lambda(k), 0.0);
    }
    lambda /= lambda.sum();
    eff = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
  }
  return DensityState::unchecked(eff);
}

}  // namespace

StateDecomposition decompose_state(const DensityState& rho,
                                   const OperatorBasis& v) {
  if (!v.orthonormal) {
    throw ValidationError("decompose_state: basis must be orthonormal");
  }
  if (rho.dim() != v.dim) {
    throw ValidationError("decompose_state: dimension mismatch");
  }
  const auto n = rho.rho.rows();
  StateDecomposition dec;
  dec.theta.resize(v.size());
  dec.rho_o = Operator::Zero(n, n);
  for (int i = 0; i < v.size(); ++i) {
    dec.theta(i) = hs_inner(v.elements[i], rho.rho).real();
    dec.rho_o += dec.theta(i) * v.elements[i];
  }
  dec.rho_u = rho.rho - Operator::Identity(n, n) / static_cast<double>(n) -
              dec.rho_o;
  dec.effective_state = clamp_effective_state(dec.rho_o, &dec.psd_violation);
  return dec;
}

double measured_output(const DensityState& rho, const Operator& s) {
  if (!is_hermitian(s)) {
    throw ValidationError("measured_output: observable must be Hermitian");
  }
  if (s.rows() != rho.rho.rows()) {
    throw ValidationError("measured_output: dimension mismatch");
  }
  return (s * rho.rho).trace().real();
}

HamiltonianSplit split_hamiltonian(const Operator& h, const OperatorBasis& v) {
  if (!v.orthonormal) {
    throw ValidationError("split_hamiltonian: basis must be orthonormal");
  }
  if (h.rows() != v.dim || h.cols() != v.dim) {
    throw ValidationError("split_hamiltonian: dimension mismatch");
  }
  HamiltonianSplit split;
  split.h_coeffs.resize(v.size());
  split.h_o = Operator::Zero(v.dim, v.dim);
  for (int j = 0; j < v.size(); ++j) {
    split.h_coeffs(j) = hs_inner(v.elements[j], h).real();
    split.h_o += split.h_coeffs(j) * v.elements[j];
  }
  split.h_u = h - split.h_o;
  return split;
}

std::vector<StationarityClass> stationarity_check(const OperatorBasis& v,
                                                  const OperatorBasis& lie) {
  if (v.dim != lie.dim) {
    throw ValidationError("stationarity_check: dimension mismatch");
  }
  std::vector<StationarityClass> out;
  out.reserve(v.size());
  for (const Operator& b : v.elements) {
    const double bnorm = hs_norm(b);
    bool commutes = true;
    bool eigenvector = true;
    for (const Operator& h : lie.elements) {
      const Operator bracket = commutator(h, b);
      const double scale = std::max(1.0, hs_norm(h) * bnorm);
      if (bracket.norm() > 1e-10 * scale) commutes = false;
      // [H, B] proportional to B (complex ratio allowed) is the
      // common-eigenvector condition for ad_H.
      const Complex c = hs_inner(b, bracket) / hs_inner(b, b);
      if ((bracket - c * b).norm() > 1e-10 * scale) eigenvector = false;
      if (!commutes && !eigenvector) break;
    }
    if (commutes) {
      out.push_back(StationarityClass::kCommutesWithL);
    } else if (eigenvector) {
      out.push_back(StationarityClass::kSimultaneousEigenvector);
    } else {
      out.push_back(StationarityClass::kNeither);
    }
  }
  return out;
}

}  // namespace obsthermo
