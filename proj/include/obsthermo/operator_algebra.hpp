#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "obsthermo/errors.hpp"

namespace obsthermo {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Default relative tolerance; all operator tolerances are taken relative to
/// the Frobenius norm of the operands unless stated otherwise.
inline constexpr double kDefaultTol = 1e-10;

/// Eigendecomposition of a Hermitian operator. Eigenvalues ascending,
/// eigenvectors as the columns of a unitary matrix.
struct Spectrum {
  RealVector eigenvalues;
  Operator eigenvectors;
};

// 2x2 building blocks.
const Operator& pauli_x();
const Operator& pauli_y();
const Operator& pauli_z();
const Operator& identity2();

/// Hilbert-Schmidt inner product Tr(a^dag b). Conjugate-symmetric and linear
/// in the second argument.
Complex hs_inner(const Operator& a, const Operator& b);

/// Frobenius norm, i.e. sqrt(<a,a>).
double hs_norm(const Operator& a);

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

/// i[a,b]; maps a pair of Hermitian operators to a Hermitian operator. This
/// is the bracket used on Hermitian representatives of skew-Hermitian
/// algebra elements.
Operator hermitian_bracket(const Operator& a, const Operator& b);

/// s minus its identity component, Tr(s)/n * I.
Operator traceless_part(const Operator& s);

/// Kronecker product a (x) b.
Operator kron(const Operator& a, const Operator& b);

/// Places a single-qubit operator at position `site` of an n_sites register:
/// I (x) ... (x) op (x) ... (x) I.
Operator embed_site(const Operator& op, int site, int n_sites);

bool is_hermitian(const Operator& a, double tol = kDefaultTol);
bool is_unitary(const Operator& a, double tol = kDefaultTol);
bool is_traceless(const Operator& a, double tol = kDefaultTol);

/// Unitary propagator exp(-i h dt) of a Hermitian generator, computed by
/// eigendecomposition.
Operator expm_unitary(const Operator& h, double dt);

/// Eigendecomposition of a Hermitian operator; throws if the input fails the
/// Hermiticity check.
Spectrum herm_eig(const Operator& a, double tol = kDefaultTol);

}  // namespace obsthermo
