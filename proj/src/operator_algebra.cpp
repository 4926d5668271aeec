#include "obsthermo/operator_algebra.hpp"

#include <cmath>

namespace obsthermo {

namespace {

Operator make_pauli(Complex a01, Complex a10, Complex a00 = 0.0, Complex a11 = 0.0) {
  Operator m(2, 2);
  m << a00, a01, a10, a11;
  return m;
}

void require_square(const Operator& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw ValidationError(std::string(what) + ": operator must be square");
  }
}

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows()) {
    throw ValidationError(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

const Operator& pauli_x() {
  static const Operator m = make_pauli(1.0, 1.0);
  return m;
}

const Operator& pauli_y() {
  static const Operator m = make_pauli(Complex(0, -1), Complex(0, 1));
  return m;
}

const Operator& pauli_z() {
  static const Operator m = make_pauli(0.0, 0.0, 1.0, -1.0);
  return m;
}

const Operator& identity2() {
  static const Operator m = Operator::Identity(2, 2);
  return m;
}

Complex hs_inner(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "hs_inner");
  return (a.adjoint() * b).trace();
}

double hs_norm(const Operator& a) { return a.norm(); }

Operator commutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

Operator anticommutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "anticommutator");
  return a * b + b * a;
}

Operator hermitian_bracket(const Operator& a, const Operator& b) {
  return Complex(0, 1) * commutator(a, b);
}

Operator traceless_part(const Operator& s) {
  require_square(s, "traceless_part");
  const auto n = s.rows();
  return s - (s.trace() / static_cast<double>(n)) * Operator::Identity(n, n);
}

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator embed_site(const Operator& op, int site, int n_sites) {
  if (op.rows() != 2 || op.cols() != 2) {
    throw ValidationError("embed_site: expected a 2x2 operator");
  }
  if (site < 0 || site >= n_sites) {
    throw ValidationError("embed_site: site index out of range");
  }
  const auto dim_left = Eigen::Index(1) << site;
  const auto dim_right = Eigen::Index(1) << (n_sites - site - 1);
  Operator out = op;
  if (dim_left > 1) {
    out = kron(Operator::Identity(dim_left, dim_left), out);
  }
  if (dim_right > 1) {
    out = kron(out, Operator::Identity(dim_right, dim_right));
  }
  return out;
}

bool is_hermitian(const Operator& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.norm());
  return (a - a.adjoint()).norm() <= tol * scale;
}

bool is_unitary(const Operator& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const auto n = a.rows();
  return (a.adjoint() * a - Operator::Identity(n, n)).norm() <= tol * std::sqrt(double(n));
}

bool is_traceless(const Operator& a, double tol) {
  return std::abs(a.trace()) <= tol * std::max(1.0, a.norm());
}

Operator expm_unitary(const Operator& h, double dt) {
  if (!is_hermitian(h)) {
    throw ValidationError("expm_unitary: generator must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  const RealVector& lambda = es.eigenvalues();
  StateVector phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    phases(k) = std::exp(Complex(0, -lambda(k) * dt));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Spectrum herm_eig(const Operator& a, double tol) {
  if (!is_hermitian(a, tol)) {
    throw ValidationError("herm_eig: operator must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(a);
  return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

}  // namespace obsthermo
