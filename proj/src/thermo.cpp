#include "obsthermo/thermo.hpp"

#include <cmath>

namespace obsthermo {

std::pair<double, double> energies(const DensityState& rho,
                                   const HamiltonianSplit& split) {
  if (split.h_o.rows() != rho.rho.rows()) {
    throw ValidationError("energies: dimension mismatch");
  }
  const double obs = hs_inner(split.h_o, rho.rho).real();
  const double unobs = hs_inner(split.h_u, rho.rho).real();
  return {obs, unobs};
}

Operator dissipation_operator(const HamiltonianSplit& split) {
  return hermitian_bracket(split.h_o, split.h_u);
}

double heat_rate(const DensityState& rho, const Operator& d) {
  return hs_inner(d, rho.rho).real();
}

std::vector<double> series_derivative(const std::vector<double>& values,
                                      double dt) {
  const auto n = values.size();
  if (n < 3) {
    throw ValidationError("series_derivative: need at least 3 samples");
  }
  std::vector<double> out(n);
  out.front() = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    out[k] = (values[k + 1] - values[k - 1]) / (2.0 * dt);
  }
  out.back() =
      (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt);
  return out;
}

namespace {

/// log of the effective state through its eigendecomposition. Eigenvalues at
/// the PSD boundary are floored so that directions the state does not occupy
/// contribute nothing (0 log 0 = 0 convention).
Operator effective_log(const DensityState& eff) {
  Eigen::SelfAdjointEigenSolver<Operator> es(eff.rho);
  RealVector lambda = es.eigenvalues();
  RealVector logs(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    logs(k) = std::log(std::max(lambda(k), 1e-300));
  }
  return es.eigenvectors() * logs.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double generalized_entropy(const StateDecomposition& dec) {
  Eigen::SelfAdjointEigenSolver<Operator> es(dec.effective_state.rho);
  double s = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double lambda = es.eigenvalues()(k);
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

double entropy_rate(const DensityState& rho, const StateDecomposition& dec,
                    const HamiltonianSplit& split, const OperatorBasis& v) {
  if (dec.psd_violation > kEffectiveStatePsdTol) {
    throw NumericalError(
        "entropy_rate: effective state is not PSD; the analytic rate "
        "formula does not apply past the clamp");
  }
  const Operator h = split.h_o + split.h_u;
  const auto n = rho.rho.rows();
  Operator rho_o_dot = Operator::Zero(n, n);
  for (int j = 0; j < v.size(); ++j) {
    // theta_dot_j = <i[H, B_j], rho> under the Liouville-von-Neumann flow.
    const double theta_dot =
        hs_inner(hermitian_bracket(h, v.elements[j]), rho.rho).real();
    rho_o_dot += theta_dot * v.elements[j];
  }
  const Operator log_eff = effective_log(dec.effective_state);
  return -hs_inner(rho_o_dot, log_eff).real();
}

double clausius_entropy_rate(const DensityState& rho,
                             const StateDecomposition& dec,
                             const HamiltonianSplit& split,
                             const OperatorBasis& v) {
  if (dec.psd_violation > kEffectiveStatePsdTol) {
    throw NumericalError(
        "clausius_entropy_rate: effective state is not PSD");
  }
  for (int i = 0; i < v.size(); ++i) {
    for (int j = i + 1; j < v.size(); ++j) {
      if (commutator(v.elements[i], v.elements[j]).norm() > 1e-10) {
        throw ValidationError(
            "clausius_entropy_rate: observability basis is not abelian");
      }
    }
  }
  const Operator log_eff = effective_log(dec.effective_state);
  double rate = 0.0;
  for (int j = 0; j < v.size(); ++j) {
    const double hj = split.h_coeffs(j);
    // Per-channel dissipator D_j = -i h_j [H_u, B_j] (unit-norm basis
    // elements); the D_j sum to the total dissipation operator.
    const Operator dj =
        -hj * hermitian_bracket(split.h_u, v.elements[j]);
    const double dj_exp = hs_inner(dj, rho.rho).real();
    if (std::abs(hj) < 1e-12) {
      if (std::abs(dj_exp) < 1e-12) continue;
      throw NumericalError(
          "clausius_entropy_rate: non-negligible dissipator with h_j ~ 0");
    }
    // The overall sign makes the channel sum agree with the entropy rate
    // -<d rho_o/dt, log sigma>, cross-checked against finite differences.
    rate += (dj_exp / hj) * hs_inner(v.elements[j], log_eff).real();
  }
  return rate;
}

RealMatrix fisher_pure(const OperatorBasis& v) {
  RealMatrix f(v.size(), v.size());
  for (int i = 0; i < v.size(); ++i) {
    for (int j = i; j < v.size(); ++j) {
      f(i, j) = hs_inner(v.elements[i], v.elements[j]).real();
      f(j, i) = f(i, j);
    }
  }
  return f;
}

RealMatrix sld_fisher_oracle(const DensityState& rho, const OperatorBasis& v) {
  if (rho.dim() != v.dim) {
    throw ValidationError("sld_fisher_oracle: dimension mismatch");
  }
  const bool pure = std::abs(rho.purity - 1.0) <= 1e-10;
  Eigen::SelfAdjointEigenSolver<Operator> es(rho.rho);
  const RealVector& lambda = es.eigenvalues();
  const Operator& u = es.eigenvectors();

  std::vector<Operator> slds;
  slds.reserve(v.size());
  for (int j = 0; j < v.size(); ++j) {
    const Operator b_tilde = u.adjoint() * v.elements[j] * u;
    Operator l_tilde(v.dim, v.dim);
    for (int a = 0; a < v.dim; ++a) {
      for (int c = 0; c < v.dim; ++c) {
        const double denom = lambda(a) + lambda(c);
        if (denom < 1e-12) {
          if (!pure && std::abs(b_tilde(a, c)) >
                           1e-10 * std::max(1.0, hs_norm(v.elements[j]))) {
            throw NumericalError(
                "sld_fisher_oracle: singular Lyapunov solve for a mixed "
                "state with support on vanishing eigenvalue pairs");
          }
          l_tilde(a, c) = 0.0;
        } else {
          l_tilde(a, c) = 2.0 * b_tilde(a, c) / denom;
        }
      }
    }
    slds.push_back(u * l_tilde * u.adjoint());
  }

  RealMatrix f(v.size(), v.size());
  for (int i = 0; i < v.size(); ++i) {
    for (int j = i; j < v.size(); ++j) {
      f(i, j) =
          0.5 * hs_inner(rho.rho, anticommutator(slds[i], slds[j])).real();
      f(j, i) = f(i, j);
    }
  }
  return f;
}

double heat_rate_fisher(const RealVector& theta, const RealVector& theta_dot,
                        const RealVector& h, const RealVector& h_dot,
                        const RealMatrix& fisher) {
  const auto r = theta.size();
  if (theta_dot.size() != r || h.size() != r || h_dot.size() != r ||
      fisher.rows() != r || fisher.cols() != r) {
    throw ValidationError("heat_rate_fisher: length mismatch");
  }
  return -(theta_dot.dot(fisher * h) + theta.dot(fisher * h_dot));
}

}  // namespace obsthermo
