#include <doctest.h>

#include "obsthermo/central_spin.hpp"
#include "obsthermo/lie_closure.hpp"
#include "test_support.hpp"

using namespace obsthermo;
using namespace obsthermo::testing;

namespace {

CentralSpinSpec reference_spec(int n_bath = 3) {
  CentralSpinSpec spec;
  spec.n_bath = n_bath;
  spec.field = 10.0;
  spec.couplings.assign(n_bath, -3.0);
  return spec;
}

struct ReferenceClosure {
  BilinearControlSystem sys;
  OperatorBasis lie;
  ClosureReport lie_report;
  OperatorBasis v_first;  // one bracket round, orthonormalized
  ClosureReport v_report;
};

// computed once; reused across test cases
const ReferenceClosure& reference_closure() {
  static const ReferenceClosure pc = [] {
    ReferenceClosure out;
    out.sys = build_central_spin(reference_spec());
    std::tie(out.lie, out.lie_report) =
        close_algebra({out.sys.drift, out.sys.controls[0]});
    auto [vraw, vrep] =
        observability_space(out.lie, out.sys.observable, kDefaultRankTol, 1);
    out.v_first = gram_schmidt(vraw);
    out.v_report = vrep;
    return out;
  }();
  return pc;
}

/// Projector onto the span, as a matrix acting on real vectorized operators.
RealMatrix span_projector(const OperatorBasis& basis) {
  OperatorBasis on = basis.orthonormal ? basis : gram_schmidt(basis);
  const int n2 = 2 * basis.dim * basis.dim;
  RealMatrix p = RealMatrix::Zero(n2, n2);
  for (const Operator& b : on.elements) {
    RealVector v(n2);
    Eigen::Map<const Eigen::VectorXcd> flat(b.data(), basis.dim * basis.dim);
    v.head(n2 / 2) = flat.real();
    v.tail(n2 / 2) = flat.imag();
    p += v * v.transpose();
  }
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("lie_closure");

TEST_CASE("su(2) closure from two Paulis") {
  auto [basis, report] = close_algebra({pauli_z(), pauli_x()});
  CHECK(report.dimension == 3);
  REQUIRE(basis.depths.size() == 3);
  CHECK(basis.depths[0] == 0);
  CHECK(basis.depths[1] == 0);
  CHECK(basis.depths[2] == 1);
  // the generated element is the missing Pauli direction
  CHECK(std::abs(std::abs(hs_inner(basis.elements[2],
                                   pauli_y() / std::sqrt(2.0))) -
                 1.0) < 1e-12);
  basis.validate();
}

TEST_CASE("single generator gives an abelian algebra") {
  auto [basis, report] = close_algebra({pauli_z()});
  CHECK(report.dimension == 1);
  CHECK(report.max_depth == 0);
}

TEST_CASE("close_algebra input validation") {
  CHECK_THROWS_AS(close_algebra({}), ValidationError);
  CHECK_THROWS_AS(close_algebra({pauli_z(), Operator::Identity(4, 4)}),
                  ValidationError);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(close_algebra({random_matrix(rng, 4)}), ValidationError);
}

TEST_CASE("central spin closure dimensions match the closed form") {
  for (int n : {1, 2, 3}) {
    BilinearControlSystem sys = build_central_spin(reference_spec(n));
    auto [basis, report] = close_algebra({sys.drift, sys.controls[0]});
    CHECK(report.dimension == dim_formula(n));
  }
  CHECK(dim_formula(1) == 15);
  CHECK(dim_formula(2) == 38);
  CHECK(dim_formula(3) == 78);
  CHECK(dim_formula(4) == 137);
}

TEST_CASE("reference system: dim 78 at depth 11, first-order V of dim 41") {
  const ReferenceClosure& pc = reference_closure();
  CHECK(pc.lie_report.dimension == 78);
  CHECK(pc.lie_report.max_depth == 11);
  CHECK(pc.lie_report.bracket_set == "generators");
  CHECK(pc.v_report.dimension == 41);
  CHECK(pc.v_report.max_depth == 1);
  // iterating the brackets further genuinely enlarges the space until it
  // fills the whole algebra
  auto [vfull, vfullrep] =
      observability_space(pc.lie, pc.sys.observable, kDefaultRankTol, -1);
  CHECK(vfullrep.dimension == 78);
}

TEST_CASE("closure span is generator-order independent") {
  BilinearControlSystem sys = build_central_spin(reference_spec(2));
  auto [a, ra] = close_algebra({sys.drift, sys.controls[0]});
  auto [b, rb] = close_algebra({sys.controls[0], sys.drift});
  CHECK(ra.dimension == rb.dimension);
  CHECK((span_projector(a) - span_projector(b)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("observability space of a fully controllable system") {
  // N=1 equal coupling is operator controllable: L = su(4)
  BilinearControlSystem sys = build_central_spin(reference_spec(1));
  auto [lie, lrep] = close_algebra({sys.drift, sys.controls[0]});
  REQUIRE(lrep.dimension == 15);
  auto [v, vrep] = observability_space(lie, sys.observable);
  CHECK(vrep.dimension == 15);  // n^2 - 1
}

TEST_CASE("observable proportional to identity yields the empty space") {
  auto [lie, lrep] = close_algebra({pauli_z(), pauli_x()});
  auto [v, vrep] = observability_space(lie, 3.0 * Operator::Identity(2, 2));
  CHECK(vrep.dimension == 0);
  CHECK(v.elements.empty());
}

TEST_CASE("gram_schmidt on a two-element set") {
  OperatorBasis basis = basis_of({pauli_z(), pauli_z() + pauli_x()});
  OperatorBasis on = gram_schmidt(basis);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK((on.elements[0] - s * pauli_z()).norm() < 1e-12);
  CHECK((on.elements[1] - s * pauli_x()).norm() < 1e-12);
  CHECK(on.orthonormal);
}

TEST_CASE("gram_schmidt leaves an orthonormal set unchanged") {
  OperatorBasis on = gram_schmidt(su2_orthonormal());
  for (int i = 0; i < 3; ++i) {
    CHECK((on.elements[i] - su2_orthonormal().elements[i]).norm() < 1e-12);
  }
}

TEST_CASE("gram_schmidt rejects rank-deficient input") {
  OperatorBasis bad = basis_of({pauli_z(), 2.0 * pauli_z()});
  CHECK_THROWS_AS(gram_schmidt(bad), ValidationError);
}

TEST_CASE("reference V basis is orthonormal with unit condition number") {
  const ReferenceClosure& pc = reference_closure();
  const OperatorBasis& v = pc.v_first;
  RealMatrix gram(v.size(), v.size());
  for (int i = 0; i < v.size(); ++i) {
    for (int j = 0; j < v.size(); ++j) {
      gram(i, j) = hs_inner(v.elements[i], v.elements[j]).real();
    }
  }
  CHECK((gram - RealMatrix::Identity(41, 41)).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram);
  CHECK(es.eigenvalues()(40) / es.eigenvalues()(0) < 1.0 + 1e-8);
  // projector onto the span is unchanged by orthogonalization
  auto [vraw, vrep] =
      observability_space(pc.lie, pc.sys.observable, kDefaultRankTol, 1);
  CHECK((span_projector(vraw) - span_projector(v)).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("V sits inside L") {
  const ReferenceClosure& pc = reference_closure();
  OperatorBasis lie_on = gram_schmidt(pc.lie);
  for (const Operator& b : pc.v_first.elements) {
    CHECK(project_onto(lie_on, b).residual.norm() < 1e-9);
  }
}

TEST_CASE("ideal tests") {
  auto [su2, r2] = close_algebra({pauli_z(), pauli_x()});
  CHECK(is_ideal(su2, su2));
  OperatorBasis z_only = basis_of({pauli_z() / std::sqrt(2.0)}, true);
  CHECK_FALSE(is_ideal(z_only, su2));

  const ReferenceClosure& pc = reference_closure();
  // the first-order space is not invariant under further brackets; only the
  // closed space is an ideal here
  CHECK_FALSE(is_ideal(pc.v_first, pc.lie));
  auto [vfull, vfullrep] =
      observability_space(pc.lie, pc.sys.observable, kDefaultRankTol, -1);
  CHECK(is_ideal(gram_schmidt(vfull), pc.lie));
}

TEST_CASE("project_onto splits cleanly") {
  OperatorBasis on = su2_orthonormal();
  std::mt19937_64 rng(2);

  Operator in_span = 0.7 * pauli_x() - 0.2 * pauli_z();
  ProjectionResult pr = project_onto(on, in_span);
  CHECK(pr.residual.norm() < 1e-12);
  CHECK((pr.in_span - in_span).norm() < 1e-12);

  // traceless Hermitian component orthogonal to a smaller basis
  OperatorBasis z_only = basis_of({pauli_z() / std::sqrt(2.0)}, true);
  ProjectionResult pr2 = project_onto(z_only, pauli_x());
  CHECK(pr2.in_span.norm() < 1e-12);
  CHECK((pr2.residual - pauli_x()).norm() < 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    Operator a = random_traceless_hermitian(rng, 2);
    ProjectionResult once = project_onto(on, a);
    ProjectionResult twice = project_onto(on, once.in_span);
    CHECK((once.coeffs - twice.coeffs).norm() < 1e-10);
    for (const Operator& b : on.elements) {
      CHECK(std::abs(hs_inner(b, once.residual)) < 1e-10);
    }
  }

  OperatorBasis not_on = basis_of({pauli_z()});
  CHECK_THROWS_AS(project_onto(not_on, pauli_x()), ValidationError);
}

TEST_CASE("basis validation catches broken invariants") {
  OperatorBasis with_trace = basis_of({pauli_z(), Operator::Identity(2, 2)});
  CHECK_THROWS_AS(with_trace.validate(), ValidationError);

  OperatorBasis dependent = basis_of({pauli_z(), -0.5 * pauli_z()});
  CHECK_THROWS_AS(dependent.validate(), ValidationError);

  OperatorBasis claims_orthonormal = basis_of({pauli_z(), pauli_x()}, true);
  CHECK_THROWS_AS(claims_orthonormal.validate(), ValidationError);

  std::mt19937_64 rng(3);
  OperatorBasis not_hermitian = basis_of({pauli_z()});
  not_hermitian.elements.push_back(
      traceless_part(random_matrix(rng, 2)));
  not_hermitian.depths.push_back(0);
  CHECK_THROWS_AS(not_hermitian.validate(), ValidationError);
}

TEST_CASE("all returned elements are traceless Hermitian") {
  const ReferenceClosure& pc = reference_closure();
  for (const Operator& b : pc.lie.elements) {
    CHECK(is_hermitian(b, 1e-12));
    CHECK(is_traceless(b, 1e-12));
  }
  pc.lie.validate();
  pc.v_first.validate();
}

TEST_SUITE_END();
