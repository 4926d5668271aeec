#pragma once

#include <string>
#include <utility>
#include <vector>

#include "obsthermo/operator_algebra.hpp"

namespace obsthermo {

inline constexpr double kDefaultRankTol = 1e-9;

/// Ordered basis of a real subspace of traceless Hermitian operators. The
/// stored matrices B are Hermitian representatives of the skew-Hermitian
/// algebra elements iB, so real coefficients suffice and the bracket on
/// representatives is (A, B) -> i[A, B].
struct OperatorBasis {
  int dim = 0;                      // Hilbert-space dimension n
  std::vector<Operator> elements;   // traceless Hermitian, unit HS norm
  std::vector<int> depths;          // commutator round at which each entered
  bool orthonormal = false;

  int size() const { return static_cast<int>(elements.size()); }
  int max_depth() const;

  /// Checks tracelessness, Hermiticity, linear independence and (when the
  /// flag is set) orthonormality; throws ValidationError on violation.
  void validate(double rank_tol = kDefaultRankTol) const;
};

struct ClosureReport {
  int dimension = 0;
  int max_depth = 0;
  int generator_count = 0;
  double rank_tol_used = 0.0;
  std::string bracket_set;  // "generators" for L, "lie_basis" for V
};

/// Incremental numerical-rank test. Operators are vectorized over the reals
/// (real and imaginary parts stacked) and an orthonormal row space is
/// maintained; a candidate is new iff its residual after projection exceeds
/// rank_tol times its own norm.
class SpanTracker {
 public:
  SpanTracker(int dim, double rank_tol);

  /// Returns true and absorbs the candidate when it is independent of the
  /// tracked span.
  bool try_add(const Operator& candidate);

  /// Residual norm of `a` after projection, without absorbing it.
  double residual_norm(const Operator& a) const;

  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  RealVector vectorize(const Operator& a) const;

  int dim_;
  double rank_tol_;
  std::vector<RealVector> rows_;
};

/// Generates the dynamical Lie algebra spanned by the
/// i*generators together with all nested commutators. Generators are taken
/// through traceless_part first (an identity component only shifts the global
/// phase and never survives a bracket). Candidates are processed in
/// deterministic (basis index, generator index) order; depth labels record
/// the round at which an element entered.
std::pair<OperatorBasis, ClosureReport> close_algebra(
    const std::vector<Operator>& generators, double rank_tol = kDefaultRankTol);

/// Observability space: the closure of span{i traceless_part(s)} under
/// repeated brackets with every element of lie_basis. An observable
/// proportional to the identity yields the empty basis (V = {0}).
/// max_rounds < 0 iterates to closure; max_rounds = k stops after k bracket
/// rounds.
std::pair<OperatorBasis, ClosureReport> observability_space(
    const OperatorBasis& lie_basis, const Operator& s,
    double rank_tol = kDefaultRankTol, int max_rounds = -1);

/// Gram-Schmidt in the Hilbert-Schmidt inner product. Preserves the span and
/// the element order; throws on rank-deficient input.
OperatorBasis gram_schmidt(const OperatorBasis& basis);

/// True iff i[x, y] lies in span(sub) for every x in full, y in sub.
bool is_ideal(const OperatorBasis& sub, const OperatorBasis& full,
              double rank_tol = kDefaultRankTol);

struct ProjectionResult {
  RealVector coeffs;   // <B_i, a>, real for Hermitian inputs
  Operator in_span;
  Operator residual;   // a - in_span
};

/// Orthogonal projection of a traceless Hermitian operator onto the span of
/// an orthonormal basis.
ProjectionResult project_onto(const OperatorBasis& basis, const Operator& a);

}  // namespace obsthermo
