#include "obsthermo/lie_closure.hpp"

#include <algorithm>
#include <cmath>

namespace obsthermo {

int OperatorBasis::max_depth() const {
  int d = 0;
  for (int v : depths) d = std::max(d, v);
  return d;
}

void OperatorBasis::validate(double rank_tol) const {
  if (depths.size() != elements.size()) {
    throw ValidationError("OperatorBasis: depths/elements length mismatch");
  }
  if (size() > dim * dim - 1) {
    throw ValidationError("OperatorBasis: more elements than dim(su(n))");
  }
  SpanTracker tracker(dim, rank_tol);
  for (const Operator& b : elements) {
    if (b.rows() != dim || b.cols() != dim) {
      throw ValidationError("OperatorBasis: element dimension mismatch");
    }
    if (!is_hermitian(b, 1e-12)) {
      throw ValidationError("OperatorBasis: element not Hermitian");
    }
    if (!is_traceless(b, 1e-12)) {
      throw ValidationError("OperatorBasis: element not traceless");
    }
    if (!tracker.try_add(b)) {
      throw ValidationError("OperatorBasis: elements not linearly independent");
    }
  }
  if (orthonormal) {
    for (int i = 0; i < size(); ++i) {
      for (int j = i; j < size(); ++j) {
        const double expect = (i == j) ? 1.0 : 0.0;
        if (std::abs(hs_inner(elements[i], elements[j]) - expect) > 1e-10) {
          throw ValidationError("OperatorBasis: orthonormal flag violated");
        }
      }
    }
  }
}

SpanTracker::SpanTracker(int dim, double rank_tol)
    : dim_(dim), rank_tol_(rank_tol) {}

RealVector SpanTracker::vectorize(const Operator& a) const {
  const int n2 = dim_ * dim_;
  RealVector v(2 * n2);
  Eigen::Map<const Eigen::VectorXcd> flat(a.data(), n2);
  v.head(n2) = flat.real();
  v.tail(n2) = flat.imag();
  return v;
}

bool SpanTracker::try_add(const Operator& candidate) {
  RealVector v = vectorize(candidate);
  const double orig = v.norm();
  if (orig == 0.0) return false;
  // Two projection passes keep the accumulated rows orthonormal to working
  // precision even for nearly dependent candidates.
  for (int pass = 0; pass < 2; ++pass) {
    for (const RealVector& q : rows_) {
      v -= q.dot(v) * q;
    }
  }
  const double res = v.norm();
  if (res <= rank_tol_ * orig) return false;
  rows_.push_back(v / res);
  return true;
}

double SpanTracker::residual_norm(const Operator& a) const {
  RealVector v = vectorize(a);
  for (int pass = 0; pass < 2; ++pass) {
    for (const RealVector& q : rows_) {
      v -= q.dot(v) * q;
    }
  }
  return v.norm();
}

namespace {

/// Shared closure loop. Depth-0 seeds go in unmodified; each round brackets
/// the previous round's additions against `bracket_set` (new spans only ever
/// grow, so a bracket rejected in an earlier round stays dependent and the
/// frontier-only sweep visits exactly the candidates of the literal
/// all-pairs round).
OperatorBasis run_closure(const std::vector<Operator>& seeds,
                          const std::vector<Operator>& bracket_set, int dim,
                          double rank_tol, int max_rounds) {
  OperatorBasis basis;
  basis.dim = dim;
  SpanTracker tracker(dim, rank_tol);

  std::vector<int> frontier;
  for (const Operator& s : seeds) {
    if (tracker.try_add(s)) {
      basis.elements.push_back(s / hs_norm(s));
      basis.depths.push_back(0);
      frontier.push_back(basis.size() - 1);
    }
  }

  int depth = 1;
  while (!frontier.empty() && (max_rounds < 0 || depth <= max_rounds)) {
    std::vector<int> next;
    for (int idx : frontier) {
      for (const Operator& g : bracket_set) {
        Operator cand = hermitian_bracket(basis.elements[idx], g);
        // A bracket whose norm sits at rounding level relative to its inputs
        // is a numerical zero; its direction is garbage and must not reach
        // the scale-invariant rank test.
        if (hs_norm(cand) <= 1e-12 * std::max(1.0, hs_norm(g))) continue;
        if (tracker.try_add(cand)) {
          basis.elements.push_back(cand / hs_norm(cand));
          basis.depths.push_back(depth);
          next.push_back(basis.size() - 1);
        }
      }
    }
    frontier = std::move(next);
    ++depth;
  }
  return basis;
}

}  // namespace

std::pair<OperatorBasis, ClosureReport> close_algebra(
    const std::vector<Operator>& generators, double rank_tol) {
  if (generators.empty()) {
    throw ValidationError("close_algebra: empty generator list");
  }
  const auto dim = generators.front().rows();
  std::vector<Operator> seeds;
  for (const Operator& g : generators) {
    if (g.rows() != dim || g.cols() != dim) {
      throw ValidationError("close_algebra: generator dimension mismatch");
    }
    if (!is_hermitian(g, 1e-10)) {
      throw ValidationError("close_algebra: generators must be Hermitian");
    }
    seeds.push_back(traceless_part(g));
  }

  OperatorBasis basis =
      run_closure(seeds, seeds, static_cast<int>(dim), rank_tol, -1);

  ClosureReport report;
  report.dimension = basis.size();
  report.max_depth = basis.max_depth();
  report.generator_count = static_cast<int>(generators.size());
  report.rank_tol_used = rank_tol;
  report.bracket_set = "generators";
  return {std::move(basis), report};
}

std::pair<OperatorBasis, ClosureReport> observability_space(
    const OperatorBasis& lie_basis, const Operator& s, double rank_tol,
    int max_rounds) {
  if (!is_hermitian(s, 1e-10)) {
    throw ValidationError("observability_space: observable must be Hermitian");
  }
  if (s.rows() != lie_basis.dim) {
    throw ValidationError("observability_space: dimension mismatch");
  }
  Operator seed = traceless_part(s);
  std::vector<Operator> seeds;
  if (hs_norm(seed) > rank_tol * std::max(1.0, hs_norm(s))) {
    seeds.push_back(seed);
  }

  OperatorBasis basis =
      run_closure(seeds, lie_basis.elements, lie_basis.dim, rank_tol,
                  max_rounds);

  ClosureReport report;
  report.dimension = basis.size();
  report.max_depth = basis.max_depth();
  report.generator_count = lie_basis.size();
  report.rank_tol_used = rank_tol;
  report.bracket_set = "lie_basis";
  return {std::move(basis), report};
}

OperatorBasis gram_schmidt(const OperatorBasis& basis) {
  OperatorBasis out;
  out.dim = basis.dim;
  out.depths = basis.depths;
  out.orthonormal = true;
  for (const Operator& b : basis.elements) {
    Operator v = b;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Operator& q : out.elements) {
        v -= hs_inner(q, v) * q;
      }
    }
    const double norm = hs_norm(v);
    if (norm <= 1e-10 * hs_norm(b)) {
      throw ValidationError("gram_schmidt: rank-deficient input");
    }
    out.elements.push_back(v / norm);
  }
  return out;
}

bool is_ideal(const OperatorBasis& sub, const OperatorBasis& full,
              double rank_tol) {
  if (sub.size() == 0) return true;
  OperatorBasis q = sub.orthonormal ? sub : gram_schmidt(sub);
  for (const Operator& x : full.elements) {
    for (const Operator& y : sub.elements) {
      Operator bracket = hermitian_bracket(x, y);
      Operator residual = bracket;
      for (const Operator& b : q.elements) {
        residual -= hs_inner(b, residual) * b;
      }
      if (hs_norm(residual) > rank_tol * std::max(1.0, hs_norm(bracket))) {
        return false;
      }
    }
  }
  return true;
}

ProjectionResult project_onto(const OperatorBasis& basis, const Operator& a) {
  if (!basis.orthonormal) {
    throw ValidationError("project_onto: basis must be orthonormal");
  }
  if (a.rows() != basis.dim || a.cols() != basis.dim) {
    throw ValidationError("project_onto: dimension mismatch");
  }
  ProjectionResult res;
  res.coeffs.resize(basis.size());
  res.in_span = Operator::Zero(basis.dim, basis.dim);
  for (int i = 0; i < basis.size(); ++i) {
    res.coeffs(i) = hs_inner(basis.elements[i], a).real();
    res.in_span += res.coeffs(i) * basis.elements[i];
  }
  res.residual = a - res.in_span;
  return res;
}

}  // namespace obsthermo
