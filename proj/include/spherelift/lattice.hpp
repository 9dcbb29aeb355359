#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "spherelift/bigint.hpp"

namespace spherelift {

struct InvalidPoint : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A point (a_0, ..., a_{d-2}, 0, 0) of S^d(Z/qZ), i.e. of the embedded
/// S^{d-2}. Construct through make() so the invariants are checked.
struct ModPoint {
  Integer q;
  int d = 0;
  IntVector coords;  // d + 1 entries in [0, q)

  /// Accepts either all d + 1 coordinates or only the d - 1 leading ones.
  /// Coordinates are reduced mod q. Throws InvalidPoint.
  static ModPoint make(const Integer& q, int d, const IntVector& coords);

  /// The d - 1 coordinates that can be nonzero.
  std::span<const Integer> head() const { return {coords.data(), coords.size() - 2}; }
};

}  // namespace spherelift

namespace spherelift::lattice {

struct DependentRows : std::domain_error {
  using std::domain_error::domain_error;
};

struct ZeroPoint : std::domain_error {
  using std::domain_error::domain_error;
};

/// m linearly independent integer row vectors (length n, n >= m).
struct IntegerBasis {
  std::vector<IntVector> rows;

  size_t rank() const { return rows.size(); }
  size_t dim() const { return rows.empty() ? 0 : rows.front().size(); }
  bool operator==(const IntegerBasis&) const = default;
};

/// Exact Gram-Schmidt state: rows[i] = orthogonal[i] + sum_{j<i} mu[i][j] orthogonal[j].
struct GramSchmidtData {
  std::vector<RatVector> orthogonal;
  std::vector<RatVector> mu;  // mu[i][j] for j < i; the rest is zero
  RatVector norms2;           // |orthogonal[i]|^2
};

GramSchmidtData gram_schmidt(const IntegerBasis& basis);

/// Integral LLL (all state kept in exact integers).
IntegerBasis lll_reduce(const IntegerBasis& basis, const Rational& delta = Rational(3, 4));

/// Checks size reduction and the Lovasz condition in exact arithmetic.
bool verify_lll(const IntegerBasis& basis, const Rational& delta = Rational(3, 4));

/// The explicit basis of L(a) = {x : <x, a_head> = 0 mod q} pivoted on the
/// first coordinate that is nonzero mod q. Throws ZeroPoint.
IntegerBasis lattice_basis_of(const Integer& q, std::span<const Integer> head);
IntegerBasis lattice_basis_of(const ModPoint& a);

struct EtaResult {
  /// ln M(B_L) / ln q for the 3/4-reduced basis B_L.
  double value = 0;
  IntegerBasis basis;
  /// (d - 2) / (2 log_2 q): how far value can exceed the true invariant.
  double error_bound = 0;
  /// M(B_L)^2, exact.
  Integer max_norm2;
};

EtaResult eta(const ModPoint& a);

/// sin^2 of the angle between row k and the span of the other rows, exact.
RatVector babai_sin_squared(const IntegerBasis& basis);
std::vector<double> babai_angles(const IntegerBasis& basis);

/// Square-matrix determinant by fraction-free elimination.
Integer determinant(const IntegerBasis& basis);

/// Solves target = sum_i c_i rows[i] for c when target lies in the row span.
/// Throws DependentRows, or std::domain_error when target is outside the span.
RatVector coefficients_in(const IntegerBasis& basis, const RatVector& target);

}  // namespace spherelift::lattice
