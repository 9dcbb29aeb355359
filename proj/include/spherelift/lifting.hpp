#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spherelift/bigint.hpp"
#include "spherelift/lattice.hpp"
#include "spherelift/numtheory.hpp"

namespace spherelift::lifting {

/// Find t in Z^{d+1} with
///   (q t_0 + b_0)^2 + ... + (q t_{d-2} + b_{d-2})^2 + (q t_{d-1})^2 + (q t_d)^2 = N.
struct LiftProblem {
  Integer q;
  int d = 0;
  Integer N;
  IntVector b;  // d - 1 entries in [0, q)
};

/// N = p^{2h}, b_i = a_i p^h mod q.
LiftProblem make_problem(const ModPoint& a, const Integer& p, unsigned h);

/// Throws std::invalid_argument when gcd(N, q) != 1 or |b|^2 != N mod q.
void validate(const LiftProblem& prob);

/// A particular solution of 2<b, t> = k mod q, k = (N - |b|^2) / q.
IntVector solve_condition2(const LiftProblem& prob);

/// F(x) = N/q^2 - |t~_0 + sum_i x_i u_i|^2 over the reduced basis {u_i} of
/// L(b). Every integer x corresponds to one integer t solving condition 2.
class QuadraticForm {
 public:
  QuadraticForm(const LiftProblem& prob, lattice::IntegerBasis reduced);

  const lattice::IntegerBasis& basis() const { return basis_; }
  /// Coefficients r_i of t~_0 in the reduced basis, |r_i| <= 1/2.
  const RatVector& offsets() const { return offsets_; }
  const IntVector& particular() const { return t0_; }

  /// t = t_0 + sum_i (x_i - round(c_i)) u_i.
  IntVector t_of(std::span<const Integer> x) const;
  /// F(x) = (N - |q t + b|^2) / q^2, exact.
  Integer value(std::span<const Integer> x) const;
  /// Evaluates at an explicit t that satisfies condition 2.
  Integer value_at_t(const IntVector& t) const;

 private:
  LiftProblem prob_;
  lattice::IntegerBasis basis_;
  IntVector t0_;
  RatVector offsets_;
  IntVector shifts_;
};

QuadraticForm build_F(const LiftProblem& prob);
/// Same, after checking that a and prob.b span the same line mod q.
QuadraticForm build_F(const LiftProblem& prob, const ModPoint& a);

/// The box C = prod [-A_i, A_i] outside of whose scale-fold blow-up F is negative.
struct SearchBox {
  size_t m = 0;
  std::vector<double> half_widths;
  std::vector<double> offsets;
  double scale = 0;
};

struct HypothesisFailed {
  size_t index = 0;  // first i with 2 m |w_i| >= M
};

/// A_i = M/(m|w_i|) - 1/2, scale = 2m(3/sqrt2)^angle_rank. angle_rank
/// defaults to m; pass the full lattice rank when the vectors are a subset of
/// a reduced basis.
std::variant<SearchBox, HypothesisFailed> compute_box(std::span<const double> norms, double radius,
                                                      std::span<const double> offsets = {},
                                                      size_t angle_rank = 0);

/// floor(alpha (3/sqrt2)^m + 1): the range of a coordinate whose basis vector
/// satisfies alpha |w_k| > M.
long bounded_coordinate_range(size_t m, double alpha);

enum class Mode { Exact, Heuristic };

struct Budgets {
  /// Case 1 / Case 2 threshold on |C| and the Case 2 enumeration cap.
  std::uint64_t candidates = 20000;
  /// Rho iterations per factorization.
  std::uint64_t factor_steps = 20000;
  /// Two-squares tests allowed per int_lift call.
  std::uint64_t total_candidates = 400000;
};

enum class Status { Found, NoSolution, BudgetExhausted };

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t case1_nodes = 0;
  std::uint64_t case2_nodes = 0;
  std::uint64_t line_nodes = 0;
  std::uint64_t unknown = 0;
};

struct SearchOutcome {
  Status status = Status::NoSolution;
  IntVector t;  // d + 1 entries when Found
  std::uint64_t candidates_tested = 0;
  Mode mode = Mode::Exact;
  SearchStats stats;
};

SearchOutcome int_lift(const LiftProblem& prob, Mode mode = Mode::Exact, const Budgets& budgets = {});
SearchOutcome int_lift(const LiftProblem& prob, const ModPoint& a, Mode mode = Mode::Exact,
                       const Budgets& budgets = {});

/// s = n / p^h, a point of S^d(Z[1/p]).
struct PadicLift {
  Integer p;
  unsigned h = 0;
  IntVector n;  // d + 1 entries
};

/// Throws std::logic_error unless sum n_i^2 = p^{2h}, n = p^h a mod q and the
/// height is reduced.
void verify_lift(const PadicLift& lift, const ModPoint& a);

struct LiftReport {
  std::optional<PadicLift> lift;
  /// Outcome per h attempted, starting at h = 0.
  std::vector<Status> per_h;
  unsigned h_cap = 0;
  /// Every h below the returned one was ruled out exhaustively.
  bool certified = false;
  std::uint64_t candidates_tested = 0;
  std::string diagnostic;
};

/// Smallest h <= ceil(h_max_factor log_p q) admitting a lift. In exact mode a
/// BudgetExhausted level stops the scan uncertified.
LiftReport minimal_lift(const ModPoint& a, const Integer& p, Mode mode = Mode::Exact,
                        const Budgets& budgets = {}, double h_max_factor = 4.0);

/// ((d-1)/d) h ln p / ln q.
double wp_exponent(const PadicLift& lift, const Integer& q, int d);

const char* to_string(Status s);
const char* to_string(Mode m);

}  // namespace spherelift::lifting
