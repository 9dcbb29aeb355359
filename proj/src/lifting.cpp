#include "spherelift/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace spherelift::lifting {
namespace {

using lattice::IntegerBasis;

constexpr long double kThreeOverRootTwo = 2.1213203435596425732025330863145471L;

struct StopSearch {};

// Per free-index subset: exact inverse Gram matrix and a floating
// Gram-Schmidt state for enumeration.
struct Subspace {
  std::vector<size_t> index;
  std::vector<RatVector> gram_inverse;
  std::vector<std::vector<long double>> mu;  // mu[i][j], j < i
  std::vector<long double> b2;               // |u*_i|^2
  std::vector<long double> norm;             // |u_i|
};

class Searcher {
 public:
  Searcher(const LiftProblem& prob, const QuadraticForm& form, Mode mode, const Budgets& budgets)
      : prob_(prob), basis_(form.basis()), mode_(mode), budgets_(budgets) {
    rank_ = basis_.rank();
    q2_ = prob.q * prob.q;
    root_.resize(rank_);
    for (size_t i = 0; i < rank_; ++i) root_[i] = prob.q * form.particular()[i] + prob.b[i];
    outcome_.mode = mode;
  }

  SearchOutcome run() {
    try {
      node(root_, (std::uint32_t{1} << rank_) - 1);
    } catch (const StopSearch&) {
    }
    if (outcome_.status != Status::Found) {
      outcome_.status = (mode_ == Mode::Exact && !undecided_) ? Status::NoSolution : Status::BudgetExhausted;
    }
    return outcome_;
  }

 private:
  const Subspace& subspace(std::uint32_t mask) {
    auto it = cache_.find(mask);
    if (it != cache_.end()) return it->second;
    Subspace s;
    for (size_t i = 0; i < rank_; ++i) {
      if (mask & (std::uint32_t{1} << i)) s.index.push_back(i);
    }
    const size_t m = s.index.size();
    if (m > 0) {
      IntegerBasis sub;
      for (size_t i : s.index) sub.rows.push_back(basis_.rows[i]);
      std::vector<RatVector> aug(m, RatVector(2 * m, 0));
      for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) aug[i][j] = Rational(dot(sub.rows[i], sub.rows[j]));
        aug[i][m + i] = 1;
      }
      for (size_t col = 0; col < m; ++col) {
        size_t piv = col;
        while (aug[piv][col] == 0) ++piv;
        std::swap(aug[col], aug[piv]);
        const Rational inv = 1 / aug[col][col];
        for (auto& v : aug[col]) v *= inv;
        for (size_t i = 0; i < m; ++i) {
          if (i == col || aug[i][col] == 0) continue;
          const Rational f = aug[i][col];
          for (size_t j = 0; j < 2 * m; ++j) aug[i][j] -= f * aug[col][j];
        }
      }
      s.gram_inverse.assign(m, RatVector(m));
      for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) s.gram_inverse[i][j] = aug[i][m + j];
      }
      const lattice::GramSchmidtData gs = lattice::gram_schmidt(sub);
      s.mu.assign(m, std::vector<long double>(m, 0));
      s.b2.resize(m);
      s.norm.resize(m);
      for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < i; ++j) s.mu[i][j] = to_long_double(gs.mu[i][j]);
        s.b2[i] = to_long_double(gs.norms2[i]);
        s.norm[i] = std::sqrt(to_long_double(norm2(sub.rows[i])));
      }
    }
    return cache_.emplace(mask, std::move(s)).first->second;
  }

  // Explores every candidate base + sum_{i free} y_i u_i (coordinates scaled by q).
  void node(IntVector base, std::uint32_t mask) {
    ++outcome_.stats.nodes;
    const Subspace& sub = subspace(mask);
    const size_t m = sub.index.size();
    const Integer& q = prob_.q;

    if (m == 0) {
      test(base);
      return;
    }

    // Project base onto the free span: alpha = G^{-1} c / q.
    IntVector c(m);
    for (size_t i = 0; i < m; ++i) c[i] = dot(basis_.rows[sub.index[i]], base);
    RatVector alpha(m, 0);
    Rational quad = 0;
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j < m; ++j) alpha[i] += sub.gram_inverse[i][j] * c[j];
      quad += alpha[i] * c[i];
      alpha[i] /= q;
    }
    // q^2 R^2 = N - |base|^2 + c^T G^{-1} c
    const Rational radius2 = (Rational(prob_.N - norm2(base)) + quad) / Rational(q2_);
    if (radius2 < 0) return;

    std::vector<long double> s(m);
    for (size_t i = 0; i < m; ++i) {
      Integer shift = round_nearest(alpha[i]);
      if (shift != 0) {
        const auto& u = basis_.rows[sub.index[i]];
        for (size_t col = 0; col < base.size(); ++col) base[col] -= q * shift * u[col];
      }
      s[i] = to_long_double(alpha[i] - shift);
      alpha[i] -= shift;
    }

    // Box hypothesis 2m|u_i| < R, checked exactly as 4 m^2 |u_i|^2 < R^2.
    const Integer four_m2 = 4 * static_cast<unsigned long>(m * m);
    size_t failing = m;
    for (size_t i = 0; i < m; ++i) {
      const Integer n2 = norm2(basis_.rows[sub.index[i]]);
      if (Rational(four_m2 * n2) >= radius2) {
        if (failing == m || n2 > norm2(basis_.rows[sub.index[failing]])) failing = i;
      }
    }
    const long double radius = std::sqrt(to_long_double(radius2));

    if (failing == m) {
      std::vector<long double> half(m);
      long double count = 1;
      for (size_t i = 0; i < m; ++i) {
        half[i] = radius / (static_cast<long double>(m) * sub.norm[i]) - 0.5L;
        count *= 2 * std::floor(half[i]) + 1;
      }
      if (count <= static_cast<long double>(budgets_.candidates)) {
        ++outcome_.stats.case1_nodes;
        enumerate_positive(base, sub, s, to_long_double(radius2), half);
      } else {
        ++outcome_.stats.case2_nodes;
        enumerate_box(base, sub, half);
      }
      return;
    }

    // Line path: the coordinate along the long vector u_k takes boundedly
    // many values. The child radius is R^2 - (s_k + l)^2 |u_k^perp|^2 with
    // |u_k^perp|^2 = 1 / (G^{-1})_{kk}.
    ++outcome_.stats.line_nodes;
    const size_t k = failing;
    const long bound = bounded_coordinate_range(rank_, 2.0 * static_cast<double>(m));
    const Rational& ginv_kk = sub.gram_inverse[k][k];
    const Rational limit2 = radius2 * ginv_kk;  // (s_k + l)^2 <= limit2
    auto admissible = [&](long l) {
      const Rational z = alpha[k] + l;
      return z * z <= limit2;
    };
    if (admissible(bound + 1) || admissible(-bound - 1)) {
      throw std::logic_error("line search coordinate bound violated");
    }
    const long double width = std::sqrt(to_long_double(limit2));
    const long lo = std::max(-bound, static_cast<long>(std::floor(-s[k] - width)) - 1);
    const long hi = std::min(bound, static_cast<long>(std::ceil(-s[k] + width)) + 1);
    std::vector<long> values;
    for (long l = lo; l <= hi; ++l) {
      if (admissible(l)) values.push_back(l);
    }
    std::stable_sort(values.begin(), values.end(), [&](long x, long y) {
      return std::fabs(s[k] + x) < std::fabs(s[k] + y);
    });
    const auto& uk = basis_.rows[sub.index[k]];
    const std::uint32_t child_mask = mask & ~(std::uint32_t{1} << sub.index[k]);
    for (long l : values) {
      IntVector child = base;
      for (size_t col = 0; col < child.size(); ++col) child[col] += q * l * uk[col];
      node(std::move(child), child_mask);
    }
  }

  // Case 1: every integer y with F >= 0, found by depth-first enumeration in
  // the Gram-Schmidt frame. Each hit is checked against the blown-up box.
  void enumerate_positive(const IntVector& base, const Subspace& sub, const std::vector<long double>& s,
                          long double radius2, const std::vector<long double>& half) {
    const size_t m = sub.index.size();
    const long double scale = 2.0L * m * std::pow(kThreeOverRootTwo, static_cast<long double>(rank_));
    const long double slack = radius2 * 1e-12L + 1e-9L;
    std::vector<long> y(m, 0);
    std::vector<long double> z(m, 0);
    auto recurse = [&](auto&& self, size_t level, long double remaining) -> void {
      const size_t i = level - 1;
      long double center = 0;
      for (size_t j = i + 1; j < m; ++j) center -= sub.mu[j][i] * z[j];
      const long double width = std::sqrt(std::max(0.0L, remaining) / sub.b2[i]);
      const long y_lo = static_cast<long>(std::ceil(center - width - s[i] - 1e-9L));
      const long y_hi = static_cast<long>(std::floor(center + width - s[i] + 1e-9L));
      for (long v = y_lo; v <= y_hi; ++v) {
        y[i] = v;
        z[i] = s[i] + v;
        const long double diff = z[i] - center;
        const long double rest = remaining - sub.b2[i] * diff * diff;
        if (rest < -slack) continue;
        if (i == 0) {
          if (probe(base, sub, y)) {
            for (size_t t = 0; t < m; ++t) {
              if (std::fabs(static_cast<long double>(y[t])) > scale * half[t] + 1) {
                throw std::logic_error("positive point outside the blown-up box");
              }
            }
          }
        } else {
          self(self, level - 1, rest);
        }
      }
    };
    recurse(recurse, m, radius2 + slack);
  }

  // Case 2: integer points of C by nondecreasing max-norm, lexicographic
  // within a shell, up to the candidate budget.
  void enumerate_box(const IntVector& base, const Subspace& sub, const std::vector<long double>& half) {
    const size_t m = sub.index.size();
    std::vector<long> lim(m);
    long outer = 0;
    for (size_t i = 0; i < m; ++i) {
      const long double h = std::floor(half[i]);
      lim[i] = h > 1e15L ? static_cast<long>(1e15) : static_cast<long>(h);
      outer = std::max(outer, lim[i]);
    }
    std::uint64_t tested = 0;
    std::vector<long> y(m);
    for (long r = 0; r <= outer; ++r) {
      std::vector<long> cap(m);
      for (size_t i = 0; i < m; ++i) {
        cap[i] = std::min(r, lim[i]);
        y[i] = -cap[i];
      }
      for (;;) {
        long mx = 0;
        for (long v : y) mx = std::max(mx, std::labs(v));
        if (mx == r) {
          probe(base, sub, y);
          if (++tested >= budgets_.candidates) {
            undecided_ = true;
            return;
          }
        }
        size_t pos = m;
        while (pos > 0) {
          --pos;
          if (y[pos] < cap[pos]) {
            ++y[pos];
            for (size_t j = pos + 1; j < m; ++j) y[j] = -cap[j];
            break;
          }
          if (pos == 0) goto shell_done;
        }
        if (m == 0) break;
      }
    shell_done:;
    }
  }

  // Returns true when F at the point is nonnegative (and therefore tested).
  bool probe(const IntVector& base, const Subspace& sub, const std::vector<long>& y) {
    IntVector p = base;
    for (size_t i = 0; i < y.size(); ++i) {
      if (y[i] == 0) continue;
      const Integer scaled = prob_.q * y[i];
      const auto& u = basis_.rows[sub.index[i]];
      for (size_t col = 0; col < p.size(); ++col) p[col] += scaled * u[col];
    }
    return test(p);
  }

  bool test(const IntVector& point) {
    Integer excess = prob_.N - norm2(point);
    if (excess < 0) return false;
    if (!mpz_divisible_p(excess.get_mpz_t(), q2_.get_mpz_t())) {
      throw std::logic_error("F(x) is not integral; condition 2 was lost");
    }
    mpz_divexact(excess.get_mpz_t(), excess.get_mpz_t(), q2_.get_mpz_t());
    ++outcome_.candidates_tested;
    const auto rep = nt::two_squares(excess, budgets_.factor_steps);
    if (const auto* ts = std::get_if<nt::TwoSquares>(&rep)) {
      outcome_.status = Status::Found;
      outcome_.t.assign(static_cast<size_t>(prob_.d) + 1, 0);
      for (size_t i = 0; i < point.size(); ++i) {
        Integer t = point[i] - prob_.b[i];
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prob_.q.get_mpz_t());
        outcome_.t[i] = t;
      }
      outcome_.t[point.size()] = ts->x;
      outcome_.t[point.size() + 1] = ts->y;
      throw StopSearch{};
    }
    if (std::holds_alternative<nt::Unknown>(rep)) {
      ++outcome_.stats.unknown;
      undecided_ = true;
    }
    if (outcome_.candidates_tested >= budgets_.total_candidates) {
      undecided_ = true;
      throw StopSearch{};
    }
    return true;
  }

  const LiftProblem& prob_;
  const IntegerBasis& basis_;
  Mode mode_;
  Budgets budgets_;
  size_t rank_ = 0;
  Integer q2_;
  IntVector root_;
  bool undecided_ = false;
  SearchOutcome outcome_;
  std::unordered_map<std::uint32_t, Subspace> cache_;
};

size_t pivot_of(const Integer& q, const IntVector& v) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (mod(v[i], q) != 0) return i;
  }
  throw lattice::ZeroPoint("no coordinate is invertible mod q");
}

void check_same_line(const LiftProblem& prob, const ModPoint& a) {
  // b must be a multiple of a mod q for L(b) = L(a).
  const auto head = a.head();
  if (head.size() != prob.b.size()) throw std::invalid_argument("dimension mismatch between problem and point");
  const size_t j = pivot_of(prob.q, IntVector(head.begin(), head.end()));
  const Integer ratio = mod(prob.b[j] * nt::mod_inverse(head[j], prob.q), prob.q);
  for (size_t i = 0; i < head.size(); ++i) {
    if (mod(prob.b[i] - ratio * head[i], prob.q) != 0) {
      throw std::invalid_argument("problem vector b is not proportional to the point mod q");
    }
  }
}

}  // namespace

LiftProblem make_problem(const ModPoint& a, const Integer& p, unsigned h) {
  if (mod(p, a.q) == 0) throw std::invalid_argument("p must differ from q");
  LiftProblem prob;
  prob.q = a.q;
  prob.d = a.d;
  const Integer ph = pow(p, h);
  prob.N = ph * ph;
  for (const auto& ai : a.head()) prob.b.push_back(mod(ai * ph, a.q));
  return prob;
}

void validate(const LiftProblem& prob) {
  if (prob.d < 3 || prob.b.size() != static_cast<size_t>(prob.d) - 1) {
    throw std::invalid_argument("b must have d - 1 entries, d >= 3");
  }
  if (prob.N <= 0) throw std::invalid_argument("N must be positive");
  Integer g;
  mpz_gcd(g.get_mpz_t(), prob.N.get_mpz_t(), prob.q.get_mpz_t());
  if (g != 1) throw std::invalid_argument("gcd(N, q) must be 1");
  if (mod(prob.N - norm2(prob.b), prob.q) != 0) throw std::invalid_argument("|b|^2 != N mod q");
}

IntVector solve_condition2(const LiftProblem& prob) {
  validate(prob);
  Integer k = prob.N - norm2(prob.b);
  mpz_divexact(k.get_mpz_t(), k.get_mpz_t(), prob.q.get_mpz_t());
  const size_t j = pivot_of(prob.q, prob.b);
  const Integer inv = nt::mod_inverse(2 * prob.b[j], prob.q);
  IntVector t0(prob.b.size(), 0);
  t0[j] = mod(k * inv, prob.q);
  return t0;
}

QuadraticForm::QuadraticForm(const LiftProblem& prob, lattice::IntegerBasis reduced)
    : prob_(prob), basis_(std::move(reduced)) {
  t0_ = solve_condition2(prob_);
  RatVector target(prob_.b.size());
  for (size_t i = 0; i < target.size(); ++i) {
    target[i] = Rational(prob_.q * t0_[i] + prob_.b[i], prob_.q);
    target[i].canonicalize();
  }
  const RatVector c = lattice::coefficients_in(basis_, target);
  for (const auto& ci : c) {
    Integer k = round_nearest(ci);
    shifts_.push_back(k);
    offsets_.push_back(ci - k);
  }
}

IntVector QuadraticForm::t_of(std::span<const Integer> x) const {
  if (x.size() != basis_.rank()) throw std::invalid_argument("x has the wrong length");
  IntVector t = t0_;
  for (size_t i = 0; i < x.size(); ++i) {
    const Integer coeff = x[i] - shifts_[i];
    for (size_t col = 0; col < t.size(); ++col) t[col] += coeff * basis_.rows[i][col];
  }
  return t;
}

Integer QuadraticForm::value_at_t(const IntVector& t) const {
  Integer s = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    const Integer v = prob_.q * t[i] + prob_.b[i];
    s += v * v;
  }
  Integer num = prob_.N - s;
  const Integer q2 = prob_.q * prob_.q;
  if (!mpz_divisible_p(num.get_mpz_t(), q2.get_mpz_t())) {
    throw std::invalid_argument("t does not satisfy condition 2");
  }
  mpz_divexact(num.get_mpz_t(), num.get_mpz_t(), q2.get_mpz_t());
  return num;
}

Integer QuadraticForm::value(std::span<const Integer> x) const { return value_at_t(t_of(x)); }

QuadraticForm build_F(const LiftProblem& prob) {
  validate(prob);
  return QuadraticForm(prob, lattice::lll_reduce(lattice::lattice_basis_of(prob.q, prob.b)));
}

QuadraticForm build_F(const LiftProblem& prob, const ModPoint& a) {
  check_same_line(prob, a);
  return build_F(prob);
}

std::variant<SearchBox, HypothesisFailed> compute_box(std::span<const double> norms, double radius,
                                                      std::span<const double> offsets, size_t angle_rank) {
  const size_t m = norms.size();
  if (m == 0) throw std::invalid_argument("compute_box needs at least one vector");
  for (size_t i = 0; i < m; ++i) {
    if (2.0 * static_cast<double>(m) * norms[i] >= radius) return HypothesisFailed{i};
  }
  SearchBox box;
  box.m = m;
  for (size_t i = 0; i < m; ++i) box.half_widths.push_back(radius / (static_cast<double>(m) * norms[i]) - 0.5);
  box.offsets.assign(offsets.begin(), offsets.end());
  if (box.offsets.empty()) box.offsets.assign(m, 0.0);
  const size_t rank = angle_rank == 0 ? m : angle_rank;
  box.scale = static_cast<double>(2.0L * m * std::pow(kThreeOverRootTwo, static_cast<long double>(rank)));
  return box;
}

long bounded_coordinate_range(size_t m, double alpha) {
  const long double growth = std::pow(4.5L, static_cast<long double>(m) / 2.0L);
  return static_cast<long>(std::floor(static_cast<long double>(alpha) * growth + 1.0L));
}

SearchOutcome int_lift(const LiftProblem& prob, Mode mode, const Budgets& budgets) {
  const QuadraticForm form = build_F(prob);
  return Searcher(prob, form, mode, budgets).run();
}

SearchOutcome int_lift(const LiftProblem& prob, const ModPoint& a, Mode mode, const Budgets& budgets) {
  check_same_line(prob, a);
  return int_lift(prob, mode, budgets);
}

void verify_lift(const PadicLift& lift, const ModPoint& a) {
  if (lift.n.size() != a.coords.size()) throw std::logic_error("lift has the wrong length");
  const Integer ph = pow(lift.p, lift.h);
  if (norm2(lift.n) != ph * ph) throw std::logic_error("sum of squares is not p^(2h)");
  for (size_t i = 0; i < lift.n.size(); ++i) {
    if (mod(lift.n[i] - ph * a.coords[i], a.q) != 0) throw std::logic_error("lift does not reduce to a mod q");
  }
  if (lift.h > 0) {
    const bool all_divisible = std::all_of(lift.n.begin(), lift.n.end(), [&](const Integer& v) {
      return mpz_divisible_p(v.get_mpz_t(), lift.p.get_mpz_t()) != 0;
    });
    if (all_divisible) throw std::logic_error("lift height is not reduced");
  }
}

LiftReport minimal_lift(const ModPoint& a, const Integer& p, Mode mode, const Budgets& budgets,
                        double h_max_factor) {
  if (p == a.q) throw std::invalid_argument("p must differ from q");
  if (!nt::is_probable_prime(p)) throw std::invalid_argument("p must be prime");
  LiftReport report;
  const long double log_ratio = log_abs(a.q) / log_abs(p);
  report.h_cap = static_cast<unsigned>(std::ceil(static_cast<long double>(h_max_factor) * log_ratio - 1e-12L));
  bool all_ruled_out = true;
  for (unsigned h = 0; h <= report.h_cap; ++h) {
    const LiftProblem prob = make_problem(a, p, h);
    const SearchOutcome out = int_lift(prob, mode, budgets);
    report.per_h.push_back(out.status);
    report.candidates_tested += out.candidates_tested;
    if (out.status == Status::Found) {
      PadicLift lift{p, h, IntVector(a.coords.size(), 0)};
      const size_t head = prob.b.size();
      for (size_t i = 0; i < head; ++i) lift.n[i] = prob.q * out.t[i] + prob.b[i];
      lift.n[head] = prob.q * out.t[head];
      lift.n[head + 1] = prob.q * out.t[head + 1];
      while (lift.h > 0 && std::all_of(lift.n.begin(), lift.n.end(), [&](const Integer& v) {
               return mpz_divisible_p(v.get_mpz_t(), p.get_mpz_t()) != 0;
             })) {
        for (auto& v : lift.n) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t());
        --lift.h;
      }
      verify_lift(lift, a);
      report.certified = mode == Mode::Exact && all_ruled_out;
      report.lift = std::move(lift);
      return report;
    }
    if (out.status == Status::BudgetExhausted) {
      all_ruled_out = false;
      if (mode == Mode::Exact) {
        report.diagnostic = "search budget exhausted at h = " + std::to_string(h) +
                            "; minimality cannot be certified";
        return report;
      }
    }
  }
  report.diagnostic = "no lift with h <= " + std::to_string(report.h_cap);
  return report;
}

double wp_exponent(const PadicLift& lift, const Integer& q, int d) {
  if (lift.h == 0) return 0.0;
  const long double ratio = log_abs(lift.p) / log_abs(q);
  return static_cast<double>(static_cast<long double>(d - 1) / d * lift.h * ratio);
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Found: return "found";
    case Status::NoSolution: return "no_solution";
    case Status::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

const char* to_string(Mode m) { return m == Mode::Exact ? "exact" : "heuristic"; }

}  // namespace spherelift::lifting
