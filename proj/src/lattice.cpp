#include "spherelift/lattice.hpp"

#include <cmath>

#include "spherelift/numtheory.hpp"

namespace spherelift {

ModPoint ModPoint::make(const Integer& q, int d, const IntVector& coords) {
  if (d < 3) throw InvalidPoint("dimension d must be at least 3");
  if (q < 3 || !nt::is_probable_prime(q)) throw InvalidPoint("q must be an odd prime");
  const size_t full = static_cast<size_t>(d) + 1;
  if (coords.size() != full && coords.size() != full - 2) {
    throw InvalidPoint("expected " + std::to_string(full) + " or " + std::to_string(full - 2) +
                       " coordinates, got " + std::to_string(coords.size()));
  }
  ModPoint p{q, d, IntVector(full, 0)};
  for (size_t i = 0; i < coords.size(); ++i) p.coords[i] = mod(coords[i], q);
  if (p.coords[full - 2] != 0 || p.coords[full - 1] != 0) {
    throw InvalidPoint("the last two coordinates must vanish mod q");
  }
  if (mod(norm2(p.coords), q) != 1) throw InvalidPoint("sum of squares is not 1 mod q");
  return p;
}

}  // namespace spherelift

namespace spherelift::lattice {
namespace {

using Matrix = std::vector<IntVector>;

Rational dot(const RatVector& u, const RatVector& v) {
  Rational s = 0;
  for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

void check_shape(const IntegerBasis& basis) {
  if (basis.rows.empty()) throw DependentRows("empty basis");
  const size_t n = basis.dim();
  if (n < basis.rank()) throw DependentRows("more rows than coordinates");
  for (const auto& r : basis.rows) {
    if (r.size() != n) throw std::invalid_argument("ragged basis");
  }
}

}  // namespace

GramSchmidtData gram_schmidt(const IntegerBasis& basis) {
  check_shape(basis);
  const size_t m = basis.rank();
  const size_t n = basis.dim();
  GramSchmidtData gs;
  gs.orthogonal.assign(m, RatVector(n));
  gs.mu.assign(m, RatVector(m, 0));
  gs.norms2.assign(m, 0);
  for (size_t i = 0; i < m; ++i) {
    RatVector v(n);
    for (size_t c = 0; c < n; ++c) v[c] = basis.rows[i][c];
    RatVector w = v;
    for (size_t j = 0; j < i; ++j) {
      Rational mu = dot(v, gs.orthogonal[j]) / gs.norms2[j];
      gs.mu[i][j] = mu;
      for (size_t c = 0; c < n; ++c) w[c] -= mu * gs.orthogonal[j][c];
    }
    gs.norms2[i] = dot(w, w);
    if (gs.norms2[i] == 0) throw DependentRows("row " + std::to_string(i) + " is dependent");
    gs.orthogonal[i] = std::move(w);
  }
  return gs;
}

IntegerBasis lll_reduce(const IntegerBasis& input, const Rational& delta) {
  check_shape(input);
  if (delta <= Rational(1, 4) || delta >= 1) throw std::invalid_argument("delta must lie in (1/4, 1)");
  const Integer& dnum = delta.get_num();
  const Integer& dden = delta.get_den();

  // 1-based arrays following the classical integral formulation:
  // d[i] = prod_{j<=i} |b*_j|^2 and lam[k][j] = d[j] mu_{k,j}.
  const size_t n = input.rank();
  Matrix b(n + 1);
  for (size_t i = 0; i < n; ++i) b[i + 1] = input.rows[i];
  std::vector<Integer> d(n + 1, 0);
  Matrix lam(n + 1, IntVector(n + 1, 0));
  d[0] = 1;
  d[1] = norm2(b[1]);
  if (d[1] == 0) throw DependentRows("row 0 is zero");

  auto reduce = [&](size_t k, size_t l) {
    if (2 * abs(lam[k][l]) <= d[l]) return;
    Integer r = round_nearest(Rational(lam[k][l], d[l]));
    for (size_t c = 0; c < b[k].size(); ++c) b[k][c] -= r * b[l][c];
    lam[k][l] -= r * d[l];
    for (size_t i = 1; i < l; ++i) lam[k][i] -= r * lam[l][i];
  };

  size_t kmax = 1;
  auto swap = [&](size_t k) {
    std::swap(b[k], b[k - 1]);
    for (size_t j = 1; j + 1 < k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
    const Integer l = lam[k][k - 1];
    Integer big = (d[k - 2] * d[k] + l * l);
    mpz_divexact(big.get_mpz_t(), big.get_mpz_t(), d[k - 1].get_mpz_t());
    for (size_t i = k + 1; i <= kmax; ++i) {
      const Integer t = lam[i][k];
      Integer a = d[k] * lam[i][k - 1] - l * t;
      mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), d[k - 1].get_mpz_t());
      lam[i][k] = a;
      Integer c = big * t + l * lam[i][k];
      mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), d[k].get_mpz_t());
      lam[i][k - 1] = c;
    }
    d[k - 1] = big;
  };

  size_t k = 2;
  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      for (size_t j = 1; j <= k; ++j) {
        Integer u = spherelift::dot(b[k], b[j]);
        for (size_t i = 1; i < j; ++i) {
          u = d[i] * u - lam[k][i] * lam[j][i];
          mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d[i - 1].get_mpz_t());
        }
        if (j < k) {
          lam[k][j] = u;
        } else {
          d[k] = u;
          if (d[k] == 0) throw DependentRows("row " + std::to_string(k - 1) + " is dependent");
        }
      }
    }
    reduce(k, k - 1);
    const Integer& l = lam[k][k - 1];
    if (dden * (d[k] * d[k - 2] + l * l) < dnum * d[k - 1] * d[k - 1]) {
      swap(k);
      if (k > 2) --k;
    } else {
      for (size_t ll = k - 2; ll >= 1; --ll) reduce(k, ll);
      ++k;
    }
  }
  IntegerBasis out;
  out.rows.assign(b.begin() + 1, b.end());
  return out;
}

bool verify_lll(const IntegerBasis& basis, const Rational& delta) {
  const GramSchmidtData gs = gram_schmidt(basis);
  const size_t m = basis.rank();
  const Rational half(1, 2);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (abs(gs.mu[i][j]) > half) return false;
    }
  }
  for (size_t i = 0; i + 1 < m; ++i) {
    const Rational& mu = gs.mu[i + 1][i];
    if (delta * gs.norms2[i] > mu * mu * gs.norms2[i] + gs.norms2[i + 1]) return false;
  }
  return true;
}

IntegerBasis lattice_basis_of(const Integer& q, std::span<const Integer> head) {
  const size_t m = head.size();
  size_t pivot = m;
  for (size_t i = 0; i < m; ++i) {
    if (mod(head[i], q) != 0) {
      pivot = i;
      break;
    }
  }
  if (pivot == m) throw ZeroPoint("every coordinate vanishes mod q");
  const Integer inv = centered_mod(nt::mod_inverse(head[pivot], q), q);
  IntegerBasis basis;
  IntVector first(m, 0);
  first[pivot] = q;
  basis.rows.push_back(std::move(first));
  for (size_t i = 0; i < m; ++i) {
    if (i == pivot) continue;
    IntVector row(m, 0);
    row[i] = 1;
    row[pivot] = centered_mod(-inv * head[i], q);
    basis.rows.push_back(std::move(row));
  }
  return basis;
}

IntegerBasis lattice_basis_of(const ModPoint& a) { return lattice_basis_of(a.q, a.head()); }

EtaResult eta(const ModPoint& a) {
  EtaResult out;
  out.basis = lll_reduce(lattice_basis_of(a));
  out.max_norm2 = 0;
  for (const auto& r : out.basis.rows) {
    Integer n2 = norm2(r);
    if (n2 > out.max_norm2) out.max_norm2 = n2;
  }
  const long double lq = log_abs(a.q);
  out.value = static_cast<double>(0.5L * log_abs(out.max_norm2) / lq);
  out.error_bound = static_cast<double>((a.d - 2) * std::log(2.0L) / (2.0L * lq));
  return out;
}

RatVector babai_sin_squared(const IntegerBasis& basis) {
  check_shape(basis);
  const size_t m = basis.rank();
  RatVector out(m);
  for (size_t k = 0; k < m; ++k) {
    IntegerBasis reordered;
    for (size_t i = 0; i < m; ++i) {
      if (i != k) reordered.rows.push_back(basis.rows[i]);
    }
    reordered.rows.push_back(basis.rows[k]);
    const GramSchmidtData gs = gram_schmidt(reordered);
    out[k] = gs.norms2.back() / Rational(norm2(basis.rows[k]));
  }
  return out;
}

std::vector<double> babai_angles(const IntegerBasis& basis) {
  std::vector<double> out;
  for (const auto& s2 : babai_sin_squared(basis)) out.push_back(std::sqrt(s2.get_d()));
  return out;
}

Integer determinant(const IntegerBasis& basis) {
  check_shape(basis);
  const size_t n = basis.rank();
  if (basis.dim() != n) throw std::invalid_argument("determinant of a non-square basis");
  Matrix a = basis.rows;
  Integer prev = 1;
  int sign = 1;
  for (size_t k = 0; k < n; ++k) {
    if (a[k][k] == 0) {
      size_t swap_row = k + 1;
      while (swap_row < n && a[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(a[k], a[swap_row]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j) {
        Integer v = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a[i][j] = v;
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

RatVector coefficients_in(const IntegerBasis& basis, const RatVector& target) {
  check_shape(basis);
  const size_t m = basis.rank();
  const size_t n = basis.dim();
  // Normal equations G c = B t, solved by Gauss-Jordan over Q.
  std::vector<RatVector> aug(m, RatVector(m + 1));
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) aug[i][j] = Rational(spherelift::dot(basis.rows[i], basis.rows[j]));
    Rational rhs = 0;
    for (size_t c = 0; c < n; ++c) rhs += basis.rows[i][c] * target[c];
    aug[i][m] = rhs;
  }
  for (size_t col = 0; col < m; ++col) {
    size_t piv = col;
    while (piv < m && aug[piv][col] == 0) ++piv;
    if (piv == m) throw DependentRows("Gram matrix is singular");
    std::swap(aug[col], aug[piv]);
    for (size_t i = 0; i < m; ++i) {
      if (i == col || aug[i][col] == 0) continue;
      const Rational f = aug[i][col] / aug[col][col];
      for (size_t j = col; j <= m; ++j) aug[i][j] -= f * aug[col][j];
    }
  }
  RatVector c(m);
  for (size_t i = 0; i < m; ++i) c[i] = aug[i][m] / aug[i][i];
  for (size_t col = 0; col < n; ++col) {
    Rational s = 0;
    for (size_t i = 0; i < m; ++i) s += c[i] * basis.rows[i][col];
    if (s != target[col]) throw std::domain_error("target is not in the row span");
  }
  return c;
}

}  // namespace spherelift::lattice
