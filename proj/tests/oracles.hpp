#pragma once
// Slow, independent reference computations. Nothing here calls into the
// LLL, lifting or factoring code of the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "spherelift/bigint.hpp"

namespace oracle {

using spherelift::Integer;
using spherelift::IntVector;

inline bool is_prime_td(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t f = 2; f * f <= n; ++f) {
    if (n % f == 0) return false;
  }
  return true;
}

inline std::vector<bool> sieve(std::size_t limit) {
  std::vector<bool> prime(limit + 1, true);
  prime[0] = false;
  if (limit >= 1) prime[1] = false;
  for (std::size_t i = 2; i * i <= limit; ++i) {
    if (!prime[i]) continue;
    for (std::size_t j = i * i; j <= limit; j += i) prime[j] = false;
  }
  return prime;
}

// rep[n] = true iff n = x^2 + y^2, by scanning pairs.
inline std::vector<bool> two_squares_table(std::size_t limit) {
  std::vector<bool> rep(limit + 1, false);
  for (std::size_t x = 0; x * x <= limit; ++x) {
    for (std::size_t y = x; x * x + y * y <= limit; ++y) rep[x * x + y * y] = true;
  }
  return rep;
}

inline long isqrt(long n) {
  if (n < 0) return -1;
  long r = static_cast<long>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline long pmod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

// Calls visit(v, norm2) for every nonzero v in Z^n with <v, a> = 0 mod q and
// |v|^2 <= bound2. Coordinate `pivot` (a[pivot] invertible) is solved for,
// the others are looped over.
template <class Visit>
void lattice_points(long q, const std::vector<long>& a, long bound2, Visit&& visit) {
  const std::size_t n = a.size();
  std::size_t pivot = 0;
  while (a[pivot] % q == 0) ++pivot;
  long inv = 1;
  while (pmod(inv * a[pivot], q) != 1) ++inv;
  std::vector<long> v(n, 0);
  auto rec = [&](auto&& self, std::size_t i, long used, long dotsum) -> void {
    if (i == n) {
      // v[pivot] = -inv * dotsum mod q, all representatives within the bound.
      const long rest = bound2 - used;
      const long reach = isqrt(rest);
      const long base = pmod(-inv * pmod(dotsum, q), q);
      for (long x = base - ((base + reach) / q) * q; x <= reach; x += q) {
        if (x < -reach) continue;
        v[pivot] = x;
        const long n2 = used + x * x;
        if (n2 == 0) continue;
        visit(v, n2);
      }
      v[pivot] = 0;
      return;
    }
    if (i == pivot) {
      self(self, i + 1, used, dotsum);
      return;
    }
    const long reach = isqrt(bound2 - used);
    for (long x = -reach; x <= reach; ++x) {
      v[i] = x;
      self(self, i + 1, used + x * x, pmod(dotsum + x * a[i], q));
    }
    v[i] = 0;
  };
  rec(rec, 0, 0, 0);
}

inline std::size_t rank_of(std::vector<std::vector<long double>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t best = rank;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (std::fabs(rows[r][c]) > std::fabs(rows[best][c])) best = r;
    }
    if (std::fabs(rows[best][c]) < 1e-9L) continue;
    std::swap(rows[rank], rows[best]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const long double f = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

// Whether the vectors of norm^2 <= bound2 span R^n.
inline bool spans(long q, const std::vector<long>& a, long bound2) {
  const std::size_t n = a.size();
  std::vector<std::vector<long double>> basis;
  bool done = false;
  lattice_points(q, a, bound2, [&](const std::vector<long>& v, long) {
    if (done) return;
    std::vector<std::vector<long double>> trial = basis;
    trial.emplace_back(v.begin(), v.end());
    if (rank_of(trial) > basis.size()) {
      basis = std::move(trial);
      if (basis.size() == n) done = true;
    }
  });
  return done;
}

// lambda_n(L(a))^2, the smallest R^2 for which lattice vectors of norm <= R
// span. In rank <= 3 successive-minimum vectors form a basis, so this equals
// min over bases of M(B)^2. `upper` must be a known achievable value.
inline long min_max_norm2(long q, const std::vector<long>& a, long upper) {
  long lo = 0, hi = upper;  // spans(hi) holds
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (spans(q, a, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Smallest h <= h_cap admitting a reduced n in Z^{d+1} with sum n_i^2 = p^{2h}
// and n = p^h a mod q; nullopt if none. a has d + 1 entries (last two zero).
inline std::optional<unsigned> minimal_height(long q, long p, const std::vector<long>& a, unsigned h_cap) {
  const std::size_t head = a.size() - 2;
  for (unsigned h = 0; h <= h_cap; ++h) {
    long ph = 1;
    for (unsigned i = 0; i < h; ++i) ph *= p;
    const long total = ph * ph;
    // two-squares representations (q u)^2 + (q v)^2 = rest, precomputed.
    const long tail_max = total / (q * q);
    std::vector<std::vector<std::pair<long, long>>> tails(tail_max + 1);
    for (long u = 0; u * u <= tail_max; ++u) {
      for (long w = 0; u * u + w * w <= tail_max; ++w) tails[u * u + w * w].push_back({u, w});
    }
    std::vector<long> n(head, 0);
    bool found = false;
    auto reduced_with = [&](long u, long w) {
      if (h == 0) return true;
      for (long x : n) {
        if (x % p != 0) return true;
      }
      return (q * u) % p != 0 || (q * w) % p != 0;
    };
    auto rec = [&](auto&& self, std::size_t i, long used) -> void {
      if (found) return;
      if (i == head) {
        const long rest = total - used;
        if (rest % (q * q) != 0) return;
        for (auto [u, w] : tails[rest / (q * q)]) {
          if (reduced_with(u, w)) {
            found = true;
            return;
          }
        }
        return;
      }
      const long target = pmod(ph % q * a[i], q);
      const long reach = isqrt(total - used);
      for (long x = target - ((target + reach) / q) * q; x <= reach; x += q) {
        if (x < -reach) continue;
        n[i] = x;
        self(self, i + 1, used + x * x);
        if (found) return;
      }
    };
    rec(rec, 0, 0);
    if (found) return h;
  }
  return std::nullopt;
}

}  // namespace oracle
