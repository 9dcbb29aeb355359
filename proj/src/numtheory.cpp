#include "spherelift/numtheory.hpp"

#include <algorithm>
#include <array>

namespace spherelift::nt {
namespace {

const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    std::vector<bool> composite(kTrialDivisionBound, false);
    std::vector<unsigned> out;
    for (unsigned i = 2; i < kTrialDivisionBound; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned j = i * i; j < kTrialDivisionBound; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

bool miller_rabin_round(const Integer& n, const Integer& n_minus_1, const Integer& odd,
                        unsigned twos, const Integer& base) {
  Integer x;
  mpz_powm(x.get_mpz_t(), base.get_mpz_t(), odd.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n_minus_1) return true;
  for (unsigned i = 1; i < twos; ++i) {
    x = x * x % n;
    if (x == n_minus_1) return true;
    if (x == 1) return false;
  }
  return false;
}

unsigned strip_valuation(Integer& n, const Integer& p) {
  unsigned e = 0;
  while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
    mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
    ++e;
  }
  return e;
}

// Root s with n = s^k for the largest such k > 1, if n is a perfect power.
std::optional<Integer> perfect_power_root(const Integer& n) {
  if (!mpz_perfect_power_p(n.get_mpz_t()) || n < 4) return std::nullopt;
  const size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  for (unsigned long k = bits; k >= 2; --k) {
    Integer root;
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0 && root > 1) return root;
  }
  return std::nullopt;
}

// Brent's cycle-finding variant of Pollard rho. Consumes budget per iteration.
std::optional<Integer> rho_divisor(const Integer& n, std::uint64_t& budget) {
  if (mpz_even_p(n.get_mpz_t())) return Integer(2);
  constexpr std::uint64_t kBatch = 128;
  Integer x, y, ys, q, g, diff;
  for (unsigned long c = 1; budget > 0; ++c) {
    auto step = [&](Integer& v) {
      mpz_mul(v.get_mpz_t(), v.get_mpz_t(), v.get_mpz_t());
      mpz_add_ui(v.get_mpz_t(), v.get_mpz_t(), c);
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    y = c + 1;
    q = 1;
    g = 1;
    std::uint64_t r = 1;
    while (g == 1 && budget > 0) {
      x = y;
      for (std::uint64_t i = 0; i < r && budget > 0; ++i, --budget) step(y);
      std::uint64_t k = 0;
      while (k < r && g == 1 && budget > 0) {
        ys = y;
        const std::uint64_t stop = std::min(kBatch, r - k);
        for (std::uint64_t i = 0; i < stop && budget > 0; ++i, --budget) {
          step(y);
          mpz_sub(diff.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
          mpz_mul(q.get_mpz_t(), q.get_mpz_t(), diff.get_mpz_t());
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += kBatch;
      }
      r *= 2;
    }
    if (g == n) {
      // Batched product collapsed; replay one step at a time.
      g = 1;
      while (g == 1 && budget > 0) {
        step(ys);
        --budget;
        mpz_sub(diff.get_mpz_t(), x.get_mpz_t(), ys.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      }
    }
    if (g > 1 && g < n) return g;
  }
  return std::nullopt;
}

std::optional<Integer> find_divisor(const Integer& n, std::uint64_t& budget) {
  if (auto root = perfect_power_root(n)) return root;
  return rho_divisor(n, budget);
}

// Distinct prime divisors of n, or nullopt if the budget ran out.
std::optional<std::vector<Integer>> distinct_primes(const Integer& n, std::uint64_t& budget) {
  std::vector<Integer> out;
  std::vector<Integer> pending{n};
  while (!pending.empty()) {
    Integer m = std::move(pending.back());
    pending.pop_back();
    if (m == 1) continue;
    if (is_probable_prime(m)) {
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
      continue;
    }
    auto g = find_divisor(m, budget);
    if (!g) return std::nullopt;
    pending.push_back(*g);
    pending.push_back(m / *g);
  }
  return out;
}

struct Gaussian {
  Integer re = 1;
  Integer im = 0;

  void multiply(const Integer& a, const Integer& b) {
    Integer r = re * a - im * b;
    im = re * b + im * a;
    re = std::move(r);
  }
  void scale(const Integer& s) {
    re *= s;
    im *= s;
  }
};

// Multiplies acc by the two-squares representation of r^e. Returns false when
// r^e has a prime = 3 mod 4 to an odd power.
bool absorb_prime_power(Gaussian& acc, const Integer& r, unsigned e) {
  if (r == 2) {
    for (unsigned i = 0; i < e; ++i) acc.multiply(1, 1);
    return true;
  }
  if (mpz_fdiv_ui(r.get_mpz_t(), 4) == 3) {
    if (e % 2 == 1) return false;
    acc.scale(pow(r, e / 2));
    return true;
  }
  TwoSquares rep = two_squares_prime(r);
  for (unsigned i = 0; i < e; ++i) acc.multiply(rep.x, rep.y);
  return true;
}

}  // namespace

Integer Factorization::product() const {
  Integer p = 1;
  for (const auto& f : factors) p *= pow(f.base, f.exponent);
  return p;
}

Integer mod_inverse(const Integer& x, const Integer& q) {
  if (q < 2) throw std::domain_error("mod_inverse: modulus must be >= 2");
  Integer r;
  if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), q.get_mpz_t()) == 0) {
    throw NotInvertible("mod_inverse: " + to_string(x) + " is not invertible mod " + to_string(q));
  }
  return mod(r, q);
}

bool is_probable_prime(const Integer& n, std::uint64_t seed) {
  if (n < 2) return false;
  for (unsigned p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  const Integer n_minus_1 = n - 1;
  Integer odd = n_minus_1;
  unsigned twos = 0;
  while (mpz_even_p(odd.get_mpz_t())) {
    odd >>= 1;
    ++twos;
  }
  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
    // Deterministic for every n < 2^64.
    for (unsigned b : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
      if (!miller_rabin_round(n, n_minus_1, odd, twos, Integer(b))) return false;
    }
    return true;
  }
  Rng rng(seed);
  const Integer span = n - 4;
  for (int i = 0; i < 64; ++i) {
    Integer base = uniform_integer(span, rng) + 2;
    if (!miller_rabin_round(n, n_minus_1, odd, twos, base)) return false;
  }
  return true;
}

Integer next_prime(const Integer& n) {
  if (n <= 2) return 2;
  Integer c = n;
  if (mpz_even_p(c.get_mpz_t())) ++c;
  while (!is_probable_prime(c)) c += 2;
  return c;
}

std::uint64_t prev_prime(std::uint64_t n) {
  for (std::uint64_t c = n; c >= 2; --c) {
    if (is_probable_prime(Integer(static_cast<unsigned long>(c)))) return c;
  }
  return 0;
}

Factorization factorize(const Integer& n, std::uint64_t budget) {
  if (n < 1) throw std::domain_error("factorize: n must be positive");
  Factorization out{n, {}, true};
  Integer rest = n;
  for (unsigned p : small_primes()) {
    if (rest == 1) break;
    if (rest < Integer(p) * p) break;
    unsigned e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++e;
    }
    if (e > 0) out.factors.push_back({Integer(p), e, false});
  }
  while (rest > 1) {
    if (is_probable_prime(rest)) {
      out.factors.push_back({rest, 1, false});
      break;
    }
    auto g = find_divisor(rest, budget);
    std::optional<std::vector<Integer>> primes;
    if (g) primes = distinct_primes(*g, budget);
    if (!primes) {
      out.factors.push_back({rest, 1, true});
      out.complete = false;
      break;
    }
    for (const auto& r : *primes) {
      unsigned e = strip_valuation(rest, r);
      out.factors.push_back({r, e, false});
    }
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const Factor& a, const Factor& b) { return a.base < b.base; });
  return out;
}

std::optional<Integer> sqrt_mod_p(const Integer& a_in, const Integer& p, std::uint64_t seed) {
  if (p < 3 || mpz_even_p(p.get_mpz_t())) throw std::domain_error("sqrt_mod_p: p must be an odd prime");
  const Integer a = mod(a_in, p);
  if (a == 0) return Integer(0);
  auto powm = [&](const Integer& b, const Integer& e) {
    Integer r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    return r;
  };
  if (powm(a, (p - 1) / 2) != 1) return std::nullopt;

  Integer root;
  if (mpz_fdiv_ui(p.get_mpz_t(), 4) == 3) {
    root = powm(a, (p + 1) / 4);
  } else {
    Integer odd = p - 1;
    unsigned twos = 0;
    while (mpz_even_p(odd.get_mpz_t())) {
      odd >>= 1;
      ++twos;
    }
    Rng rng(seed);
    Integer z;
    for (int tries = 0;; ++tries) {
      if (tries > 1000) throw std::domain_error("sqrt_mod_p: no non-residue found; p is not prime");
      z = uniform_integer(p - 3, rng) + 2;
      if (powm(z, (p - 1) / 2) == p - 1) break;
    }
    Integer c = powm(z, odd);
    Integer t = powm(a, odd);
    root = powm(a, (odd + 1) / 2);
    unsigned m = twos;
    while (t != 1) {
      unsigned i = 0;
      Integer t2 = t;
      while (t2 != 1) {
        t2 = t2 * t2 % p;
        ++i;
        if (i == m) throw std::domain_error("sqrt_mod_p: p is not prime");
      }
      Integer b = c;
      for (unsigned j = 0; j + i + 1 < m; ++j) b = b * b % p;
      root = root * b % p;
      c = b * b % p;
      t = t * c % p;
      m = i;
    }
  }
  if (2 * root > p) root = p - root;
  if (root * root % p != a) throw std::domain_error("sqrt_mod_p: p is not prime");
  return root;
}

TwoSquares two_squares_prime(const Integer& p, std::uint64_t seed) {
  if (p == 2) return {1, 1, 2};
  if (p < 2 || mpz_fdiv_ui(p.get_mpz_t(), 4) != 1) {
    throw BadResidue("two_squares_prime: " + to_string(p) + " is not 2 or 1 mod 4");
  }
  Rng rng(seed);
  const Integer quarter = (p - 1) / 4;
  Integer r;
  for (int tries = 0;; ++tries) {
    if (tries > 1000) throw std::domain_error("two_squares_prime: p is not prime");
    Integer z = uniform_integer(p - 3, rng) + 2;
    mpz_powm(r.get_mpz_t(), z.get_mpz_t(), quarter.get_mpz_t(), p.get_mpz_t());
    if (r * r % p == p - 1) break;
  }
  Integer a = p;
  Integer b = r;
  while (b * b > p) {
    Integer t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  Integer y2 = p - b * b;
  Integer y = floor_sqrt(y2);
  if (y * y != y2) throw std::domain_error("two_squares_prime: p is not prime");
  Integer x = b;
  if (x > y) std::swap(x, y);
  return {x, y, p};
}

TwoSquaresResult two_squares(const Integer& n, std::uint64_t budget) {
  if (n < 0) return NotRepresentable{};
  if (n == 0) return TwoSquares{0, 0, 0};
  Gaussian acc;
  Integer rest = n;
  for (unsigned p : small_primes()) {
    if (rest == 1) break;
    if (rest < Integer(p) * p) break;
    unsigned e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++e;
    }
    if (e > 0 && !absorb_prime_power(acc, Integer(p), e)) return NotRepresentable{};
  }
  // rest is coprime to every prime absorbed so far, so rest = 3 mod 4 forces
  // some prime = 3 mod 4 to an odd power.
  while (rest > 1) {
    if (mpz_fdiv_ui(rest.get_mpz_t(), 4) == 3) return NotRepresentable{};
    if (is_probable_prime(rest)) {
      if (!absorb_prime_power(acc, rest, 1)) return NotRepresentable{};
      break;
    }
    if (mpz_perfect_square_p(rest.get_mpz_t())) {
      acc.scale(floor_sqrt(rest));
      break;
    }
    auto g = find_divisor(rest, budget);
    std::optional<std::vector<Integer>> primes;
    if (g) primes = distinct_primes(*g, budget);
    if (!primes) return Unknown{rest};
    for (const auto& r : *primes) {
      unsigned e = strip_valuation(rest, r);
      if (!absorb_prime_power(acc, r, e)) return NotRepresentable{};
    }
  }
  Integer x = abs(acc.re);
  Integer y = abs(acc.im);
  if (x > y) std::swap(x, y);
  return TwoSquares{x, y, n};
}

}  // namespace spherelift::nt
