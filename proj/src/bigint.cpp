#include "spherelift/bigint.hpp"

#include <cmath>
#include <stdexcept>

namespace spherelift {

Integer pow(const Integer& base, unsigned long exponent) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
  return r;
}

Integer mod(const Integer& a, const Integer& m) {
  Integer r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Integer centered_mod(const Integer& a, const Integer& m) {
  Integer r = mod(a, m);
  if (2 * r > m) r -= m;
  return r;
}

Integer round_nearest(const Rational& x) {
  // floor(x + 1/2) = floor((2n + d) / 2d)
  Integer num = 2 * x.get_num() + x.get_den();
  Integer den = 2 * x.get_den();
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return r;
}

Integer floor_sqrt(const Integer& n) {
  if (n < 0) throw std::domain_error("floor_sqrt of a negative integer");
  Integer r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

long double log_abs(const Integer& n) {
  if (n == 0) throw std::domain_error("log of zero");
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, n.get_mpz_t());
  return std::log(std::fabs(static_cast<long double>(mant))) +
         static_cast<long double>(exp2) * std::log(2.0L);
}

long double to_long_double(const Integer& n) {
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, n.get_mpz_t());
  return std::ldexp(static_cast<long double>(mant), static_cast<int>(exp2));
}

long double to_long_double(const Rational& x) {
  long en = 0;
  long ed = 0;
  double mn = mpz_get_d_2exp(&en, x.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, x.get_den_mpz_t());
  return std::ldexp(static_cast<long double>(mn) / static_cast<long double>(md),
                    static_cast<int>(en - ed));
}

std::string to_string(const Integer& n) { return n.get_str(10); }

Integer parse_integer(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.pop_back();
  size_t start = 0;
  while (start < s.size() && (s[start] == ' ' || s[start] == '\t')) ++start;
  s = s.substr(start);
  if (!s.empty() && s[0] == '+') s = s.substr(1);
  if (s.empty() || s == "-") throw std::invalid_argument("empty integer");
  for (size_t i = (s[0] == '-' ? 1 : 0); i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("not an integer: " + std::string(text));
  }
  return Integer(s, 10);
}

Integer uniform_integer(const Integer& bound, Rng& rng) {
  if (bound < 0) throw std::domain_error("uniform_integer: negative bound");
  if (bound == 0) return 0;
  const size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const size_t limbs = (bits + 63) / 64;
  const size_t top_bits = bits - 64 * (limbs - 1);
  for (;;) {
    Integer r = 0;
    for (size_t i = 0; i < limbs; ++i) {
      std::uint64_t word = rng();
      if (i == 0 && top_bits < 64) word &= (std::uint64_t{1} << top_bits) - 1;
      r <<= 64;
      Integer w;
      mpz_import(w.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
      r += w;
    }
    if (r <= bound) return r;
  }
}

Integer dot(const IntVector& u, const IntVector& v) {
  Integer s = 0;
  for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

Integer norm2(const IntVector& v) { return dot(v, v); }

}  // namespace spherelift
