#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace spherelift {

using Integer = mpz_class;
using Rational = mpq_class;
using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;

/// Deterministic generator used everywhere a seed is passed explicitly.
using Rng = std::mt19937_64;

Integer pow(const Integer& base, unsigned long exponent);

/// Least nonnegative residue of a modulo m (m > 0).
Integer mod(const Integer& a, const Integer& m);

/// Residue of a modulo odd m in [-(m-1)/2, (m-1)/2].
Integer centered_mod(const Integer& a, const Integer& m);

/// Nearest integer, halves rounded toward +infinity.
Integer round_nearest(const Rational& x);

Integer floor_sqrt(const Integer& n);

/// Natural logarithm of |n| for n != 0, valid far beyond the double range.
long double log_abs(const Integer& n);

long double to_long_double(const Integer& n);
long double to_long_double(const Rational& x);

std::string to_string(const Integer& n);

/// Parses an optionally signed decimal integer; throws std::invalid_argument.
Integer parse_integer(std::string_view text);

/// Uniform integer in [0, bound] drawn from rng by rejection on 64-bit limbs.
Integer uniform_integer(const Integer& bound, Rng& rng);

Integer dot(const IntVector& u, const IntVector& v);
Integer norm2(const IntVector& v);

}  // namespace spherelift
