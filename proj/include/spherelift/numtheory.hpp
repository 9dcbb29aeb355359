#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "spherelift/bigint.hpp"

namespace spherelift::nt {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eed5eedULL;
inline constexpr std::uint64_t kDefaultFactorBudget = 200000;
/// Trial division covers every prime below this bound.
inline constexpr unsigned kTrialDivisionBound = 4096;

struct NotInvertible : std::domain_error {
  using std::domain_error::domain_error;
};

struct BadResidue : std::domain_error {
  using std::domain_error::domain_error;
};

Integer mod_inverse(const Integer& x, const Integer& q);

/// Miller-Rabin. Deterministic base set below 2^64, 64 seeded random bases above.
bool is_probable_prime(const Integer& n, std::uint64_t seed = kDefaultSeed);

/// Smallest probable prime >= n.
Integer next_prime(const Integer& n);

/// Largest prime <= n, or 0 when n < 2. Intended for small n.
std::uint64_t prev_prime(std::uint64_t n);

struct Factor {
  Integer base;
  unsigned exponent = 1;
  /// Set for the leftover cofactor when the factoring budget ran out.
  bool composite = false;
};

struct Factorization {
  Integer n;
  std::vector<Factor> factors;  // strictly increasing bases
  bool complete = true;

  Integer product() const;
};

/// Trial division below kTrialDivisionBound, then Brent's variant of Pollard
/// rho on what remains. `budget` caps the total number of rho iterations.
Factorization factorize(const Integer& n, std::uint64_t budget = kDefaultFactorBudget);

/// Tonelli-Shanks. Returns the root in [0, (p-1)/2], or nullopt for a
/// quadratic non-residue.
std::optional<Integer> sqrt_mod_p(const Integer& a, const Integer& p,
                                  std::uint64_t seed = kDefaultSeed);

struct TwoSquares {
  Integer x;
  Integer y;
  Integer n;
};

/// Cornacchia's descent from a square root of -1 mod p. Throws BadResidue
/// for p = 3 mod 4.
TwoSquares two_squares_prime(const Integer& p, std::uint64_t seed = kDefaultSeed);

struct NotRepresentable {};

/// The factoring budget ran out before representability could be decided.
struct Unknown {
  Integer cofactor;
};

using TwoSquaresResult = std::variant<TwoSquares, NotRepresentable, Unknown>;

/// Sum-of-two-squares decomposition of n >= 0 via factoring and Gaussian
/// integer composition.
TwoSquaresResult two_squares(const Integer& n, std::uint64_t budget = kDefaultFactorBudget);

}  // namespace spherelift::nt
