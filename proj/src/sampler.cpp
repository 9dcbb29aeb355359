#include <algorithm>
#include <cmath>

#include "spherelift/harness.hpp"
#include "spherelift/numtheory.hpp"

namespace spherelift::harness {
namespace {

constexpr int kMaxResamples = 1000;

long uniform_long(long lo, long hi, Rng& rng) {
  return lo + static_cast<long>(uniform_integer(Integer(hi - lo), rng).get_si());
}

Integer log_scale_coordinate(const Integer& q, long r, Rng& rng) {
  Integer bound = q / pow(Integer(10), static_cast<unsigned long>(std::max(0L, r)));
  return uniform_integer(bound, rng);
}

IntVector direction(const SamplerSpec& spec, long r_lo, long r_hi, Rng& rng) {
  const size_t n = static_cast<size_t>(spec.d) - 1;
  IntVector x(n, 0);
  size_t fixed = 0;
  if (spec.mode == SampleMode::FixedOne) fixed = 1;
  if (spec.mode == SampleMode::FixedTwo) fixed = 2;
  fixed = std::min(fixed, n);
  for (size_t i = 0; i < fixed; ++i) x[i] = 1;
  for (size_t i = fixed; i < n; ++i) {
    switch (spec.mode) {
      case SampleMode::Generic:
        x[i] = uniform_integer(spec.q - 1, rng);
        break;
      case SampleMode::Small: {
        const int digits = decimal_digits(spec.q);
        Integer bound = digits > 5 ? Integer(spec.q / pow(Integer(10), static_cast<unsigned long>(digits - 5))) : Integer(spec.q - 1);
        x[i] = uniform_integer(bound, rng);
        break;
      }
      default:
        x[i] = log_scale_coordinate(spec.q, uniform_long(r_lo, r_hi, rng), rng);
        break;
    }
  }
  return x;
}

// A log-scale draw with one nonzero entry scales to +-e_i, the reduction of
// an integral point of the sphere; those are redrawn.
bool degenerate(const SamplerSpec& spec, const IntVector& x) {
  if (spec.mode == SampleMode::Generic || spec.mode == SampleMode::Small) return false;
  return std::count_if(x.begin(), x.end(), [](const Integer& v) { return v != 0; }) < 2;
}

}  // namespace

std::optional<SampleMode> parse_sample_mode(const std::string& s) {
  if (s == "random-log") return SampleMode::RandomLog;
  if (s == "generic") return SampleMode::Generic;
  if (s == "small") return SampleMode::Small;
  if (s == "fixed1") return SampleMode::FixedOne;
  if (s == "fixed2") return SampleMode::FixedTwo;
  return std::nullopt;
}

const char* to_string(SampleMode m) {
  switch (m) {
    case SampleMode::RandomLog: return "random-log";
    case SampleMode::Generic: return "generic";
    case SampleMode::Small: return "small";
    case SampleMode::FixedOne: return "fixed1";
    case SampleMode::FixedTwo: return "fixed2";
  }
  return "?";
}

int decimal_digits(const Integer& n) {
  Integer a = abs(n);
  return a == 0 ? 1 : static_cast<int>(a.get_str().size());
}

std::pair<long, long> default_r_range(const Integer& q) {
  const long digits = decimal_digits(q);
  return {(46 * digits + 99) / 100, (96 * digits + 99) / 100};
}

ModPoint sample_point(const SamplerSpec& spec) {
  if (spec.d < 3) throw std::invalid_argument("d must be at least 3");
  if (spec.q < 3 || !nt::is_probable_prime(spec.q)) throw std::invalid_argument("q must be an odd prime");
  long r_lo = spec.r_lo, r_hi = spec.r_hi;
  if (r_lo == 0 && r_hi == 0) std::tie(r_lo, r_hi) = default_r_range(spec.q);
  if (r_lo > r_hi) throw std::invalid_argument("r_lo must not exceed r_hi");

  Rng rng(spec.seed);
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const IntVector x = direction(spec, r_lo, r_hi, rng);
    const Integer s = mod(norm2(x), spec.q);
    if (s == 0 || degenerate(spec, x)) continue;
    const auto lambda = nt::sqrt_mod_p(nt::mod_inverse(s, spec.q), spec.q);
    if (!lambda) continue;
    IntVector a(x.size());
    for (size_t i = 0; i < x.size(); ++i) a[i] = mod(*lambda * x[i], spec.q);
    return ModPoint::make(spec.q, spec.d, a);
  }
  throw ResampleLimit("no direction with a square norm after " + std::to_string(kMaxResamples) + " draws");
}

Integer default_p(const Integer& q) {
  const long double lq = log_abs(q);
  if (lq < 2.0L) return 2;
  const auto bound = static_cast<std::uint64_t>(std::floor(lq));
  Integer p = Integer(std::to_string(nt::prev_prime(bound)));
  if (p == q) p = Integer(std::to_string(nt::prev_prime(bound - 1)));
  return p;
}

}  // namespace spherelift::harness
