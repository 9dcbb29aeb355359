#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spherelift/bigint.hpp"
#include "spherelift/lattice.hpp"
#include "spherelift/lifting.hpp"

namespace spherelift::harness {

enum class SampleMode { RandomLog, Generic, Small, FixedOne, FixedTwo };

/// CLI spellings: random-log, generic, small, fixed1, fixed2.
std::optional<SampleMode> parse_sample_mode(const std::string& s);
const char* to_string(SampleMode m);
using spherelift::to_string;

struct SamplerSpec {
  SampleMode mode = SampleMode::RandomLog;
  Integer q;
  int d = 4;
  std::uint64_t seed = 0;
  /// Log-scale window for RandomLog and the fixed modes; 0,0 picks the default.
  long r_lo = 0;
  long r_hi = 0;
};

struct ResampleLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int decimal_digits(const Integer& n);
/// [ceil(0.46 D), ceil(0.96 D)] for a D-digit q.
std::pair<long, long> default_r_range(const Integer& q);

/// Draws a direction according to the mode and scales it onto the sphere:
/// a = lambda x with lambda^2 = 1 / |x|^2 mod q. Log-scale directions with a single
/// nonzero entry are redrawn. Deterministic in spec.seed.
ModPoint sample_point(const SamplerSpec& spec);

/// Largest prime p <= ln q, or 2 when ln q < 2.
Integer default_p(const Integer& q);

struct ExperimentRecord {
  Integer q;
  int d = 0;
  Integer p;
  IntVector coords;
  double eta = 0;
  std::optional<unsigned> h_min;
  double w_p = 0;
  double predicted = 0;
  lifting::Mode mode = lifting::Mode::Heuristic;
  std::uint64_t candidates = 0;
  double elapsed_ms = 0;
  std::string status;
};

/// eta, minimal_lift and w_p for one point. A failure lands in status.
ExperimentRecord measure(const ModPoint& a, const Integer& p, lifting::Mode mode,
                         const lifting::Budgets& budgets, double h_max_factor = 4.0, bool timing = false);

struct ExperimentConfig {
  std::vector<SamplerSpec> specs;
  std::optional<Integer> p;  // default_p(q) when empty
  lifting::Mode mode = lifting::Mode::Heuristic;
  lifting::Budgets budgets;
  double h_max_factor = 4.0;
  /// Off by default so repeated runs give identical bytes.
  bool timing = false;
};

/// One record per spec, in order. Rows are also streamed to csv when given.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, std::ostream* csv = nullptr);

/// Specs for n samples of one mode at one prime; sample i uses seed ^ i.
std::vector<SamplerSpec> batch(SampleMode mode, const Integer& q, int d, std::size_t n, std::uint64_t seed,
                               long r_lo = 0, long r_hi = 0);

std::string format_fixed(double v, int digits = 6);
std::string csv_header();
std::string csv_row(const ExperimentRecord& r);
void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& out);
void write_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path);

/// 800x600 scatter of (eta, w_p) with the dashed line w = ((d-1)/d)(1 + eta).
void write_svg_scatter(const std::vector<ExperimentRecord>& records, std::ostream& out, int d = 4);
void write_svg_scatter(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path,
                       int d = 4);

/// One decimal integer per line; blank lines and '#' comments skipped.
/// Throws std::invalid_argument naming the bad line.
std::vector<Integer> read_prime_list(std::istream& in);
std::vector<Integer> read_prime_list(const std::filesystem::path& path);

struct ConjectureTrial {
  Integer N;
  Integer q;
  IntVector b;
  std::uint64_t set_size = 0;
  bool representable = false;
  std::uint64_t undetermined = 0;  // members whose factorization ran out of budget
};

struct ConjectureReport {
  std::vector<ConjectureTrial> trials;
  /// Empty means no failures (infinity).
  std::optional<std::uint64_t> min_set_size_among_failures;
};

/// Enumerates {t in Z^{d-1} : |t| < r, Q(t) integral, Q(t) >= 0} with
/// Q(t) = (N - |q t + b|^2) / q^2 and checks each value for two squares.
ConjectureTrial conjecture_trial(const lifting::LiftProblem& prob, long r, std::uint64_t factor_steps);

ConjectureReport conjecture_scan(const Integer& q, int d, std::size_t samples, long r,
                                 const lifting::Budgets& budgets, std::uint64_t seed);

void write_conjecture_csv(const ConjectureReport& report, std::ostream& out);

}  // namespace spherelift::harness
