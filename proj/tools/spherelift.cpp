// spherelift: eta, minimal lifts and the w_p experiments from the command line.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "spherelift/harness.hpp"
#include "spherelift/lifting.hpp"
#include "spherelift/numtheory.hpp"

using namespace spherelift;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

IntVector parse_coords(const std::string& text) {
  IntVector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_integer(item));
    } catch (const std::invalid_argument&) {
      throw UsageError("bad coordinate '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--a needs at least one coordinate");
  return out;
}

Integer parse_int_arg(const std::string& text, const char* name) {
  try {
    return parse_integer(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(name) + ": not an integer: " + text);
  }
}

lifting::Mode parse_lift_mode(const std::string& s) {
  if (s == "exact") return lifting::Mode::Exact;
  if (s == "heuristic") return lifting::Mode::Heuristic;
  throw UsageError("mode must be exact or heuristic");
}

ModPoint make_point(const std::string& q, int d, const std::string& a) {
  try {
    return ModPoint::make(parse_int_arg(q, "--q"), d, parse_coords(a));
  } catch (const InvalidPoint& e) {
    throw UsageError(e.what());
  }
}

void print_vector(std::ostream& out, const IntVector& v) {
  for (size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << to_string(v[i]);
}

struct LiftArgs {
  std::string q, p, a;
  int d = 3;
  std::string mode = "exact";
  std::uint64_t budget = lifting::Budgets{}.candidates;
  std::uint64_t factor_steps = lifting::Budgets{}.factor_steps;
  double h_max_factor = 4.0;
};

void add_lift_options(CLI::App* cmd, LiftArgs& args) {
  cmd->add_option("--q", args.q, "odd prime modulus")->required();
  cmd->add_option("--p", args.p, "prime of the height")->required();
  cmd->add_option("--d", args.d, "sphere dimension (>= 3)")->required();
  cmd->add_option("--a", args.a, "coordinates, comma separated (d-1 or d+1 of them)")->required();
  cmd->add_option("--mode", args.mode, "exact or heuristic")->capture_default_str();
  cmd->add_option("--budget", args.budget, "candidate budget")->capture_default_str();
  cmd->add_option("--factor-steps", args.factor_steps, "rho iterations per factorization")->capture_default_str();
  cmd->add_option("--h-max-factor", args.h_max_factor, "h cap as a multiple of log_p q")->capture_default_str();
}

int run_lift(const LiftArgs& args, bool wp_only) {
  const ModPoint a = make_point(args.q, args.d, args.a);
  const Integer p = parse_int_arg(args.p, "--p");
  lifting::Budgets budgets;
  budgets.candidates = args.budget;
  budgets.factor_steps = args.factor_steps;
  const auto mode = parse_lift_mode(args.mode);
  lifting::LiftReport report;
  try {
    report = lifting::minimal_lift(a, p, mode, budgets, args.h_max_factor);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!report.lift) {
    std::cerr << "no lift: " << report.diagnostic << '\n';
    return 2;
  }
  const double w = lifting::wp_exponent(*report.lift, a.q, a.d);
  if (wp_only) {
    std::cout << harness::format_fixed(w) << '\n';
    return 0;
  }
  std::cout << "h_min " << report.lift->h << '\n' << "n ";
  print_vector(std::cout, report.lift->n);
  std::cout << '\n'
            << "w_p " << harness::format_fixed(w) << '\n'
            << "certified " << (report.certified ? "yes" : "no") << '\n'
            << "candidates " << report.candidates_tested << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lifts of Z/qZ points on spheres to Z[1/p] points of small height"};
  app.require_subcommand(1);

  std::string eta_q, eta_a;
  int eta_d = 3;
  auto* eta_cmd = app.add_subcommand("eta", "lattice invariant eta(a) and its error bound");
  eta_cmd->add_option("--q", eta_q, "odd prime modulus")->required();
  eta_cmd->add_option("--d", eta_d, "sphere dimension (>= 3)")->required();
  eta_cmd->add_option("--a", eta_a, "coordinates, comma separated")->required();

  LiftArgs lift_args, wp_args;
  auto* lift_cmd = app.add_subcommand("lift", "minimal lift of a point");
  add_lift_options(lift_cmd, lift_args);
  auto* wp_cmd = app.add_subcommand("wp", "diophantine exponent w_p of a point");
  add_lift_options(wp_cmd, wp_args);

  std::string ex_mode = "random-log", ex_q, ex_q_file, ex_p, ex_csv, ex_svg, ex_lift_mode = "heuristic";
  int ex_d = 4;
  std::size_t ex_samples = 10;
  std::uint64_t ex_seed = 1;
  long r_lo = 0, r_hi = 0;
  std::uint64_t ex_budget = lifting::Budgets{}.candidates, ex_factor = lifting::Budgets{}.factor_steps;
  double ex_hmax = 4.0;
  bool ex_timing = false;
  auto* ex_cmd = app.add_subcommand("experiment", "sample points and record eta against w_p");
  ex_cmd->add_option("--mode", ex_mode, "random-log|generic|small|fixed1|fixed2")->capture_default_str();
  auto* q_opt = ex_cmd->add_option("--q", ex_q, "odd prime modulus");
  auto* qf_opt = ex_cmd->add_option("--q-file", ex_q_file, "file of primes, one per line");
  q_opt->excludes(qf_opt);
  ex_cmd->add_option("--d", ex_d, "sphere dimension")->capture_default_str();
  ex_cmd->add_option("--samples", ex_samples, "samples per prime")->capture_default_str();
  ex_cmd->add_option("--seed", ex_seed, "base seed; sample i uses seed xor i")->capture_default_str();
  ex_cmd->add_option("--p", ex_p, "prime of the height (default: largest prime <= ln q)");
  ex_cmd->add_option("--csv", ex_csv, "CSV output path (default: stdout)");
  ex_cmd->add_option("--svg", ex_svg, "SVG scatter output path");
  ex_cmd->add_option("--lift-mode", ex_lift_mode, "exact or heuristic")->capture_default_str();
  ex_cmd->add_option("--budget", ex_budget, "candidate budget")->capture_default_str();
  ex_cmd->add_option("--factor-steps", ex_factor, "rho iterations per factorization")->capture_default_str();
  ex_cmd->add_option("--h-max-factor", ex_hmax, "h cap as a multiple of log_p q")->capture_default_str();
  ex_cmd->add_option("--r-lo", r_lo, "log-scale window start (digits)");
  ex_cmd->add_option("--r-hi", r_hi, "log-scale window end (digits)");
  ex_cmd->add_flag("--timing", ex_timing, "fill elapsed_ms (output is then not reproducible)");

  std::string cj_q, cj_csv;
  int cj_d = 4;
  std::size_t cj_samples = 10;
  long cj_r = 3;
  std::uint64_t cj_seed = 1, cj_factor = lifting::Budgets{}.factor_steps;
  auto* cj_cmd = app.add_subcommand("conjecture", "exhaustive check of the small-set two-squares conjecture");
  cj_cmd->add_option("--q", cj_q, "odd prime modulus")->required();
  cj_cmd->add_option("--d", cj_d, "sphere dimension")->required();
  cj_cmd->add_option("--samples", cj_samples, "number of random instances")->required();
  cj_cmd->add_option("--r", cj_r, "radius bound |t| < r")->required();
  cj_cmd->add_option("--seed", cj_seed, "seed")->required();
  cj_cmd->add_option("--factor-steps", cj_factor, "rho iterations per factorization")->capture_default_str();
  cj_cmd->add_option("--csv", cj_csv, "per-trial CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*eta_cmd) {
      const ModPoint a = make_point(eta_q, eta_d, eta_a);
      const auto res = lattice::eta(a);
      std::cout << "eta " << harness::format_fixed(res.value) << '\n'
                << "error_bound " << harness::format_fixed(res.error_bound) << '\n'
                << "max_norm2 " << to_string(res.max_norm2) << '\n';
      return 0;
    }
    if (*lift_cmd) return run_lift(lift_args, false);
    if (*wp_cmd) return run_lift(wp_args, true);
    if (*ex_cmd) {
      const auto mode = harness::parse_sample_mode(ex_mode);
      if (!mode) throw UsageError("unknown sampling mode " + ex_mode);
      std::vector<Integer> primes;
      if (!ex_q.empty()) {
        primes.push_back(parse_int_arg(ex_q, "--q"));
      } else if (!ex_q_file.empty()) {
        primes = harness::read_prime_list(std::filesystem::path(ex_q_file));
      } else {
        throw UsageError("one of --q or --q-file is required");
      }
      for (const auto& q : primes) {
        if (q < 3 || !nt::is_probable_prime(q)) throw UsageError("q must be an odd prime: " + to_string(q));
      }
      if (ex_d < 3) throw UsageError("d must be at least 3");
      harness::ExperimentConfig config;
      for (const auto& q : primes) {
        auto specs = harness::batch(*mode, q, ex_d, ex_samples, ex_seed, r_lo, r_hi);
        config.specs.insert(config.specs.end(), specs.begin(), specs.end());
      }
      if (!ex_p.empty()) config.p = parse_int_arg(ex_p, "--p");
      config.mode = parse_lift_mode(ex_lift_mode);
      config.budgets.candidates = ex_budget;
      config.budgets.factor_steps = ex_factor;
      config.h_max_factor = ex_hmax;
      config.timing = ex_timing;

      std::ofstream file;
      std::ostream* csv = &std::cout;
      if (!ex_csv.empty()) {
        file.open(ex_csv, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open " + ex_csv);
        csv = &file;
      }
      const auto records = harness::run_experiment(config, csv);
      if (file.is_open()) {
        file.close();
        if (!file) throw std::runtime_error("write to " + ex_csv + " failed");
      }
      if (!ex_svg.empty()) harness::write_svg_scatter(records, std::filesystem::path(ex_svg), ex_d);
      std::size_t failed = 0;
      for (const auto& r : records) failed += !r.h_min;
      if (failed) std::cerr << failed << " of " << records.size() << " samples without a lift\n";
      return 0;
    }
    if (*cj_cmd) {
      const Integer q = parse_int_arg(cj_q, "--q");
      if (q < 3 || !nt::is_probable_prime(q)) throw UsageError("q must be an odd prime");
      if (cj_d < 3) throw UsageError("d must be at least 3");
      if (cj_r < 1) throw UsageError("r must be positive");
      lifting::Budgets budgets;
      budgets.factor_steps = cj_factor;
      const auto report = harness::conjecture_scan(q, cj_d, cj_samples, cj_r, budgets, cj_seed);
      std::size_t failures = 0;
      for (const auto& t : report.trials) failures += !t.representable;
      std::cout << "trials " << report.trials.size() << '\n' << "failures " << failures << '\n'
                << "min_set_size_among_failures "
                << (report.min_set_size_among_failures ? std::to_string(*report.min_set_size_among_failures)
                                                       : std::string("inf"))
                << '\n';
      if (!cj_csv.empty()) {
        std::ofstream out(cj_csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + cj_csv);
        harness::write_conjecture_csv(report, out);
        if (!out) throw std::runtime_error("write to " + cj_csv + " failed");
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
