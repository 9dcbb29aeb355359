#include <chrono>
#include <ostream>

#include "spherelift/harness.hpp"

namespace spherelift::harness {

ExperimentRecord measure(const ModPoint& a, const Integer& p, lifting::Mode mode, const lifting::Budgets& budgets,
                         double h_max_factor, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.q = a.q;
  rec.d = a.d;
  rec.p = p;
  rec.coords = a.coords;
  rec.mode = mode;
  try {
    rec.eta = lattice::eta(a).value;
    rec.predicted = static_cast<double>(a.d - 1) / a.d * (1.0 + rec.eta);
    const lifting::LiftReport report = lifting::minimal_lift(a, p, mode, budgets, h_max_factor);
    rec.candidates = report.candidates_tested;
    if (report.lift) {
      rec.h_min = report.lift->h;
      rec.w_p = lifting::wp_exponent(*report.lift, a.q, a.d);
      rec.status = "found";
    } else if (!report.per_h.empty() && report.per_h.back() == lifting::Status::BudgetExhausted) {
      rec.status = "budget_exhausted";
    } else {
      rec.status = "not_found";
    }
  } catch (const std::exception& e) {
    rec.status = std::string("error: ") + e.what();
  }
  if (timing) {
    rec.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, std::ostream* csv) {
  std::vector<ExperimentRecord> out;
  if (csv) *csv << csv_header() << '\n' << std::flush;
  for (const auto& spec : config.specs) {
    ExperimentRecord rec;
    try {
      const ModPoint a = sample_point(spec);
      const Integer p = config.p ? *config.p : default_p(spec.q);
      rec = measure(a, p, config.mode, config.budgets, config.h_max_factor, config.timing);
    } catch (const std::exception& e) {
      rec.q = spec.q;
      rec.d = spec.d;
      rec.p = config.p ? *config.p : default_p(spec.q);
      rec.mode = config.mode;
      rec.status = std::string("error: ") + e.what();
    }
    if (csv) *csv << csv_row(rec) << '\n' << std::flush;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<SamplerSpec> batch(SampleMode mode, const Integer& q, int d, std::size_t n, std::uint64_t seed,
                               long r_lo, long r_hi) {
  std::vector<SamplerSpec> specs;
  for (std::size_t i = 0; i < n; ++i) specs.push_back({mode, q, d, seed ^ static_cast<std::uint64_t>(i), r_lo, r_hi});
  return specs;
}

}  // namespace spherelift::harness
