#include <algorithm>
#include <ostream>

#include "spherelift/harness.hpp"
#include "spherelift/numtheory.hpp"

namespace spherelift::harness {

ConjectureTrial conjecture_trial(const lifting::LiftProblem& prob, long r, std::uint64_t factor_steps) {
  lifting::validate(prob);
  ConjectureTrial trial{prob.N, prob.q, prob.b};
  if (r <= 0) return trial;
  const size_t n = prob.b.size();
  const Integer q2 = prob.q * prob.q;
  const long r2 = r * r;
  std::vector<long> tv(n, 0);

  auto leaf = [&] {
    Integer excess = prob.N;
    for (size_t i = 0; i < n; ++i) {
      const Integer v = prob.q * tv[i] + prob.b[i];
      excess -= v * v;
    }
    if (excess < 0 || !mpz_divisible_p(excess.get_mpz_t(), q2.get_mpz_t())) return;
    mpz_divexact(excess.get_mpz_t(), excess.get_mpz_t(), q2.get_mpz_t());
    ++trial.set_size;
    const auto rep = nt::two_squares(excess, factor_steps);
    if (std::holds_alternative<nt::TwoSquares>(rep)) trial.representable = true;
    if (std::holds_alternative<nt::Unknown>(rep)) ++trial.undetermined;
  };
  auto recurse = [&](auto&& self, size_t i, long used) -> void {
    if (i == n) {
      leaf();
      return;
    }
    for (long v = -(r - 1); v <= r - 1; ++v) {
      if (used + v * v >= r2) continue;
      tv[i] = v;
      self(self, i + 1, used + v * v);
    }
    tv[i] = 0;
  };
  recurse(recurse, 0, 0);
  return trial;
}

ConjectureReport conjecture_scan(const Integer& q, int d, std::size_t samples, long r,
                                 const lifting::Budgets& budgets, std::uint64_t seed) {
  if (d < 3) throw std::invalid_argument("d must be at least 3");
  if (q < 3 || !nt::is_probable_prime(q)) throw std::invalid_argument("q must be an odd prime");
  Rng rng(seed);
  ConjectureReport report;
  const Integer top = q * q * r * r;
  for (std::size_t s = 0; s < samples; ++s) {
    lifting::LiftProblem prob;
    prob.q = q;
    prob.d = d;
    do {
      prob.b.assign(static_cast<size_t>(d) - 1, 0);
      for (auto& bi : prob.b) bi = uniform_integer(q - 1, rng);
    } while (mod(norm2(prob.b), q) == 0);
    Integer n0 = 1 + uniform_integer(top > 1 ? top - 1 : Integer(0), rng);
    prob.N = n0 - mod(n0 - norm2(prob.b), q);
    if (prob.N <= 0) prob.N += q;
    ConjectureTrial trial = conjecture_trial(prob, r, budgets.factor_steps);
    if (!trial.representable) {
      report.min_set_size_among_failures =
          std::min(report.min_set_size_among_failures.value_or(trial.set_size), trial.set_size);
    }
    report.trials.push_back(std::move(trial));
  }
  return report;
}

void write_conjecture_csv(const ConjectureReport& report, std::ostream& out) {
  out << "trial,q,N,b,set_size,representable,undetermined\n";
  for (size_t i = 0; i < report.trials.size(); ++i) {
    const auto& t = report.trials[i];
    out << i << ',' << to_string(t.q) << ',' << to_string(t.N) << ',';
    for (size_t j = 0; j < t.b.size(); ++j) out << (j ? ";" : "") << to_string(t.b[j]);
    out << ',' << t.set_size << ',' << (t.representable ? "true" : "false") << ',' << t.undetermined << '\n';
  }
}

}  // namespace spherelift::harness
