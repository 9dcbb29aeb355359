#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "spherelift/harness.hpp"
#include "spherelift/numtheory.hpp"

using namespace spherelift;
using namespace spherelift::harness;

namespace {

IntVector iv(std::initializer_list<long> xs) {
  IntVector v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Tag balance plus attribute quoting: enough to catch malformed output.
bool well_formed_xml(const std::string& doc) {
  std::vector<std::string> stack;
  size_t i = 0;
  while ((i = doc.find('<', i)) != std::string::npos) {
    const size_t j = doc.find('>', i);
    if (j == std::string::npos) return false;
    std::string tag = doc.substr(i + 1, j - i - 1);
    i = j + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (std::count(tag.begin(), tag.end(), '"') % 2) return false;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" /"));
    if (!self_closing) stack.push_back(name);
  }
  return stack.empty();
}

const std::string kQ40 = "3000000000000000000000000000000000000037";

std::filesystem::path source_dir() {
  return std::filesystem::path(__FILE__).parent_path().parent_path();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("sample mode names") {
  for (auto m : {SampleMode::RandomLog, SampleMode::Generic, SampleMode::Small, SampleMode::FixedOne,
                 SampleMode::FixedTwo}) {
    CHECK(parse_sample_mode(to_string(m)) == m);
  }
  CHECK_FALSE(parse_sample_mode("uniform").has_value());
}

TEST_CASE("digit counts and the default log window") {
  CHECK(decimal_digits(Integer(7)) == 1);
  CHECK(decimal_digits(Integer(kQ40)) == 40);
  const Integer q130 = pow(Integer(10), 129) + 1;
  CHECK(default_r_range(q130) == std::pair<long, long>{60, 125});
  CHECK(default_r_range(Integer(kQ40)) == std::pair<long, long>{19, 39});
}

TEST_CASE("default_p") {
  CHECK(default_p(7) == 2);
  CHECK(default_p(Integer(kQ40)) == 89);
  CHECK(default_p(101) == 3);  // ln 101 = 4.6
}

TEST_CASE("sample_point gives valid, reproducible points") {
  for (auto mode : {SampleMode::RandomLog, SampleMode::Generic, SampleMode::Small, SampleMode::FixedOne,
                    SampleMode::FixedTwo}) {
    for (int d : {3, 4, 6}) {
      if (mode == SampleMode::FixedTwo && d == 3) continue;  // no free coordinate left
      SamplerSpec spec{mode, Integer(kQ40), d, 42, 0, 0};
      const ModPoint a = sample_point(spec);
      CHECK(a.d == d);
      CHECK(a.coords.size() == static_cast<size_t>(d) + 1);
      CHECK(mod(norm2(a.coords), a.q) == 1);
      CHECK(sample_point(spec).coords == a.coords);
      spec.seed = 43;
      CHECK(sample_point(spec).coords != a.coords);
    }
  }
  // (1, 1) has norm 2, a residue mod 7 but not mod 11
  CHECK(sample_point({SampleMode::FixedTwo, 7, 3, 1, 0, 0}).coords[0] == 2);
  CHECK_THROWS_AS(sample_point({SampleMode::FixedTwo, 11, 3, 1, 0, 0}), ResampleLimit);
  const ModPoint small = sample_point({SampleMode::Generic, 7, 3, 1, 0, 0});
  CHECK(mod(norm2(small.coords), 7) == 1);
}

TEST_CASE("fixed modes scale a direction with equal leading entries") {
  const ModPoint two = sample_point({SampleMode::FixedTwo, Integer(kQ40), 4, 5, 0, 0});
  CHECK(two.coords[0] == two.coords[1]);
  const ModPoint one = sample_point({SampleMode::FixedOne, Integer(kQ40), 4, 5, 0, 0});
  // a / a_0 recovers the sampled direction (1, x_1, x_2) with log-scale x_i
  const Integer inv = nt::mod_inverse(one.coords[0], one.q);
  for (size_t i = 1; i < 3; ++i) CHECK(mod(one.coords[i] * inv, one.q) < Integer(kQ40) / pow(Integer(10), 18));
}

TEST_CASE("small mode sits high in the cusp") {
  double total = 0;
  for (std::uint64_t s = 0; s < 5; ++s) total += lattice::eta(sample_point({SampleMode::Small, Integer(kQ40), 4, s, 0, 0})).value;
  CHECK(total / 5 > 0.8);
  double generic = 0;
  for (std::uint64_t s = 0; s < 5; ++s) generic += lattice::eta(sample_point({SampleMode::Generic, Integer(kQ40), 4, s, 0, 0})).value;
  CHECK(generic / 5 < 0.45);
}

TEST_CASE("log-scale draws never land on +-e_i") {
  // window (2, 2) at q = 103 leaves entries in {0, 1}; 1/2 is a square mod 103
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ModPoint a = sample_point({SampleMode::RandomLog, 103, 4, seed, 2, 2});
    CHECK(std::count_if(a.coords.begin(), a.coords.end(), [](const Integer& v) { return v != 0; }) >= 2);
  }
  // generic draws keep them: mod 5 the circle is {+-e_0, +-e_1}
  CHECK_NOTHROW(sample_point({SampleMode::Generic, 5, 3, 1, 0, 0}));
  CHECK_THROWS_AS(sample_point({SampleMode::RandomLog, 5, 3, 1, 0, 0}), ResampleLimit);
}

TEST_CASE("degenerate log window exhausts resampling") {
  CHECK_THROWS_AS(sample_point({SampleMode::RandomLog, 101, 4, 1, 5, 5}), ResampleLimit);
  CHECK_THROWS_AS(sample_point({SampleMode::RandomLog, 101, 4, 1, 3, 2}), std::invalid_argument);
  CHECK_THROWS_AS(sample_point({SampleMode::Generic, 100, 4, 1, 0, 0}), std::invalid_argument);
}

TEST_CASE("format_fixed") {
  CHECK(format_fixed(0.7527667) == "0.752767");
  CHECK(format_fixed(-0.0000001) == "0.000000");
  CHECK(format_fixed(1.5) == "1.500000");
  CHECK(format_fixed(2.25, 2) == "2.25");
}

TEST_CASE("measure on the identity point") {
  const ModPoint a = ModPoint::make(101, 4, iv({1, 0, 0}));
  const auto rec = measure(a, 3, lifting::Mode::Exact, {});
  CHECK(rec.eta == doctest::Approx(1.0));
  REQUIRE(rec.h_min);
  CHECK(*rec.h_min == 0);
  CHECK(rec.w_p == 0.0);
  CHECK(rec.predicted == doctest::Approx(1.5));
  CHECK(rec.status == "found");
  CHECK(rec.elapsed_ms == 0.0);
}

TEST_CASE("csv output") {
  std::ostringstream empty;
  write_csv({}, empty);
  CHECK(empty.str() == "q,d,p,coords,eta,h_min,w_p,predicted_w_p,mode,candidates,elapsed_ms,status\n");

  const ModPoint a = ModPoint::make(7, 3, iv({2, 2}));
  const auto rec = measure(a, 3, lifting::Mode::Exact, {});
  std::ostringstream one;
  write_csv({rec}, one);
  const auto lines = split(one.str(), '\n');
  REQUIRE(lines.size() == 3);
  CHECK(lines[2].empty());
  const auto header = split(lines[0], ',');
  const auto fields = split(lines[1], ',');
  REQUIRE(fields.size() == header.size());
  CHECK(fields[0] == "7");
  CHECK(fields[1] == "3");
  CHECK(fields[2] == "3");
  CHECK(fields[3] == "2;2;0;0");
  CHECK(fields[5] == "2");
  CHECK(fields[6] == "0.752767");
  CHECK(fields[8] == "exact");
  CHECK(fields[11] == "found");
  CHECK(std::stod(fields[4]) == doctest::Approx(rec.eta).epsilon(1e-6));
  CHECK(std::stod(fields[7]) == doctest::Approx(2.0 / 3.0 * (1 + rec.eta)).epsilon(1e-6));

  ExperimentRecord failed = rec;
  failed.h_min.reset();
  failed.status = "error: a, b";
  const auto row = split(csv_row(failed), ',');
  CHECK(row.size() == header.size());
  CHECK(row[5].empty());
  CHECK(row[6].empty());
}

TEST_CASE("csv rows recompute w_p from h_min") {
  ExperimentConfig config;
  config.specs = batch(SampleMode::RandomLog, Integer(kQ40), 4, 8, 77);
  std::ostringstream csv;
  run_experiment(config, &csv);
  const auto lines = split(csv.str(), '\n');
  REQUIRE(lines.size() == 10);
  for (size_t i = 1; i + 1 < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    REQUIRE(f.size() == 12);
    REQUIRE_FALSE(f[5].empty());
    const double q = std::stod(f[0]), p = std::stod(f[2]), d = std::stod(f[1]), h = std::stod(f[5]);
    CHECK(format_fixed((d - 1) / d * h * std::log(p) / std::log(q)) == f[6]);
    CHECK(f[10] == "0.000000");
  }
}

TEST_CASE("run_experiment is reproducible") {
  ExperimentConfig config;
  config.specs = batch(SampleMode::RandomLog, Integer(kQ40), 4, 6, 9);
  std::ostringstream a, b, c;
  const auto recs = run_experiment(config, &a);
  run_experiment(config, &b);
  write_csv(recs, c);
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());
  std::ostringstream s1, s2;
  write_svg_scatter(recs, s1);
  write_svg_scatter(run_experiment(config), s2);
  CHECK(s1.str() == s2.str());
}

TEST_CASE("batch derives seeds by xor") {
  const auto specs = batch(SampleMode::Generic, 7, 3, 4, 12);
  REQUIRE(specs.size() == 4);
  for (size_t i = 0; i < 4; ++i) CHECK(specs[i].seed == (12u ^ i));
}

TEST_CASE("failed samples are recorded and the run continues") {
  ExperimentConfig config;
  config.specs = {{SampleMode::RandomLog, 101, 4, 1, 5, 5}, {SampleMode::Generic, 101, 4, 1, 0, 0}};
  const auto recs = run_experiment(config);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].status.rfind("error", 0) == 0);
  CHECK_FALSE(recs[0].h_min);
  CHECK(recs[1].status == "found");
}

TEST_CASE("svg scatter") {
  std::ostringstream empty;
  write_svg_scatter({}, empty);
  const std::string e = empty.str();
  CHECK(well_formed_xml(e));
  CHECK(e.find("width=\"800\"") != std::string::npos);
  CHECK(e.find("height=\"600\"") != std::string::npos);
  CHECK(e.find("<circle") == std::string::npos);
  CHECK(e.find(">eta<") != std::string::npos);
  CHECK(e.find(">w_p<") != std::string::npos);
  CHECK(e.find("stroke-dasharray") != std::string::npos);

  ExperimentRecord r;
  r.eta = 1.0;
  r.w_p = 1.5;
  r.h_min = 1;
  std::ostringstream one;
  write_svg_scatter({r}, one, 4);
  const std::string s = one.str();
  CHECK(well_formed_xml(s));
  const auto circle = s.find("<circle");
  REQUIRE(circle != std::string::npos);
  auto attr = [&](const std::string& text, size_t from, const std::string& name) {
    const size_t k = text.find(name + "=\"", from) + name.size() + 2;
    return std::stod(text.substr(k, text.find('"', k) - k));
  };
  const double cx = attr(s, circle, "cx"), cy = attr(s, circle, "cy");
  CHECK(attr(s, circle, "r") == 2.0);
  const auto line = s.find("stroke-dasharray");
  const auto line_start = s.rfind("<line", line);
  const double x1 = attr(s, line_start, "x1"), y1 = attr(s, line_start, "y1");
  const double x2 = attr(s, line_start, "x2"), y2 = attr(s, line_start, "y2");
  // the point lies on the dashed line
  CHECK(std::fabs((y2 - y1) * (cx - x1) - (x2 - x1) * (cy - y1)) / std::hypot(x2 - x1, y2 - y1) < 0.05);
}

TEST_CASE("svg and csv files") {
  const auto dir = std::filesystem::temp_directory_path() / "spherelift_harness_test";
  std::filesystem::create_directories(dir);
  const ModPoint a = ModPoint::make(7, 3, iv({2, 2}));
  const auto rec = measure(a, 3, lifting::Mode::Exact, {});
  write_csv({rec}, dir / "out.csv");
  write_svg_scatter({rec}, dir / "out.svg", 3);
  CHECK(std::filesystem::file_size(dir / "out.csv") > 0);
  CHECK(std::filesystem::file_size(dir / "out.svg") > 0);
  CHECK_THROWS(write_csv({rec}, dir / "missing" / "out.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("prime list parsing") {
  std::istringstream in("# header\n7\n\n  11  # trailing comment\n\t13\r\n");
  CHECK(read_prime_list(in) == IntVector{7, 11, 13});
  std::istringstream bad("7\nseven\n");
  CHECK_THROWS_WITH_AS(read_prime_list(bad), "line 2: not an integer: seven", std::invalid_argument);
  std::istringstream composite("7\n9\n");
  CHECK_THROWS_AS(read_prime_list(composite), std::invalid_argument);
  CHECK_THROWS(read_prime_list(std::filesystem::path("/nonexistent/primes.txt")));
}

TEST_CASE("shipped 130-digit prime list") {
  const auto primes = read_prime_list(source_dir() / "data" / "primes_130.txt");
  CHECK(primes.size() == 5);
  for (const auto& q : primes) CHECK(decimal_digits(q) == 130);
}

TEST_CASE("conjecture_trial examples") {
  lifting::LiftProblem p;
  p.q = 5;
  p.d = 3;
  p.N = 17;
  p.b = iv({1, 1});
  auto t = conjecture_trial(p, 3, 1000);
  CHECK(t.representable);
  CHECK(t.set_size >= 1);
  auto empty = conjecture_trial(p, 0, 1000);
  CHECK(empty.set_size == 0);
  CHECK_FALSE(empty.representable);
  lifting::LiftProblem far = p;
  far.N = 2;  // |q t + b|^2 <= 2 only at t = 0, where Q = 0
  auto f = conjecture_trial(far, 3, 1000);
  CHECK(f.set_size == 1);
  CHECK(f.representable);
}

TEST_CASE("conjecture_trial agrees with a double loop") {
  Rng rng(2);
  const auto rep = oracle::two_squares_table(2000000);
  for (int i = 0; i < 20; ++i) {
    const long q = nt::next_prime(3 + uniform_integer(Integer(60), rng)).get_si();
    const long r = 2 + static_cast<long>(rng() % 6);
    lifting::LiftProblem p;
    p.q = q;
    p.d = 3;
    long b0, b1;
    do {
      b0 = static_cast<long>(rng() % q);
      b1 = static_cast<long>(rng() % q);
    } while ((b0 * b0 + b1 * b1) % q == 0);
    p.b = iv({b0, b1});
    const long N = b0 * b0 + b1 * b1 + q * static_cast<long>(rng() % (q * r * r + 1));
    p.N = N;
    std::uint64_t size = 0;
    bool representable = false;
    for (long t0 = -r; t0 <= r; ++t0) {
      for (long t1 = -r; t1 <= r; ++t1) {
        if (t0 * t0 + t1 * t1 >= r * r) continue;
        const long v = N - (q * t0 + b0) * (q * t0 + b0) - (q * t1 + b1) * (q * t1 + b1);
        if (v < 0 || v % (q * q) != 0) continue;
        ++size;
        representable = representable || rep[v / (q * q)];
      }
    }
    const auto t = conjecture_trial(p, r, 100000);
    CHECK(t.set_size == size);
    CHECK(t.representable == representable);
  }
}

TEST_CASE("conjecture_scan aggregates") {
  const auto report = conjecture_scan(101, 4, 10, 3, {}, 5);
  CHECK(report.trials.size() == 10);
  std::optional<std::uint64_t> smallest;
  for (const auto& t : report.trials) {
    CHECK(mod(t.N - norm2(t.b), 101) == 0);
    CHECK(mod(t.N, 101) != 0);
    if (!t.representable) smallest = std::min(smallest.value_or(t.set_size), t.set_size);
  }
  CHECK(report.min_set_size_among_failures == smallest);
  const auto again = conjecture_scan(101, 4, 10, 3, {}, 5);
  for (size_t i = 0; i < 10; ++i) CHECK(again.trials[i].N == report.trials[i].N);
  ConjectureReport none;
  none.trials.push_back({});
  none.trials.back().representable = true;
  CHECK_FALSE(none.min_set_size_among_failures.has_value());
  std::ostringstream csv;
  write_conjecture_csv(report, csv);
  CHECK(split(csv.str(), '\n').size() == 12);
}

}
