#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spherelift/harness.hpp"
#include "spherelift/numtheory.hpp"

namespace spherelift::harness {
namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_fixed(double v, int digits) {
  if (std::fabs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_header() {
  return "q,d,p,coords,eta,h_min,w_p,predicted_w_p,mode,candidates,elapsed_ms,status";
}

std::string csv_row(const ExperimentRecord& r) {
  std::ostringstream s;
  s << to_string(r.q) << ',' << r.d << ',' << to_string(r.p) << ',';
  for (size_t i = 0; i < r.coords.size(); ++i) s << (i ? ";" : "") << to_string(r.coords[i]);
  s << ',' << format_fixed(r.eta) << ',';
  if (r.h_min) s << *r.h_min;
  s << ',';
  if (r.h_min) s << format_fixed(r.w_p);
  s << ',' << format_fixed(r.predicted) << ',' << lifting::to_string(r.mode) << ',' << r.candidates << ','
    << format_fixed(r.elapsed_ms) << ',';
  std::string status = r.status;
  std::replace(status.begin(), status.end(), ',', ';');
  std::replace(status.begin(), status.end(), '\n', ' ');
  s << status;
  return s.str();
}

void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  out << csv_header() << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
}

void write_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_csv(records, out);
  finish(out, path);
}

void write_svg_scatter(const std::vector<ExperimentRecord>& records, std::ostream& out, int d) {
  constexpr double width = 800, height = 600, left = 70, right = 30, top = 30, bottom = 60;
  double x_max = 1.0, y_max = 2.0;
  for (const auto& r : records) {
    if (!r.h_min) continue;
    x_max = std::max(x_max, r.eta);
    y_max = std::max(y_max, r.w_p);
  }
  x_max = std::ceil(x_max * 10) / 10;
  y_max = std::ceil(y_max * 4) / 4;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + x / x_max * pw; };
  auto py = [&](double y) { return top + ph - y / y_max * ph; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
      << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << svg_num(px(0)) << "\" y1=\"" << svg_num(py(0)) << "\" x2=\"" << svg_num(px(x_max))
      << "\" y2=\"" << svg_num(py(0)) << "\"/>\n"
      << "<line x1=\"" << svg_num(px(0)) << "\" y1=\"" << svg_num(py(0)) << "\" x2=\"" << svg_num(px(0))
      << "\" y2=\"" << svg_num(py(y_max)) << "\"/>\n";
  for (double x = 0; x <= x_max + 1e-9; x += 0.1) {
    out << "<line x1=\"" << svg_num(px(x)) << "\" y1=\"" << svg_num(py(0)) << "\" x2=\"" << svg_num(px(x))
        << "\" y2=\"" << svg_num(py(0) + 5) << "\"/>\n";
  }
  for (double y = 0; y <= y_max + 1e-9; y += 0.25) {
    out << "<line x1=\"" << svg_num(px(0) - 5) << "\" y1=\"" << svg_num(py(y)) << "\" x2=\"" << svg_num(px(0))
        << "\" y2=\"" << svg_num(py(y)) << "\"/>\n";
  }
  out << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double x = 0; x <= x_max + 1e-9; x += 0.1) {
    out << "<text x=\"" << svg_num(px(x)) << "\" y=\"" << svg_num(py(0) + 20) << "\" text-anchor=\"middle\">"
        << svg_num(x).substr(0, 3) << "</text>\n";
  }
  for (double y = 0; y <= y_max + 1e-9; y += 0.25) {
    out << "<text x=\"" << svg_num(px(0) - 10) << "\" y=\"" << svg_num(py(y) + 4) << "\" text-anchor=\"end\">"
        << svg_num(y) << "</text>\n";
  }
  out << "<text x=\"" << svg_num(left + pw / 2) << "\" y=\"" << svg_num(height - 15)
      << "\" text-anchor=\"middle\" font-size=\"14\">eta</text>\n"
      << "<text x=\"20\" y=\"" << svg_num(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << svg_num(top + ph / 2) << ")\">w_p</text>\n</g>\n";

  const double slope = static_cast<double>(d - 1) / d;
  out << "<line x1=\"" << svg_num(px(0)) << "\" y1=\"" << svg_num(py(slope)) << "\" x2=\"" << svg_num(px(x_max))
      << "\" y2=\"" << svg_num(py(slope * (1 + x_max)))
      << "\" stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  out << "<g fill=\"steelblue\">\n";
  for (const auto& r : records) {
    if (!r.h_min) continue;
    out << "<circle cx=\"" << svg_num(px(r.eta)) << "\" cy=\"" << svg_num(py(r.w_p)) << "\" r=\"2\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

void write_svg_scatter(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path, int d) {
  auto out = open_for_write(path);
  write_svg_scatter(records, out, d);
  finish(out, path);
}

std::vector<Integer> read_prime_list(std::istream& in) {
  std::vector<Integer> out;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    Integer v;
    try {
      v = parse_integer(token);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("line " + std::to_string(number) + ": not an integer: " + token);
    }
    if (v < 2 || !nt::is_probable_prime(v)) {
      throw std::invalid_argument("line " + std::to_string(number) + ": not a prime: " + token);
    }
    out.push_back(v);
  }
  return out;
}

std::vector<Integer> read_prime_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_prime_list(in);
}

}  // namespace spherelift::harness
