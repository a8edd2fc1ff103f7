#include "patchpot/csv.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace patchpot {

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, int line_no) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("CSV parse error at line " +
                             std::to_string(line_no) + ": '" + s +
                             "' is not a number");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
    ++pos;
  if (pos != s.size())
    throw std::runtime_error("CSV parse error at line " +
                             std::to_string(line_no) + ": '" + s +
                             "' is not a number");
  return v;
}

Regime regime_from_string(const std::string& s, int line_no) {
  if (s == "close") return Regime::close;
  if (s == "intermediate") return Regime::intermediate;
  if (s == "far") return Regime::far;
  throw std::runtime_error("CSV parse error at line " + std::to_string(line_no) +
                           ": unknown regime '" + s + "'");
}

}  // namespace

std::string curve_to_csv(const VmCurve& curve) {
  std::ostringstream out;
  out << "d_m,vm_energy_V,vm_force_V,vm_analytic_V,regime\n";
  for (const VmCurvePoint& p : curve.points) {
    out << format_double(p.d) << ',' << format_double(p.vm_energy) << ','
        << format_double(p.vm_force) << ',' << format_double(p.vm_analytic)
        << ',' << to_string(p.regime) << '\n';
  }
  return out.str();
}

VmCurve curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  VmCurve curve;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    if (line_no == 1) {
      if (f.size() < 5 || f[0] != "d_m" || f[1] != "vm_energy_V")
        throw std::runtime_error(
            "CSV parse error at line 1: expected curve header "
            "d_m,vm_energy_V,vm_force_V,vm_analytic_V,regime");
      continue;
    }
    if (f.size() != 5)
      throw std::runtime_error("CSV parse error at line " +
                               std::to_string(line_no) + ": expected 5 fields");
    VmCurvePoint p{};
    p.d = parse_number(f[0], line_no);
    p.vm_energy = parse_number(f[1], line_no);
    p.vm_force = parse_number(f[2], line_no);
    p.vm_analytic = parse_number(f[3], line_no);
    p.regime = regime_from_string(f[4], line_no);
    curve.points.push_back(p);
  }
  return curve;
}

std::vector<std::pair<double, double>> parse_external_csv(
    const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<std::pair<double, double>> data;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    if (line_no == 1) {
      if (f.size() < 2 || f[0] != "d_m" || f[1] != "vm_V")
        throw std::runtime_error(
            "CSV parse error at line 1: expected header d_m,vm_V");
      continue;
    }
    if (f.size() != 2)
      throw std::runtime_error("CSV parse error at line " +
                               std::to_string(line_no) + ": expected 2 fields");
    data.emplace_back(parse_number(f[0], line_no), parse_number(f[1], line_no));
  }
  return data;
}

std::string format_fit_report(const LogFit& fit, bool external) {
  std::ostringstream out;
  out << "a_V = " << format_double(fit.a) << '\n'
      << "b_V_per_efold = " << format_double(fit.b) << '\n'
      << "b_V_per_decade = " << format_double(fit.b * std::log(10.0)) << '\n'
      << "b_stderr_V_per_efold = " << format_double(fit.b_stderr) << '\n'
      << "window_d_lo_m = " << format_double(fit.d_lo) << '\n'
      << "window_d_hi_m = " << format_double(fit.d_hi) << '\n'
      << "residual_rms_V = " << format_double(fit.residual_rms) << '\n'
      << "r_squared = " << format_double(fit.r_squared) << '\n'
      << "n_points = " << fit.n << '\n';
  if (external)
    out << "caveat = a_V may include an external-circuit contact potential "
           "offset\n";
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace patchpot
