#pragma once

#include <string>
#include <utility>
#include <vector>

#include "patchpot/analysis.hpp"

namespace patchpot {

/// Shortest-lossless decimal formatting used in all emitted files.
std::string format_double(double v);

/// Curve CSV, header: d_m,vm_energy_V,vm_force_V,vm_analytic_V,regime
std::string curve_to_csv(const VmCurve& curve);
VmCurve curve_from_csv(const std::string& text);

/// External dataset CSV, header: d_m,vm_V. Malformed rows raise
/// std::runtime_error naming the line number.
std::vector<std::pair<double, double>> parse_external_csv(
    const std::string& text);

/// Structured-text fit report.
std::string format_fit_report(const LogFit& fit, bool external);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace patchpot
