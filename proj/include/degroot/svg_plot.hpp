#pragma once

#include <string>
#include <vector>

namespace degroot {

// Minimal self-contained SVG line plot: frame, axes with end tick labels, and
// one polyline. Non-finite points are skipped. Deterministic output.
std::string line_plot(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& title, const std::string& x_label,
                      const std::string& y_label);

}  // namespace degroot
