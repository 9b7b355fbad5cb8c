#include "degroot/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace degroot {

namespace {

std::string num(double v, const char* spec = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_plot(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& title, const std::string& x_label,
                      const std::string& y_label) {
  if (x.size() != y.size())
    throw std::invalid_argument("line_plot: x and y must have equal length");

  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < x.size(); ++i)
    if (std::isfinite(x[i]) && std::isfinite(y[i])) pts.emplace_back(x[i], y[i]);

  const double W = 640, H = 420;
  const double L = 70, R = 610, T = 40, B = 370;

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = pts[0].first;
    y0 = y1 = pts[0].second;
    for (const auto& p : pts) {
      x0 = std::min(x0, p.first);
      x1 = std::max(x1, p.first);
      y0 = std::min(y0, p.second);
      y1 = std::max(y1, p.second);
    }
  }
  if (x1 - x0 <= 0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 <= 0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double ypad = 0.05 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;

  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (R - L); };
  auto py = [&](double v) { return B - (v - y0) / (y1 - y0) * (B - T); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n"
      // axes
      << "<line x1=\"" << L << "\" y1=\"" << B << "\" x2=\"" << R << "\" y2=\"" << B
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << B
      << "\" stroke=\"black\"/>\n";

  // end tick labels
  svg << "<text x=\"" << L << "\" y=\"390\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << num(x0) << "</text>\n"
      << "<text x=\"" << R << "\" y=\"390\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << num(x1) << "</text>\n"
      << "<text x=\"" << L - 6 << "\" y=\"" << B << "\" text-anchor=\"end\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << num(y0) << "</text>\n"
      << "<text x=\"" << L - 6 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << num(y1) << "</text>\n"
      // axis labels
      << "<text x=\"" << (L + R) / 2 << "\" y=\"412\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">"
      << escape(x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << (T + B) / 2 << "\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << (T + B) / 2 << ")\">"
      << escape(y_label) << "</text>\n";

  if (!pts.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) svg << ' ';
      svg << num(px(pts[i].first), "%.2f") << ',' << num(py(pts[i].second), "%.2f");
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace degroot
