#include "degroot/weight_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace degroot {

WeightFunction WeightFunction::power(double alpha) {
  WeightFunction phi;
  phi.power_ = true;
  phi.alpha_ = alpha;
  phi.name_ = "power";
  return phi;
}

WeightFunction WeightFunction::custom(std::string name, double alpha,
                                      std::function<double(double, double)> evaluator) {
  if (!evaluator) throw std::invalid_argument("custom weight function needs an evaluator");
  WeightFunction phi;
  phi.power_ = false;
  phi.alpha_ = alpha;
  phi.name_ = std::move(name);
  phi.evaluator_ = std::move(evaluator);
  return phi;
}

double WeightFunction::operator()(double alpha, double d) const {
  if (d < 0.0) throw std::invalid_argument("phi: degree must be nonnegative");
  if (power_) {
    if (d == 0.0) {
      if (alpha < 0.0)
        throw std::domain_error("phi: d = 0 with negative alpha has no finite weight");
      return alpha == 0.0 ? 1.0 : 0.0;
    }
    return std::pow(d, alpha);
  }
  return evaluator_(alpha, d);
}

WeightFunction WeightFunction::with_alpha(double alpha) const {
  WeightFunction phi = *this;
  phi.alpha_ = alpha;
  return phi;
}

namespace {

// Central difference with a relative step; phi is smooth at the grid scales
// used here, so 1e-5 relative keeps truncation and cancellation balanced.
double diff_alpha(const WeightFunction& phi, double alpha, double d) {
  const double h = 1e-5 * std::max(1.0, std::abs(alpha));
  return (phi(alpha + h, d) - phi(alpha - h, d)) / (2.0 * h);
}

double diff_d(const WeightFunction& phi, double alpha, double d) {
  const double h = 1e-5 * std::max(1.0, std::abs(d));
  return (phi(alpha, d + h) - phi(alpha, d - h)) / (2.0 * h);
}

double diff2_d(const WeightFunction& phi, double alpha, double d) {
  const double h = 1e-5 * std::max(1.0, std::abs(d));
  return (phi(alpha, d + h) - 2.0 * phi(alpha, d) + phi(alpha, d - h)) / (h * h);
}

void note_violation(bool& pass, PropertyViolation& worst, double alpha, double d,
                    double magnitude, const char* detail) {
  if (pass || magnitude > worst.magnitude) {
    worst = {alpha, d, magnitude, detail};
  }
  pass = false;
}

}  // namespace

PropertyReport validate_properties(const WeightFunction& phi,
                                   const std::vector<double>& alpha_grid,
                                   const std::vector<double>& d_grid) {
  if (alpha_grid.size() < 2 || d_grid.size() < 2)
    throw std::invalid_argument("validate_properties: grids need at least two points");
  for (size_t i = 1; i < alpha_grid.size(); ++i)
    if (alpha_grid[i] <= alpha_grid[i - 1])
      throw std::invalid_argument("validate_properties: alpha grid must be strictly increasing");
  for (size_t i = 1; i < d_grid.size(); ++i)
    if (d_grid[i] <= d_grid[i - 1])
      throw std::invalid_argument("validate_properties: d grid must be strictly increasing");
  if (d_grid.front() <= 0.0)
    throw std::invalid_argument("validate_properties: d grid must be positive");

  PropertyReport report;
  report.alpha_grid = alpha_grid;
  report.d_grid = d_grid;

  // --- Property 1: phi(0,.) = 1, nonnegative, monotone in alpha,
  //     monotone in d with the sign of alpha.
  for (double d : d_grid) {
    const double at_zero = phi(0.0, d);
    if (std::abs(at_zero - 1.0) > 1e-9)
      note_violation(report.property1_pass, report.worst1, 0.0, d,
                     std::abs(at_zero - 1.0), "phi(0,d) != 1");
  }
  for (double alpha : alpha_grid) {
    for (double d : d_grid) {
      const double value = phi(alpha, d);
      const double scale = std::max(1.0, std::abs(value));
      if (!(value >= 0.0) || !std::isfinite(value)) {
        note_violation(report.property1_pass, report.worst1, alpha, d,
                       std::abs(value), "phi negative or non-finite");
        continue;
      }
      const double slope_alpha = diff_alpha(phi, alpha, d);
      if (slope_alpha < -1e-8 * scale)
        note_violation(report.property1_pass, report.worst1, alpha, d, -slope_alpha,
                       "phi not increasing in alpha");
      if (alpha > 0.0) {
        const double slope_d = diff_d(phi, alpha, d);
        if (slope_d < -1e-8 * scale)
          note_violation(report.property1_pass, report.worst1, alpha, d, -slope_d,
                         "phi not increasing in d for alpha > 0");
      } else if (alpha < 0.0) {
        const double slope_d = diff_d(phi, alpha, d);
        if (slope_d > 1e-8 * scale)
          note_violation(report.property1_pass, report.worst1, alpha, d, slope_d,
                         "phi not decreasing in d for alpha < 0");
      }
    }
  }

  // --- Property 2: for d1 > d2 the ratio phi(alpha,d2)/phi(alpha,d1) is
  //     strictly decreasing in alpha. Sample pairs: adjacent grid points and
  //     the extreme pair.
  std::vector<std::pair<double, double>> pairs;  // (d1, d2) with d1 > d2
  for (size_t i = 1; i < d_grid.size(); ++i) pairs.emplace_back(d_grid[i], d_grid[i - 1]);
  pairs.emplace_back(d_grid.back(), d_grid.front());
  for (const auto& [d1, d2] : pairs) {
    for (double alpha : alpha_grid) {
      const double h = 1e-5 * std::max(1.0, std::abs(alpha));
      const double ratio_plus = phi(alpha + h, d2) / phi(alpha + h, d1);
      const double ratio_minus = phi(alpha - h, d2) / phi(alpha - h, d1);
      const double slope = (ratio_plus - ratio_minus) / (2.0 * h);
      // Strict decrease, judged relative to the ratio's own magnitude: a
      // slope that is zero (to numerical resolution) or positive is a
      // violation.
      const double scale = std::max(std::abs(phi(alpha, d2) / phi(alpha, d1)), 1e-280);
      if (std::isfinite(slope) && slope >= -1e-12 * scale)
        note_violation(report.property2_pass, report.worst2, alpha, d1, slope,
                       "ratio phi(.,d2)/phi(.,d1) not strictly decreasing in alpha");
    }
  }

  // --- Property 3: the quotients (dphi/dd)/(phi/d) and
  //     (d2phi/dd2)/((dphi/dd)/d) stay bounded along d_grid: no more than
  //     10x their magnitude at the median grid degree.
  const double d_med = d_grid[d_grid.size() / 2];
  for (double alpha : alpha_grid) {
    auto quotient1 = [&](double d) {
      const double denom = phi(alpha, d) / d;
      const double numer = diff_d(phi, alpha, d);
      if (std::abs(denom) < 1e-300) return std::abs(numer) < 1e-300 ? 0.0 : INFINITY;
      return numer / denom;
    };
    auto quotient2 = [&](double d) {
      const double h = 1e-5 * std::max(1.0, std::abs(d));
      const double eps = std::numeric_limits<double>::epsilon();
      const double scale = std::max(std::abs(phi(alpha, d)), 1e-300);
      // Central second differences cancel catastrophically when the true
      // curvature sits at or below the roundoff of phi itself; zero those
      // out before forming the quotient so exact-polynomial cases (phi = 1,
      // phi = d) stay clean without masking genuinely small curvature.
      double numer = diff2_d(phi, alpha, d);
      if (!(std::abs(numer) > 64.0 * eps * scale / (h * h))) numer = 0.0;
      const double denom = diff_d(phi, alpha, d) / d;
      if (!(std::abs(denom) > 64.0 * eps * scale / (h * d)))
        return numer == 0.0 ? 0.0 : INFINITY;  // 0/0 (constant phi) is bounded
      return numer / denom;
    };
    const double ref1 = std::abs(quotient1(d_med));
    const double ref2 = std::abs(quotient2(d_med));
    for (double d : d_grid) {
      const double q1 = std::abs(quotient1(d));
      if (q1 > 10.0 * ref1 + 1e-9)
        note_violation(report.property3_pass, report.worst3, alpha, d, q1,
                       "first derivative quotient exceeds 10x its median-degree value");
      const double q2 = std::abs(quotient2(d));
      if (q2 > 10.0 * ref2 + 1e-9)
        note_violation(report.property3_pass, report.worst3, alpha, d, q2,
                       "second derivative quotient exceeds 10x its median-degree value");
    }
  }

  return report;
}

double g(const WeightFunction& phi, double alpha, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw std::invalid_argument("g: degrees must be positive");
  if (d1 == d2)
    throw std::invalid_argument("g: d1 = d2 is degenerate (g identically 1)");
  if (phi.is_power()) return std::pow(d2 / d1, alpha);  // stable for large |alpha|
  return phi(alpha, d2) / phi(alpha, d1);
}

double g_inverse(const WeightFunction& phi, double x, double d1, double d2) {
  if (!(x > 0.0)) throw std::invalid_argument("g_inverse: x must be positive");
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw std::invalid_argument("g_inverse: degrees must be positive");
  if (d1 == d2)
    throw std::invalid_argument("g_inverse: d1 = d2 is degenerate (g not invertible)");

  if (phi.is_power()) return std::log(x) / std::log(d2 / d1);

  // Monotone bisection with doubling bracket expansion from [-1, 1].
  const double target = x;
  auto value = [&](double alpha) { return g(phi, alpha, d1, d2); };
  double lo = -1.0, hi = 1.0;
  double flo = value(lo) - target, fhi = value(hi) - target;
  while (flo * fhi > 0.0) {
    lo *= 2.0;
    hi *= 2.0;
    if (std::abs(lo) > 1e6)
      throw std::runtime_error("g_inverse: no solution within |alpha| <= 1e6");
    flo = value(lo) - target;
    fhi = value(hi) - target;
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = value(mid) - target;
    if (std::abs(fmid) <= 1e-12 * target) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace degroot
