#pragma once

#include <functional>
#include <string>
#include <vector>

namespace degroot {

// Degree-dependence function phi(alpha, d). The canonical family is
// phi(alpha, d) = d^alpha; custom families plug in an evaluator and are
// validated numerically by validate_properties. A WeightFunction carries its
// own alpha; the two-argument call evaluates the family at any alpha (used by
// grids and by the ratio g).
class WeightFunction {
 public:
  static WeightFunction power(double alpha);
  static WeightFunction custom(std::string name, double alpha,
                               std::function<double(double, double)> evaluator);

  // Family evaluation at an arbitrary alpha. For the power family, d = 0
  // raises a domain error when alpha < 0; 0^0 is defined as 1 so that
  // phi(0, d) = 1 holds on all of [0, inf).
  double operator()(double alpha, double d) const;

  // Evaluation at the stored alpha.
  double evaluate(double d) const { return (*this)(alpha_, d); }

  double alpha() const { return alpha_; }
  const std::string& name() const { return name_; }
  bool is_power() const { return power_; }
  WeightFunction with_alpha(double alpha) const;

 private:
  WeightFunction() = default;
  bool power_ = true;
  double alpha_ = 0.0;
  std::string name_ = "power";
  std::function<double(double, double)> evaluator_;
};

struct PropertyViolation {
  double alpha = 0.0;
  double d = 0.0;
  double magnitude = 0.0;  // how far past the allowed bound
  std::string detail;
};

// Grid-based verdicts for the three structural properties of phi. Finite
// grids can falsify the analytic statements but not prove them; failures are
// reported with their worst location, never thrown.
struct PropertyReport {
  std::vector<double> alpha_grid;
  std::vector<double> d_grid;
  bool property1_pass = true;  // phi(0,.) = 1, nonnegative, monotone in alpha and d
  bool property2_pass = true;  // ratio strictly decreasing in alpha for d1 > d2
  bool property3_pass = true;  // both derivative quotients bounded along d_grid
  PropertyViolation worst1, worst2, worst3;
};

PropertyReport validate_properties(const WeightFunction& phi,
                                   const std::vector<double>& alpha_grid,
                                   const std::vector<double>& d_grid);

// Weight ratio g(alpha) = phi(alpha, d2) / phi(alpha, d1); strictly monotone
// in alpha whenever d1 != d2 (both > 0) and phi satisfies the ratio property.
double g(const WeightFunction& phi, double alpha, double d1, double d2);

// Solves g(alpha) = x. Closed form for the power family; monotone bisection
// with doubling bracket expansion from [-1, 1] otherwise (relative tolerance
// 1e-12 on g-values, no-solution error once |alpha| exceeds 1e6).
double g_inverse(const WeightFunction& phi, double x, double d1, double d2);

}  // namespace degroot
