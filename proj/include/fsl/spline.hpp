#pragma once

#include <vector>

namespace fsl {

// Clamped cubic spline on an increasing knot sequence.  End slopes are
// prescribed (zero by default, which matches profiles that flatten out at the
// ends of a truncated domain).  Evaluation outside the knot range extends the
// end values as constants.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y, double slope_left = 0.0,
              double slope_right = 0.0);

  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

  bool empty() const { return x_.empty(); }
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  int locate(double x) const;
  std::vector<double> x_, y_, m_;  // m_ = second derivatives at knots
};

}  // namespace fsl
