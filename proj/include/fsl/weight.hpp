#pragma once

#include <array>

namespace fsl {

// Two-sided exponential weight gamma(z) = exp(sigma(z)) with
//   sigma(z) = alpha_minus * z   for z <= -bridge_halfwidth,
//   sigma(z) = alpha_plus  * z   for z >= +bridge_halfwidth,
// joined on the bridge interval by a quintic Hermite polynomial so that sigma
// is C^2 everywhere.  When alpha_minus == alpha_plus the bridge reproduces the
// straight line exactly.
struct WeightSpec {
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  double bridge_halfwidth = 1.0;
};

class WeightFunction {
 public:
  WeightFunction() : WeightFunction(WeightSpec{}) {}
  explicit WeightFunction(const WeightSpec& spec);

  const WeightSpec& spec() const { return s_; }

  double sigma(double z) const;
  double dsigma(double z) const;
  double d2sigma(double z) const;

  // exp(sigma(z)); throws if |sigma| > 700 (use log-space helpers instead).
  double gamma(double z) const;
  double log_gamma(double z) const { return sigma(z); }

  // gamma(z) * u evaluated safely in log space when the plain product would
  // overflow or underflow through an intermediate.
  double gamma_times(double z, double u) const;

 private:
  WeightSpec s_;
  std::array<double, 6> poly_;  // bridge polynomial coefficients in t = (z+b)/(2b)
};

}  // namespace fsl
