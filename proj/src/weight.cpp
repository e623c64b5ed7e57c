#include "fsl/weight.hpp"

#include <cmath>

#include "fsl/errors.hpp"

namespace fsl {

WeightFunction::WeightFunction(const WeightSpec& spec) : s_(spec) {
  if (s_.bridge_halfwidth <= 0.0) throw ConfigError("WeightFunction: bridge_halfwidth must be > 0");
  const double b = s_.bridge_halfwidth, ell = 2.0 * b;
  const double f0 = -s_.alpha_minus * b, d0 = ell * s_.alpha_minus;
  const double f1 = s_.alpha_plus * b, d1 = ell * s_.alpha_plus;
  // Quintic Hermite on t in [0,1] matching (value, slope, zero curvature) at
  // both ends; curvature zero keeps sigma C^2 against the linear branches.
  poly_[0] = f0;
  poly_[1] = d0;
  poly_[2] = 0.0;
  poly_[3] = -10.0 * f0 - 6.0 * d0 + 10.0 * f1 - 4.0 * d1;
  poly_[4] = 15.0 * f0 + 8.0 * d0 - 15.0 * f1 + 7.0 * d1;
  poly_[5] = -6.0 * f0 - 3.0 * d0 + 6.0 * f1 - 3.0 * d1;
}

double WeightFunction::sigma(double z) const {
  const double b = s_.bridge_halfwidth;
  if (z <= -b) return s_.alpha_minus * z;
  if (z >= b) return s_.alpha_plus * z;
  const double t = (z + b) / (2.0 * b);
  double p = 0.0;
  for (int i = 5; i >= 0; --i) p = p * t + poly_[i];
  return p;
}

double WeightFunction::dsigma(double z) const {
  const double b = s_.bridge_halfwidth;
  if (z <= -b) return s_.alpha_minus;
  if (z >= b) return s_.alpha_plus;
  const double t = (z + b) / (2.0 * b);
  double p = 0.0;
  for (int i = 5; i >= 1; --i) p = p * t + i * poly_[i];
  return p / (2.0 * b);
}

double WeightFunction::d2sigma(double z) const {
  const double b = s_.bridge_halfwidth;
  if (z <= -b || z >= b) return 0.0;
  const double t = (z + b) / (2.0 * b);
  double p = 0.0;
  for (int i = 5; i >= 2; --i) p = p * t + i * (i - 1) * poly_[i];
  return p / (4.0 * b * b);
}

double WeightFunction::gamma(double z) const {
  const double s = sigma(z);
  if (std::abs(s) > 700.0)
    throw Error("WeightFunction::gamma would overflow; use log_gamma/gamma_times");
  return std::exp(s);
}

double WeightFunction::gamma_times(double z, double u) const {
  const double s = sigma(z);
  if (u == 0.0) return 0.0;
  if (std::abs(s) <= 700.0) return std::exp(s) * u;
  const double lg = s + std::log(std::abs(u));
  double v = (lg > 700.0) ? INFINITY : std::exp(lg);
  return u > 0.0 ? v : -v;
}

}  // namespace fsl
