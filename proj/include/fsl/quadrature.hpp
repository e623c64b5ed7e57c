#pragma once

#include <functional>
#include <vector>

namespace fsl {

struct QuadRule {
  std::vector<double> x, w;
};

// Gauss-Legendre rule with `order` points mapped to [0, 1].
// Exact for polynomials of degree 2*order - 1.
QuadRule gauss_legendre_01(int order);

// Trapezoid weights for a uniform grid with n nodes and spacing h.
std::vector<double> trapezoid_weights(int n, double h);

// Adaptive Simpson on [a, b] to the given absolute/relative tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, double rel_tol = 1e-10, int max_depth = 40);

}  // namespace fsl
