#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace fsl {

// Reaction system u_t = D u_zz + f(u) in one space dimension (the transverse
// Laplacian is added by the evolution module).  Components are ordered so
// that the first n1 of them enter f linearly when the last n2 vanish:
// f(u1, 0) = (A1 u1, 0).  That structure is what the triangular estimates in
// the analysis module rely on.
struct ReactionSystem {
  std::string name;
  int n = 0, n1 = 0, n2 = 0;
  std::vector<double> diffusion;  // per-component diffusion coefficients
  Eigen::MatrixXd A1;             // n1 x n1 linear block
  Eigen::VectorXd rest_minus;     // canonical rest state behind the front
  Eigen::VectorXd rest_plus;      // canonical rest state ahead of the front
  bool theory_mode = true;        // identity diffusion when true
  std::map<std::string, double> params;  // scalar parameters the factory saw

  std::function<void(const double*, double*)> f;
  std::function<void(const double*, Eigen::MatrixXd&)> df;
  // d2f[k](i,j) = second derivative of f_k with respect to u_i, u_j
  std::function<void(const double*, std::vector<Eigen::MatrixXd>&)> d2f;
};

// Two-component exothermic-reaction model: u1 is temperature, u2 fuel mass
// fraction.  f(u1, u2) = (u2 g(u1), -kappa u2 g(u1)) with the reaction rate
// g(u1) = exp(-1/u1) for u1 > g_clamp and exactly 0 otherwise.  g vanishes to
// all orders at 0, so both rest states have degenerate Jacobians.
struct CombustionParams {
  double epsilon = 1.0;  // fuel diffusivity used in exploration mode
  double kappa = 1.0;    // exothermicity ratio
  double g_clamp = 0.0;  // rate is exactly zero at or below this temperature
};

// Scalar cubic model f(u) = u (1 - u) (u - a), a in (1/2, 1).  Its front and
// speed are known in closed form, which makes it the calibration model.
struct BistableParams {
  double a = 0.7;
};

ReactionSystem make_combustion(const CombustionParams& p, bool theory_mode = true);
ReactionSystem make_bistable(const BistableParams& p);

Eigen::VectorXd eval_f(const ReactionSystem& sys, const Eigen::VectorXd& u);
Eigen::MatrixXd eval_jacobian(const ReactionSystem& sys, const Eigen::VectorXd& u);

// N(u, v) = integral_0^1 [df(u + s v) - df(u)] ds by Gauss-Legendre
// quadrature.  Exact for Jacobians polynomial in u of degree <= 2*order - 1
// along the segment.
Eigen::MatrixXd eval_N(const ReactionSystem& sys, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v, int quad_order = 8);

}  // namespace fsl
