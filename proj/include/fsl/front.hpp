#pragma once

#include <Eigen/Dense>
#include <complex>
#include <filesystem>
#include <vector>

#include "fsl/grid.hpp"
#include "fsl/model.hpp"
#include "fsl/spline.hpp"

namespace fsl {

// How to present the stored front in the normalized frame where the rest
// state behind the front sits at the origin: subtract `shift` (= phi_minus);
// `reflected` marks fronts that were solved traveling in the -z direction.
struct FrontTransform {
  std::vector<double> shift;
  bool reflected = false;
};

// Log-linear fit of the tail approach on each side (rate is the exponent of
// e^{rate * z}; negative on the right tail, positive on the left).
struct TailFit {
  double rate_minus = 0.0, rate_plus = 0.0;
  double r2_minus = 0.0, r2_plus = 0.0;
};

struct FrontProfile {
  Grid1D grid;
  int nc = 1;
  std::vector<double> values;   // component-major: values[c*nz + i]
  std::vector<double> dvalues;  // phi' on the grid
  std::vector<double> d2values; // phi'' from the profile equation
  double c = 0.0;
  std::vector<double> phi_minus, phi_plus;
  double omega_minus = 0.0, omega_plus = 0.0;  // omega_minus < 0 < omega_plus
  bool marginal_minus = false, marginal_plus = false;
  FrontTransform transform;
  TailFit tails;

  double value(int comp, int i) const { return values[static_cast<size_t>(comp) * grid.n + i]; }
  double dvalue(int comp, int i) const { return dvalues[static_cast<size_t>(comp) * grid.n + i]; }
  ZField zfield() const;
  ZField dzfield() const;
  double jump_norm() const;  // |phi_plus - phi_minus|_inf
};

// Cubic-spline view of a front (clamped flat at the truncated ends), for
// evaluating shifted profiles phi(z - q).
struct FrontInterpolant {
  std::vector<CubicSpline> phi, dphi, d2phi;
  int nc = 0;
  double eval(int c, double z) const { return phi[c].eval(z); }
  double eval_d(int c, double z) const { return dphi[c].eval(z); }
  double eval_d2(int c, double z) const { return d2phi[c].eval(z); }
};
FrontInterpolant build_interpolant(const FrontProfile& f);

struct FrontSolveOptions {
  double tol = 1e-10;        // infinity norm of the collocation residual
  int max_iter = 60;
  int phase_component = -1;  // -1 = component with the largest jump
};

// Newton-collocation solution of 0 = D phi'' + c phi' + f(phi) on the grid,
// Dirichlet data taken from the first/last nodes of the guess.  The phase
// condition pins the phase component at the node nearest z = 0 to the
// midpoint of its rest values; the wave speed c is an unknown.
FrontProfile solve_front(const ReactionSystem& sys, const Grid1D& g, const ZField& guess,
                         double c_guess, const FrontSolveOptions& opts = {});

// All spatial roots mu of det(mu^2 D + c mu I + A) = 0 at each rest state,
// with the decay rates selected from the profile's approach directions.
struct RateInfo {
  std::vector<std::complex<double>> mu_minus, mu_plus;
  double omega_minus = 0.0, omega_plus = 0.0;
  bool marginal_minus = false, marginal_plus = false;
};
RateInfo asymptotic_rates(const ReactionSystem& sys, const Eigen::MatrixXd& A_minus,
                          const Eigen::MatrixXd& A_plus, double c, double marginal_tol = 1e-9);

// Seeds.
ZField tanh_seed(const Eigen::VectorXd& rest_minus, const Eigen::VectorXd& rest_plus,
                 double width, const Grid1D& g);
double bistable_exact_speed(double a);
double bistable_exact_profile(double z);

// Model-aware driver: builds a seed for the given system (exact logistic
// shape for "bistable", tanh pair for "combustion"), solves, and for the
// combustion model falls back to continuation in kappa if the direct solve
// fails.  L == 0 picks the domain from the asymptotic rates.
struct AutoSolveSpec {
  double L = 0.0;
  double h = 0.1;
  FrontSolveOptions newton;
};
FrontProfile solve_front_auto(const ReactionSystem& sys, const AutoSolveSpec& spec);

double recommended_half_width(double omega_minus, double omega_plus);

// Resample onto a new grid by spline interpolation (no re-solving).
FrontProfile resample(const FrontProfile& f, const ReactionSystem& sys, const Grid1D& g);

void save_front(const FrontProfile& f, const std::filesystem::path& path);
FrontProfile load_front(const std::filesystem::path& path);

}  // namespace fsl
