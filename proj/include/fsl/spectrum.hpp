#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <filesystem>
#include <vector>

#include "fsl/front.hpp"
#include "fsl/grid.hpp"
#include "fsl/model.hpp"
#include "fsl/operators.hpp"
#include "fsl/weight.hpp"

namespace fsl {

// Essential-spectrum branch data at one rest state under the weight exponent
// alpha: lambda_j(theta) = mu_j(A) - theta^2 + alpha^2 - c alpha
//                          + i theta (c - 2 alpha).
struct DispersionCurve {
  std::vector<double> theta;
  std::vector<std::vector<std::complex<double>>> branches;  // [branch][theta]
  int side = 0;  // -1 or +1 once attached to a rest state
  double alpha = 0.0;
};

std::vector<double> default_theta_grid(double c, int n = 1024);

DispersionCurve dispersion_curves(const Eigen::MatrixXd& A, double c, double alpha,
                                  const std::vector<double>& theta_grid, int side = 0);

void write_dispersion_csv(const DispersionCurve& curve, const std::filesystem::path& path);

// Rightmost real part over both rest states: closed form
// max_j Re mu_j(A_pm) + alpha_pm^2 - c alpha_pm (the maximum over theta sits
// at theta = 0).
double essential_abscissa(const FrontProfile& front, const ReactionSystem& sys,
                          const WeightSpec& alpha);

// Grid-sampled maximum of Re lambda, for cross-checking the closed form.
double essential_abscissa_sampled(const Eigen::MatrixXd& A, double c, double alpha,
                                  const std::vector<double>& theta_grid);

// gamma (D dzz + c dz + df(phi)) gamma^{-1} along a solved profile; the
// potential may only be evaluated at grid nodes of the profile.
ZOperator conjugated_operator(const FrontProfile& front, const ReactionSystem& sys,
                              const WeightFunction& w);

struct Spectrum1D {
  std::vector<std::complex<double>> lambda;  // sorted by descending real part
  Eigen::MatrixXcd vectors;  // column k pairs with lambda[k]; interior nodes, component-major
  Grid1D grid;
  bool complete = false;  // dense path: every discrete eigenvalue is present
};

// Eigenvalues of the discretized conjugated operator with Dirichlet ends.
// Dense solve up to `dense_limit` unknowns; beyond that, a shift-invert
// iteration returns only the cluster nearest zero (complete == false).
Spectrum1D discrete_spectrum_1d(const FrontProfile& front, const ReactionSystem& sys,
                                const WeightSpec& alpha, const Grid1D& grid,
                                int dense_limit = 2000);

// Ritz pairs of a real sparse matrix nearest `shift` by block inverse
// iteration.  Deterministic for a fixed seed.
std::pair<std::vector<std::complex<double>>, Eigen::MatrixXcd> ritz_nearest(
    const Eigen::SparseMatrix<double>& A, double shift, int want, int iters = 60,
    unsigned long long seed = 12345);

struct AdmissibilityReport {
  bool rate_minus_ok = false;  // 0 < alpha_- < -omega_-
  bool rate_plus_ok = false;   // 0 <= alpha_+ < omega_+
  bool abscissa_ok = false;    // essential abscissa < -nu
  bool eigenvalue_ok = false;  // exactly one eigenvalue with Re >= -nu/2, and it is ~0
  double abscissa = 0.0;
  std::complex<double> translational;  // refined eigenvalue nearest zero
  int n_right = 0;                     // eigenvalues with Re >= -nu/2
  bool admissible() const {
    return rate_minus_ok && rate_plus_ok && abscissa_ok && eigenvalue_ok;
  }
};

AdmissibilityReport weight_admissibility(const FrontProfile& front, const ReactionSystem& sys,
                                         const WeightSpec& alpha, double nu);

struct WeightSearchResult {
  bool found = false;
  WeightSpec spec;
  AdmissibilityReport report;
  double nu = 0.0;
};

// Grid search over the rate rectangle (0, -omega_-) x [0, omega_+), ranked by
// the closed-form margin -abscissa - nu_target; the few best candidates get
// the full (eigenvalue-checked) admissibility run.
WeightSearchResult find_weight(const FrontProfile& front, const ReactionSystem& sys,
                               double nu_target, int grid_points = 9);

// In d >= 2 every 1D spectrum point eta drags the horizontal half-line
// {Re lambda <= Re eta, Im lambda = Im eta} into the essential spectrum.
struct HalfLine {
  double re_max = 0.0;
  double im = 0.0;
};

std::vector<HalfLine> multidim_essential_set(const std::vector<std::complex<double>>& eta);
bool halfline_contains(const HalfLine& hl, std::complex<double> lambda, double tol = 1e-12);

}  // namespace fsl
