#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>

#include "fsl/grid.hpp"

namespace fsl {

enum class BoundaryKind { dirichlet, periodic };

// One derivative row as relative offsets and weights.
struct StencilRow {
  std::array<int, 5> off{};
  std::array<double, 5> w{};
  int len = 0;
};

// First/second z-derivative stencils: 4th-order central where the 5-point
// stencil fits, 2nd-order central next to a Dirichlet boundary.  With
// periodic=true the 4th-order stencil is used everywhere (offsets wrap).
StencilRow d1_stencil(int i, int n, double h, bool periodic);
StencilRow d2_stencil(int i, int n, double h, bool periodic);

// Derivative along z of every (component, transverse) line.  Values beyond
// the ends are treated as zero, which matches perturbation fields that decay
// inside the truncated domain.  order is 1 or 2; higher orders are composed
// by the norms module.
void z_derivative(const Field& in, Field& out, const Grid1D& g, int order);
ZField z_derivative(const ZField& in, const Grid1D& g, int order);

// L u = diffusion_c u'' + advection(z)_c u' + potential(z) u, acting on nc
// components; the advection coefficient is per component (conjugated
// operators need that once the diffusivities differ) and the potential
// couples components pointwise.
struct ZOperator {
  int nc = 1;
  std::vector<double> diffusion;
  std::function<Eigen::VectorXd(double)> advection;  // may be empty for zero
  std::function<Eigen::MatrixXd(double)> potential;  // may be empty for zero
};

// Dirichlet: unknowns are the n-2 interior nodes per component (zero boundary
// data).  Periodic: the n-1 distinct nodes per component.  Row/column index
// is c * n_nodes + node.
Eigen::SparseMatrix<double> assemble_z_operator(const ZOperator& op, const Grid1D& g,
                                                BoundaryKind bc);

// Contribution of fixed nonzero boundary values to L at the interior nodes,
// to pair with the Dirichlet assembly.
Eigen::VectorXd dirichlet_boundary_contribution(const ZOperator& op, const Grid1D& g,
                                                const Eigen::VectorXd& left,
                                                const Eigen::VectorXd& right);

}  // namespace fsl
