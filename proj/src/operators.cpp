#include "fsl/operators.hpp"

#include <vector>

#include "fsl/errors.hpp"

namespace fsl {

StencilRow d1_stencil(int i, int n, double h, bool periodic) {
  StencilRow r;
  if (periodic || (i >= 2 && i <= n - 3)) {
    r.len = 5;
    r.off = {-2, -1, 0, 1, 2};
    r.w = {1.0 / (12.0 * h), -8.0 / (12.0 * h), 0.0, 8.0 / (12.0 * h), -1.0 / (12.0 * h)};
  } else {
    r.len = 3;
    r.off = {-1, 0, 1, 0, 0};
    r.w = {-1.0 / (2.0 * h), 0.0, 1.0 / (2.0 * h), 0.0, 0.0};
  }
  return r;
}

StencilRow d2_stencil(int i, int n, double h, bool periodic) {
  StencilRow r;
  const double h2 = h * h;
  if (periodic || (i >= 2 && i <= n - 3)) {
    r.len = 5;
    r.off = {-2, -1, 0, 1, 2};
    r.w = {-1.0 / (12.0 * h2), 16.0 / (12.0 * h2), -30.0 / (12.0 * h2), 16.0 / (12.0 * h2),
           -1.0 / (12.0 * h2)};
  } else {
    r.len = 3;
    r.off = {-1, 0, 1, 0, 0};
    r.w = {1.0 / h2, -2.0 / h2, 1.0 / h2, 0.0, 0.0};
  }
  return r;
}

namespace {

// Apply a z-stencil to one strided line with zero extension.
inline double apply_row(const double* line, int stride, int i, int n, const StencilRow& r) {
  double acc = 0.0;
  for (int k = 0; k < r.len; ++k) {
    int j = i + r.off[k];
    if (j < 0 || j >= n) continue;
    acc += r.w[k] * line[static_cast<size_t>(j) * stride];
  }
  return acc;
}

}  // namespace

void z_derivative(const Field& in, Field& out, const Grid1D& g, int order) {
  if (order != 1 && order != 2) throw ConfigError("z_derivative: order must be 1 or 2");
  if (!out.same_shape(in)) out = Field(in.nc, in.nz, in.ny);
  const int n = in.nz;
  const double h = g.h();
  std::vector<StencilRow> rows(n);
  for (int i = 0; i < n; ++i)
    rows[i] = (order == 1) ? d1_stencil(i, n, h, false) : d2_stencil(i, n, h, false);
  for (int c = 0; c < in.nc; ++c) {
    const double* base = in.row(c, 0);
    for (int i = 0; i < n; ++i) {
      const StencilRow& r = rows[i];
      double* dst = out.row(c, i);
      for (int iy = 0; iy < in.ny; ++iy) {
        double acc = 0.0;
        for (int k = 0; k < r.len; ++k) {
          int j = i + r.off[k];
          if (j < 0 || j >= n) continue;
          acc += r.w[k] * base[static_cast<size_t>(j) * in.ny + iy];
        }
        dst[iy] = acc;
      }
    }
  }
}

ZField z_derivative(const ZField& in, const Grid1D& g, int order) {
  if (order != 1 && order != 2) throw ConfigError("z_derivative: order must be 1 or 2");
  ZField out(in.nc, in.nz);
  const int n = in.nz;
  const double h = g.h();
  for (int c = 0; c < in.nc; ++c) {
    const double* line = in.comp(c);
    for (int i = 0; i < n; ++i) {
      StencilRow r = (order == 1) ? d1_stencil(i, n, h, false) : d2_stencil(i, n, h, false);
      out.at(c, i) = apply_row(line, 1, i, n, r);
    }
  }
  return out;
}

Eigen::SparseMatrix<double> assemble_z_operator(const ZOperator& op, const Grid1D& g,
                                                BoundaryKind bc) {
  g.validate();
  if (static_cast<int>(op.diffusion.size()) != op.nc)
    throw ConfigError("assemble_z_operator: diffusion size mismatch");

  const int n = g.n;
  const double h = g.h();
  const bool periodic = (bc == BoundaryKind::periodic);
  const int nn = periodic ? n - 1 : n - 2;  // unknown nodes per component
  const int dim = op.nc * nn;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(dim) * (5 + op.nc));

  for (int j = 0; j < nn; ++j) {
    const int i = periodic ? j : j + 1;  // physical node index
    const double z = g.z(i);

    Eigen::VectorXd adv;
    if (op.advection) {
      adv = op.advection(z);
      if (adv.size() != op.nc)
        throw ConfigError("assemble_z_operator: advection vector has wrong size");
    }
    Eigen::MatrixXd P;
    if (op.potential) {
      P = op.potential(z);
      if (P.rows() != op.nc || P.cols() != op.nc)
        throw ConfigError("assemble_z_operator: potential block has wrong shape");
    }

    const StencilRow s2 = d2_stencil(i, n, h, periodic);
    const StencilRow s1 = d1_stencil(i, n, h, periodic);
    for (int c = 0; c < op.nc; ++c) {
      const int row = c * nn + j;
      for (int k = 0; k < s2.len; ++k) {
        int jj = periodic ? ((j + s2.off[k]) % nn + nn) % nn : j + s2.off[k];
        if (jj < 0 || jj >= nn) continue;  // boundary columns dropped (zero data)
        trip.emplace_back(row, c * nn + jj, op.diffusion[c] * s2.w[k]);
      }
      if (adv.size() > 0 && adv[c] != 0.0) {
        for (int k = 0; k < s1.len; ++k) {
          int jj = periodic ? ((j + s1.off[k]) % nn + nn) % nn : j + s1.off[k];
          if (jj < 0 || jj >= nn) continue;
          trip.emplace_back(row, c * nn + jj, adv[c] * s1.w[k]);
        }
      }
      if (P.size() > 0) {
        for (int cc = 0; cc < op.nc; ++cc) {
          if (P(c, cc) != 0.0) trip.emplace_back(row, cc * nn + j, P(c, cc));
        }
      }
    }
  }

  Eigen::SparseMatrix<double> A(dim, dim);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

Eigen::VectorXd dirichlet_boundary_contribution(const ZOperator& op, const Grid1D& g,
                                                const Eigen::VectorXd& left,
                                                const Eigen::VectorXd& right) {
  if (left.size() != op.nc || right.size() != op.nc)
    throw ConfigError("dirichlet_boundary_contribution: boundary value size mismatch");
  const int n = g.n;
  const double h = g.h();
  const int nn = n - 2;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(op.nc * nn);

  for (int j = 0; j < nn; ++j) {
    const int i = j + 1;
    const double z = g.z(i);
    Eigen::VectorXd adv;
    if (op.advection) adv = op.advection(z);
    const StencilRow s2 = d2_stencil(i, n, h, false);
    const StencilRow s1 = d1_stencil(i, n, h, false);
    for (int c = 0; c < op.nc; ++c) {
      double acc = 0.0;
      for (int k = 0; k < s2.len; ++k) {
        int ii = i + s2.off[k];
        if (ii == 0) acc += op.diffusion[c] * s2.w[k] * left[c];
        if (ii == n - 1) acc += op.diffusion[c] * s2.w[k] * right[c];
      }
      if (adv.size() > 0 && adv[c] != 0.0) {
        for (int k = 0; k < s1.len; ++k) {
          int ii = i + s1.off[k];
          if (ii == 0) acc += adv[c] * s1.w[k] * left[c];
          if (ii == n - 1) acc += adv[c] * s1.w[k] * right[c];
        }
      }
      b[c * nn + j] = acc;
    }
  }
  return b;
}

}  // namespace fsl
