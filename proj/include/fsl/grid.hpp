#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fsl/errors.hpp"

namespace fsl {

// Uniform grid on [-L, L], n nodes inclusive of both ends.
struct Grid1D {
  double L = 0.0;
  int n = 0;

  double h() const { return 2.0 * L / (n - 1); }
  double z(int i) const { return -L + i * h(); }
  void validate() const {
    if (L <= 0.0 || n < 5) throw ConfigError("Grid1D: need L > 0 and at least 5 nodes");
  }
};

// Periodic transverse grid in (d-1) dimensions, d = 2 or 3.
// Each axis spans [0, box) with uniform spacing box/n.
struct TransverseGrid {
  int dim = 1;  // d-1
  std::array<int, 2> n{1, 1};
  std::array<double, 2> box{1.0, 1.0};

  int total() const { return dim == 1 ? n[0] : n[0] * n[1]; }
  double spacing(int axis) const { return box[axis] / n[axis]; }
  double cell() const {
    return dim == 1 ? spacing(0) : spacing(0) * spacing(1);
  }
  double y(int axis, int i) const { return i * spacing(axis); }
  // flatten: dim==1 -> i0; dim==2 -> i0*n[1] + i1
  int index(int i0, int i1 = 0) const { return dim == 1 ? i0 : i0 * n[1] + i1; }
  void validate() const {
    if (dim != 1 && dim != 2) throw ConfigError("TransverseGrid: dim must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
      if (n[a] < 4 || box[a] <= 0.0)
        throw ConfigError("TransverseGrid: need box > 0 and at least 4 nodes per axis");
    }
  }
};

// Multi-component field on the (z, y) product grid.
// Layout: a[(c*nz + iz)*ny + iy], so each (component, z-row) is a contiguous
// run over the transverse index -- the layout batched FFTs want.
struct Field {
  int nc = 0, nz = 0, ny = 0;
  std::vector<double> a;

  Field() = default;
  Field(int nc_, int nz_, int ny_) : nc(nc_), nz(nz_), ny(ny_), a(static_cast<size_t>(nc_) * nz_ * ny_, 0.0) {}

  double& at(int c, int iz, int iy) { return a[(static_cast<size_t>(c) * nz + iz) * ny + iy]; }
  double at(int c, int iz, int iy) const { return a[(static_cast<size_t>(c) * nz + iz) * ny + iy]; }
  double* row(int c, int iz) { return a.data() + (static_cast<size_t>(c) * nz + iz) * ny; }
  const double* row(int c, int iz) const { return a.data() + (static_cast<size_t>(c) * nz + iz) * ny; }
  size_t size() const { return a.size(); }
  bool same_shape(const Field& o) const { return nc == o.nc && nz == o.nz && ny == o.ny; }
};

// Multi-component profile on the z grid only: a[c*nz + iz].
struct ZField {
  int nc = 0, nz = 0;
  std::vector<double> a;

  ZField() = default;
  ZField(int nc_, int nz_) : nc(nc_), nz(nz_), a(static_cast<size_t>(nc_) * nz_, 0.0) {}

  double& at(int c, int iz) { return a[static_cast<size_t>(c) * nz + iz]; }
  double at(int c, int iz) const { return a[static_cast<size_t>(c) * nz + iz]; }
  double* comp(int c) { return a.data() + static_cast<size_t>(c) * nz; }
  const double* comp(int c) const { return a.data() + static_cast<size_t>(c) * nz; }
};

// Scalar field on the transverse grid.
struct YField {
  std::vector<double> a;
  YField() = default;
  explicit YField(int ny) : a(ny, 0.0) {}
  int size() const { return static_cast<int>(a.size()); }
};

// (d-1)-vector field on the transverse grid (e.g. a transverse gradient).
struct YVecField {
  int dim = 0;
  std::vector<YField> comp;
  YVecField() = default;
  YVecField(int dim_, int ny) : dim(dim_), comp(dim_, YField(ny)) {}
};

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace fsl
