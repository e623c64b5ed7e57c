#include "fsl/norms.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fsl/errors.hpp"
#include "fsl/operators.hpp"

namespace fsl {

namespace {

void check_resolution(int k, const Grid1D* zg, const TransverseGrid& yg) {
  if (k < 0) throw ConfigError("sobolev norm: k must be >= 0");
  if (zg && zg->n < 2 * k + 1) throw ConfigError("sobolev norm: too few z nodes for requested k");
  for (int a = 0; a < yg.dim; ++a)
    if (yg.n[a] < 2 * k + 1)
      throw ConfigError("sobolev norm: too few transverse nodes for requested k");
}

// Conjugate-packing weights of the r2c layout: self-conjugate modes count
// once, all others twice.
std::vector<double> packing_weights(const TransverseGrid& g, int n_modes) {
  std::vector<double> w(n_modes, 2.0);
  if (g.dim == 1) {
    w[0] = 1.0;
    if (g.n[0] % 2 == 0) w[n_modes - 1] = 1.0;
  } else {
    int nm1 = g.n[1] / 2 + 1;
    for (int k0 = 0; k0 < g.n[0]; ++k0) {
      w[k0 * nm1 + 0] = 1.0;
      if (g.n[1] % 2 == 0) w[k0 * nm1 + nm1 - 1] = 1.0;
    }
  }
  return w;
}

// z-derivative of order m (0..4), composed from the 1st/2nd order stencils.
Field z_derivative_m(const Field& u, const Grid1D& g, int m) {
  if (m == 0) return u;
  Field out, tmp;
  if (m == 1) {
    z_derivative(u, out, g, 1);
  } else if (m == 2) {
    z_derivative(u, out, g, 2);
  } else if (m == 3) {
    z_derivative(u, tmp, g, 2);
    z_derivative(tmp, out, g, 1);
  } else if (m == 4) {
    z_derivative(u, tmp, g, 2);
    z_derivative(tmp, out, g, 2);
  } else {
    throw ConfigError("sobolev norm: derivative order beyond 4 not supported");
  }
  return out;
}

// Sum over transverse modes and rows of |xi0^a0 xi1^a1 hat|^2 for every
// transverse multi-index with a0 + a1 == ky, via Parseval.
double accumulate_y(const std::vector<std::complex<double>>& hat, int rows,
                    const TransverseFft& fft, int ky, const std::vector<double>& pack) {
  const int nm = fft.n_modes();
  const auto& x0 = fft.xi_deriv(0);
  const auto& x1 = fft.xi_deriv(1);
  const int dim = fft.grid().dim;
  std::vector<double> fac(nm, 0.0);
  for (int m = 0; m < nm; ++m) {
    double s = 0.0;
    if (dim == 1) {
      double p = 1.0;
      for (int i = 0; i < ky; ++i) p *= x0[m];
      s = p * p;
    } else {
      for (int a0 = 0; a0 <= ky; ++a0) {
        double p = 1.0;
        for (int i = 0; i < a0; ++i) p *= x0[m];
        for (int i = 0; i < ky - a0; ++i) p *= x1[m];
        s += p * p;
      }
    }
    fac[m] = s * pack[m];
  }
  double acc = 0.0;
  for (int r = 0; r < rows; ++r) {
    const std::complex<double>* row = hat.data() + static_cast<size_t>(r) * nm;
    for (int m = 0; m < nm; ++m) acc += fac[m] * std::norm(row[m]);
  }
  return acc;
}

double sobolev_sq(const Field& u, const Grid1D& zg, const TransverseFft& fft, int k) {
  check_resolution(k, &zg, fft.grid());
  const int rows = u.nc * u.nz;
  if (u.ny != fft.n_real()) throw ConfigError("sobolev_norm: transverse size mismatch");
  const double cell = fft.grid().cell();
  const double measure = zg.h() * cell / fft.n_real();
  std::vector<std::complex<double>> hat(static_cast<size_t>(rows) * fft.n_modes());
  const std::vector<double> pack = packing_weights(fft.grid(), fft.n_modes());

  double acc = 0.0;
  for (int az = 0; az <= k; ++az) {
    Field d = z_derivative_m(u, zg, az);
    fft.forward(d.a.data(), hat.data(), rows);
    for (int ky = 0; ky + az <= k; ++ky) acc += measure * accumulate_y(hat, rows, fft, ky, pack);
  }
  return acc;
}

Field weighted_copy(const Field& u, const Grid1D& zg, const WeightFunction& w) {
  Field g = u;
  for (int iz = 0; iz < u.nz; ++iz) {
    const double z = zg.z(iz);
    const double s = w.sigma(z);
    if (std::abs(s) <= 700.0) {
      const double gz = std::exp(s);
      for (int c = 0; c < u.nc; ++c) {
        double* row = g.row(c, iz);
        for (int iy = 0; iy < u.ny; ++iy) row[iy] *= gz;
      }
    } else {
      for (int c = 0; c < u.nc; ++c) {
        double* row = g.row(c, iz);
        for (int iy = 0; iy < u.ny; ++iy) row[iy] = w.gamma_times(z, row[iy]);
      }
    }
  }
  return g;
}

}  // namespace

double sobolev_norm(const Field& u, const Grid1D& zg, const TransverseFft& fft, int k) {
  return std::sqrt(sobolev_sq(u, zg, fft, k));
}

double sobolev_norm_weighted(const Field& u, const Grid1D& zg, const TransverseFft& fft, int k,
                             const WeightFunction& w) {
  Field g = weighted_copy(u, zg, w);
  return std::sqrt(sobolev_sq(g, zg, fft, k));
}

double h_space_norm(const Field& u, const Grid1D& zg, const TransverseFft& fft, int k,
                    const WeightFunction& w) {
  return std::max(sobolev_norm(u, zg, fft, k), sobolev_norm_weighted(u, zg, fft, k, w));
}

double sobolev_norm_y(const YField& q, const TransverseFft& fft, int k) {
  check_resolution(k, nullptr, fft.grid());
  if (q.size() != fft.n_real()) throw ConfigError("sobolev_norm_y: size mismatch");
  const double measure = fft.grid().cell() / fft.n_real();
  std::vector<std::complex<double>> hat(fft.n_modes());
  fft.forward(q.a.data(), hat.data(), 1);
  const std::vector<double> pack = packing_weights(fft.grid(), fft.n_modes());
  double acc = 0.0;
  for (int ky = 0; ky <= k; ++ky) acc += measure * accumulate_y(hat, 1, fft, ky, pack);
  return std::sqrt(acc);
}

double l1_norm_y(const YField& q, const TransverseGrid& g) {
  double acc = 0.0;
  for (double x : q.a) acc += std::abs(x);
  return acc * g.cell();
}

double w11_norm_y(const YField& q, const TransverseFft& fft) {
  double acc = l1_norm_y(q, fft.grid());
  for (int axis = 0; axis < fft.grid().dim; ++axis) {
    YField d = spectral_derivative(q, fft, axis, 1);
    acc += l1_norm_y(d, fft.grid());
  }
  return acc;
}

double sobolev_norm_z(const ZField& u, const Grid1D& g, int k) {
  if (g.n < 2 * k + 1) throw ConfigError("sobolev_norm_z: too few nodes for requested k");
  double acc = 0.0;
  ZField d = u;
  for (int m = 0; m <= k; ++m) {
    if (m == 1 || m == 2) {
      d = z_derivative(u, g, m);
    } else if (m == 3) {
      d = z_derivative(z_derivative(u, g, 2), g, 1);
    } else if (m == 4) {
      d = z_derivative(z_derivative(u, g, 2), g, 2);
    } else if (m > 4) {
      throw ConfigError("sobolev_norm_z: derivative order beyond 4 not supported");
    }
    for (double x : d.a) acc += x * x;
  }
  return std::sqrt(acc * g.h());
}

double sobolev_norm_z_weighted(const ZField& u, const Grid1D& g, int k, const WeightFunction& w) {
  ZField gu = u;
  for (int c = 0; c < u.nc; ++c)
    for (int i = 0; i < u.nz; ++i) gu.at(c, i) = w.gamma_times(g.z(i), u.at(c, i));
  return sobolev_norm_z(gu, g, k);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Field slice_components(const Field& u, int c0, int c1) {
  if (c0 < 0 || c1 > u.nc || c0 > c1) throw ConfigError("slice_components: bad range");
  Field out(c1 - c0, u.nz, u.ny);
  for (int c = c0; c < c1; ++c)
    for (int iz = 0; iz < u.nz; ++iz) {
      const double* src = u.row(c, iz);
      double* dst = out.row(c - c0, iz);
      for (int iy = 0; iy < u.ny; ++iy) dst[iy] = src[iy];
    }
  return out;
}

double initial_energy(const Field& v0, const YField& q0, const Grid1D& zg,
                      const TransverseFft& fft, int k, const WeightFunction& w) {
  return h_space_norm(v0, zg, fft, k, w) + sobolev_norm_y(q0, fft, k + 1) + w11_norm_y(q0, fft);
}

void write_norm_series_csv(const NormSeries& s, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError("write_norm_series_csv: cannot open " + path.string());
  std::fprintf(f, "t,v_hk,v_hka,v_H,v1_hk,v2_hk,q_hk,q_l1,w_hk\n");
  for (size_t i = 0; i < s.size(); ++i) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t[i], s.v_hk[i],
                 s.v_hka[i], s.v_H[i], s.v1_hk[i], s.v2_hk[i], s.q_hk[i], s.q_l1[i], s.w_hk[i]);
  }
  std::fclose(f);
}

NormSeries read_norm_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_norm_series_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("read_norm_series_csv: empty file");
  if (line.rfind("t,v_hk", 0) != 0) throw IoError("read_norm_series_csv: unexpected header");
  NormSeries s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() != 9) throw IoError("read_norm_series_csv: bad row");
    s.t.push_back(vals[0]);
    s.v_hk.push_back(vals[1]);
    s.v_hka.push_back(vals[2]);
    s.v_H.push_back(vals[3]);
    s.v1_hk.push_back(vals[4]);
    s.v2_hk.push_back(vals[5]);
    s.q_hk.push_back(vals[6]);
    s.q_l1.push_back(vals[7]);
    s.w_hk.push_back(vals[8]);
  }
  return s;
}

}  // namespace fsl
