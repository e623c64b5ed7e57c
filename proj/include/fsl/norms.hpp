#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fsl/fft.hpp"
#include "fsl/grid.hpp"
#include "fsl/weight.hpp"

namespace fsl {

// Discrete H^k norm of a field on the (z, y) product grid: the l2 combination
// of the L2 norms of every mixed derivative D^a u with |a| <= k.  Transverse
// derivatives are spectral (accumulated in Fourier space via Parseval, with
// the same Nyquist convention as spectral_derivative); z-derivatives use the
// 4th-order stencils with zero extension beyond the domain.
double sobolev_norm(const Field& u, const Grid1D& zg, const TransverseFft& fft, int k);

// Same, of the weighted field gamma(z) u.
double sobolev_norm_weighted(const Field& u, const Grid1D& zg, const TransverseFft& fft, int k,
                             const WeightFunction& w);

// max(H^k, weighted H^k) -- the norm the perturbation ball lives in.
double h_space_norm(const Field& u, const Grid1D& zg, const TransverseFft& fft, int k,
                    const WeightFunction& w);

// H^k norm of a scalar transverse field (all derivatives spectral).
double sobolev_norm_y(const YField& q, const TransverseFft& fft, int k);

double l1_norm_y(const YField& q, const TransverseGrid& g);
double w11_norm_y(const YField& q, const TransverseFft& fft);

// H^k norm of a 1D profile (z only).
double sobolev_norm_z(const ZField& u, const Grid1D& g, int k);
double sobolev_norm_z_weighted(const ZField& u, const Grid1D& g, int k, const WeightFunction& w);

double max_abs(const std::vector<double>& v);

Field slice_components(const Field& u, int c0, int c1);  // components [c0, c1)

// E_k = ||v0||_H + ||q0||_{H^{k+1}} + ||q0||_{W^{1,1}}
double initial_energy(const Field& v0, const YField& q0, const Grid1D& zg,
                      const TransverseFft& fft, int k, const WeightFunction& w);

// Time series of the norms tracked during a simulation.
struct NormSeries {
  std::vector<double> t;
  std::vector<double> v_hk, v_hka, v_H;
  std::vector<double> v1_hk, v2_hk;
  std::vector<double> q_hk, q_l1, w_hk;
  // diagnostics (not part of the canonical CSV)
  std::vector<double> pi_residual;
  double E_k = 0.0;
  std::optional<double> T_exit;
  std::optional<double> breakdown_time;

  size_t size() const { return t.size(); }
};

void write_norm_series_csv(const NormSeries& s, const std::filesystem::path& path);
NormSeries read_norm_series_csv(const std::filesystem::path& path);

}  // namespace fsl
