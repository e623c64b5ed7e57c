#pragma once

#include <complex>
#include <map>
#include <memory>
#include <vector>

#include "fsl/grid.hpp"

namespace fsl {

// Batched real-to-complex FFT over the periodic transverse grid (1 or 2 dims).
// Each "row" is one full transverse slice; rows are transformed independently.
// Inverse transforms are normalized, so inverse(forward(x)) == x up to
// round-off.  Plans are created with FFTW_ESTIMATE (deterministic) and cached
// per batch size.
class TransverseFft {
 public:
  explicit TransverseFft(const TransverseGrid& g);
  ~TransverseFft();
  TransverseFft(const TransverseFft&) = delete;
  TransverseFft& operator=(const TransverseFft&) = delete;

  const TransverseGrid& grid() const { return g_; }
  int n_real() const { return g_.total(); }
  int n_modes() const { return n_modes_; }

  // |xi|^2 of each packed mode (true value, including the Nyquist mode).
  const std::vector<double>& xi_sq() const { return xi_sq_; }
  // Wave number used for spectral differentiation along `axis`; the Nyquist
  // mode is zeroed so odd derivatives of real data stay real.
  const std::vector<double>& xi_deriv(int axis) const { return xi_deriv_[axis]; }

  void forward(const double* in, std::complex<double>* out, int rows) const;
  void inverse(const std::complex<double>* in, double* out, int rows) const;

  // In-place application of a real multiplier in Fourier space to `rows`
  // contiguous rows of real data.
  void apply_multiplier(double* data, int rows, const std::vector<double>& mult) const;

 private:
  struct Plans;
  Plans& plans_for(int rows) const;

  TransverseGrid g_;
  int n_modes_ = 0;
  std::vector<double> xi_sq_;
  std::vector<double> xi_deriv_[2];
  mutable std::map<int, std::unique_ptr<Plans>> cache_;
};

// Spectral derivative of a scalar transverse field along `axis`.
YField spectral_derivative(const YField& q, const TransverseFft& fft, int axis, int order = 1);

// Transverse gradient (spectral).
YVecField spectral_gradient(const YField& q, const TransverseFft& fft);

}  // namespace fsl
