#include "fsl/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>

#include "fsl/errors.hpp"

namespace fsl {

struct TransverseFft::Plans {
  int rows = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;

  ~Plans() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real) fftw_free(real);
    if (cplx) fftw_free(cplx);
  }
};

TransverseFft::TransverseFft(const TransverseGrid& g) : g_(g) {
  g_.validate();
  if (g_.dim == 1) {
    n_modes_ = g_.n[0] / 2 + 1;
  } else {
    n_modes_ = g_.n[0] * (g_.n[1] / 2 + 1);
  }
  xi_sq_.assign(n_modes_, 0.0);
  xi_deriv_[0].assign(n_modes_, 0.0);
  xi_deriv_[1].assign(n_modes_, 0.0);

  auto wave = [](int k, int n, double box) {
    int kk = (k <= n / 2) ? k : k - n;
    return 2.0 * M_PI * kk / box;
  };
  if (g_.dim == 1) {
    for (int k = 0; k < n_modes_; ++k) {
      double x = 2.0 * M_PI * k / g_.box[0];
      xi_sq_[k] = x * x;
      xi_deriv_[0][k] = (g_.n[0] % 2 == 0 && k == g_.n[0] / 2) ? 0.0 : x;
    }
  } else {
    int nm1 = g_.n[1] / 2 + 1;
    for (int k0 = 0; k0 < g_.n[0]; ++k0) {
      double x0 = wave(k0, g_.n[0], g_.box[0]);
      bool nyq0 = (g_.n[0] % 2 == 0 && k0 == g_.n[0] / 2);
      for (int k1 = 0; k1 < nm1; ++k1) {
        double x1 = 2.0 * M_PI * k1 / g_.box[1];
        bool nyq1 = (g_.n[1] % 2 == 0 && k1 == g_.n[1] / 2);
        int m = k0 * nm1 + k1;
        xi_sq_[m] = x0 * x0 + x1 * x1;
        xi_deriv_[0][m] = nyq0 ? 0.0 : x0;
        xi_deriv_[1][m] = nyq1 ? 0.0 : x1;
      }
    }
  }
}

TransverseFft::~TransverseFft() = default;

TransverseFft::Plans& TransverseFft::plans_for(int rows) const {
  auto it = cache_.find(rows);
  if (it != cache_.end()) return *it->second;

  auto p = std::make_unique<Plans>();
  p->rows = rows;
  p->real = static_cast<double*>(fftw_malloc(sizeof(double) * static_cast<size_t>(rows) * n_real()));
  p->cplx = static_cast<fftw_complex*>(
      fftw_malloc(sizeof(fftw_complex) * static_cast<size_t>(rows) * n_modes_));
  if (!p->real || !p->cplx) throw Error("TransverseFft: allocation failed");

  int rank = g_.dim;
  int n[2] = {g_.n[0], g_.n[1]};
  p->fwd = fftw_plan_many_dft_r2c(rank, n, rows, p->real, nullptr, 1, n_real(), p->cplx, nullptr, 1,
                                  n_modes_, FFTW_ESTIMATE);
  p->bwd = fftw_plan_many_dft_c2r(rank, n, rows, p->cplx, nullptr, 1, n_modes_, p->real, nullptr, 1,
                                  n_real(), FFTW_ESTIMATE);
  if (!p->fwd || !p->bwd) throw Error("TransverseFft: plan creation failed");

  auto [pos, ok] = cache_.emplace(rows, std::move(p));
  (void)ok;
  return *pos->second;
}

void TransverseFft::forward(const double* in, std::complex<double>* out, int rows) const {
  Plans& p = plans_for(rows);
  std::memcpy(p.real, in, sizeof(double) * static_cast<size_t>(rows) * n_real());
  fftw_execute(p.fwd);
  std::memcpy(static_cast<void*>(out), p.cplx,
              sizeof(fftw_complex) * static_cast<size_t>(rows) * n_modes_);
}

void TransverseFft::inverse(const std::complex<double>* in, double* out, int rows) const {
  Plans& p = plans_for(rows);
  std::memcpy(p.cplx, static_cast<const void*>(in),
              sizeof(fftw_complex) * static_cast<size_t>(rows) * n_modes_);
  fftw_execute(p.bwd);
  const double scale = 1.0 / n_real();
  const size_t total = static_cast<size_t>(rows) * n_real();
  for (size_t i = 0; i < total; ++i) out[i] = p.real[i] * scale;
}

void TransverseFft::apply_multiplier(double* data, int rows, const std::vector<double>& mult) const {
  if (static_cast<int>(mult.size()) != n_modes_)
    throw ConfigError("apply_multiplier: multiplier size mismatch");
  Plans& p = plans_for(rows);
  std::memcpy(p.real, data, sizeof(double) * static_cast<size_t>(rows) * n_real());
  fftw_execute(p.fwd);
  for (int r = 0; r < rows; ++r) {
    fftw_complex* row = p.cplx + static_cast<size_t>(r) * n_modes_;
    for (int m = 0; m < n_modes_; ++m) {
      row[m][0] *= mult[m];
      row[m][1] *= mult[m];
    }
  }
  fftw_execute(p.bwd);
  const double scale = 1.0 / n_real();
  const size_t total = static_cast<size_t>(rows) * n_real();
  for (size_t i = 0; i < total; ++i) data[i] = p.real[i] * scale;
}

YField spectral_derivative(const YField& q, const TransverseFft& fft, int axis, int order) {
  if (q.size() != fft.n_real()) throw ConfigError("spectral_derivative: field size mismatch");
  std::vector<std::complex<double>> hat(fft.n_modes());
  fft.forward(q.a.data(), hat.data(), 1);
  const auto& xi = fft.xi_deriv(axis);
  const std::complex<double> I(0.0, 1.0);
  for (int m = 0; m < fft.n_modes(); ++m) {
    std::complex<double> factor = 1.0;
    for (int p = 0; p < order; ++p) factor *= I * xi[m];
    hat[m] *= factor;
  }
  YField out(fft.n_real());
  fft.inverse(hat.data(), out.a.data(), 1);
  return out;
}

YVecField spectral_gradient(const YField& q, const TransverseFft& fft) {
  YVecField g(fft.grid().dim, fft.n_real());
  for (int axis = 0; axis < fft.grid().dim; ++axis)
    g.comp[axis] = spectral_derivative(q, fft, axis, 1);
  return g;
}

}  // namespace fsl
