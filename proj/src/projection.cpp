#include "fsl/projection.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Sparse>

#include "fsl/errors.hpp"
#include "fsl/operators.hpp"
#include "fsl/quadrature.hpp"
#include "fsl/spectrum.hpp"

namespace fsl {

namespace {

// Rotates a complex Ritz vector onto the real axis and returns the real part.
// For a simple real eigenvalue the imaginary content is pure round-off once
// the global phase is removed.
Eigen::VectorXd realize(const Eigen::VectorXcd& v) {
  int imax = 0;
  double best = 0.0;
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      imax = i;
    }
  const std::complex<double> phase = v[imax] / std::abs(v[imax]);
  Eigen::VectorXd out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = (v[i] / phase).real();
  return out;
}

void check_pairing_shapes(const AdjointNullvector& e, int nc, int nz) {
  if (e.nc != nc || e.grid.n != nz)
    throw ConfigError("pi_alpha: field shape does not match the adjoint grid");
}

}  // namespace

AdjointNullvector compute_adjoint(const FrontProfile& front, const ReactionSystem& sys,
                                  const WeightSpec& alpha, const AdjointOptions& opts) {
  front.grid.validate();
  if (front.nc != sys.n)
    throw ConfigError("compute_adjoint: front and system component counts differ");

  WeightFunction w{alpha};
  Eigen::SparseMatrix<double> M =
      assemble_z_operator(conjugated_operator(front, sys, w), front.grid, BoundaryKind::dirichlet);
  Eigen::SparseMatrix<double> Mt = M.transpose();

  auto [vals, vecs] = ritz_nearest(Mt, 0.0, 2);
  if (vals.empty() || std::abs(vals[0]) > opts.null_tol)
    throw SpectrumError("compute_adjoint: no eigenvalue near zero (|lambda| = " +
                        std::to_string(vals.empty() ? -1.0 : std::abs(vals[0])) + ")");
  if (vals.size() > 1 && std::abs(vals[1]) < opts.simplicity_gap)
    throw SpectrumError("compute_adjoint: nullvector is not simple, second eigenvalue at |" +
                        std::to_string(std::abs(vals[1])) + "|");

  const int nz = front.grid.n, nc = front.nc, ni = nz - 2;
  Eigen::VectorXd psi = realize(vecs.col(0));

  AdjointNullvector out;
  out.grid = front.grid;
  out.nc = nc;
  out.alpha = alpha;
  out.lambda = std::abs(vals[0]);
  out.conjugate = ZField(nc, nz);
  out.e_tilde = ZField(nc, nz);
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i < ni; ++i) out.conjugate.at(c, i + 1) = psi[c * ni + i];

  for (int c = 0; c < nc; ++c)
    for (int i = 0; i < nz; ++i)
      out.e_tilde.at(c, i) = w.gamma_times(front.grid.z(i), out.conjugate.at(c, i));

  ZField dphi(nc, nz);
  dphi.a = front.dvalues;
  const double scale = pi_alpha_profile(dphi, out);
  if (std::abs(scale) < 1e-12)
    throw SpectrumError("compute_adjoint: pairing with the front derivative degenerates");
  for (double& x : out.e_tilde.a) x /= scale;
  for (double& x : out.conjugate.a) x /= scale;

  out.normalization_residual = std::abs(pi_alpha_profile(dphi, out) - 1.0);
  return out;
}

YField pi_alpha(const Field& U, const AdjointNullvector& e) {
  check_pairing_shapes(e, U.nc, U.nz);
  const int nz = U.nz, ny = U.ny, nc = U.nc;
  const std::vector<double> wq = trapezoid_weights(nz, e.grid.h());
  YField out(ny);
  for (int c = 0; c < nc; ++c)
    for (int iz = 0; iz < nz; ++iz) {
      const double coeff = wq[iz] * e.e_tilde.at(c, iz);
      if (coeff == 0.0) continue;
      const double* row = U.row(c, iz);
      for (int iy = 0; iy < ny; ++iy) out.a[iy] += coeff * row[iy];
    }
  return out;
}

double pi_alpha_profile(const ZField& u, const AdjointNullvector& e) {
  check_pairing_shapes(e, u.nc, u.nz);
  const std::vector<double> wq = trapezoid_weights(u.nz, e.grid.h());
  double acc = 0.0;
  for (int c = 0; c < u.nc; ++c)
    for (int iz = 0; iz < u.nz; ++iz) acc += wq[iz] * e.e_tilde.at(c, iz) * u.at(c, iz);
  return acc;
}

double pi_shifted_derivative(const AdjointNullvector& e, const FrontInterpolant& itp, double q) {
  if (e.nc != itp.nc) throw ConfigError("pi_shifted_derivative: component mismatch");
  const int nz = e.grid.n;
  const std::vector<double> wq = trapezoid_weights(nz, e.grid.h());
  double acc = 0.0;
  for (int c = 0; c < e.nc; ++c)
    for (int iz = 0; iz < nz; ++iz)
      acc += wq[iz] * e.e_tilde.at(c, iz) * itp.eval_d(c, e.grid.z(iz) - q);
  return acc;
}

double pi_shifted_second(const AdjointNullvector& e, const FrontInterpolant& itp, double q) {
  if (e.nc != itp.nc) throw ConfigError("pi_shifted_second: component mismatch");
  const int nz = e.grid.n;
  const std::vector<double> wq = trapezoid_weights(nz, e.grid.h());
  double acc = 0.0;
  for (int c = 0; c < e.nc; ++c)
    for (int iz = 0; iz < nz; ++iz)
      acc += wq[iz] * e.e_tilde.at(c, iz) * itp.eval_d2(c, e.grid.z(iz) - q);
  return acc;
}

double pi_mean_shifted_derivative(const AdjointNullvector& e, const FrontInterpolant& itp,
                                  double q) {
  if (e.nc != itp.nc) throw ConfigError("pi_mean_shifted_derivative: component mismatch");
  if (std::abs(q) < 1e-12) return pi_shifted_derivative(e, itp, 0.0);
  const int nz = e.grid.n;
  const std::vector<double> wq = trapezoid_weights(nz, e.grid.h());
  double acc = 0.0;
  for (int c = 0; c < e.nc; ++c)
    for (int iz = 0; iz < nz; ++iz) {
      const double z = e.grid.z(iz);
      acc += wq[iz] * e.e_tilde.at(c, iz) * (itp.eval(c, z) - itp.eval(c, z - q)) / q;
    }
  return acc;
}

std::pair<Field, Field> project(const Field& U, const FrontProfile& front,
                                const AdjointNullvector& e) {
  if (U.nc != front.nc || U.nz != front.grid.n)
    throw ConfigError("project: field shape does not match the front grid");
  YField head = pi_alpha(U, e);
  Field p(U.nc, U.nz, U.ny), q(U.nc, U.nz, U.ny);
  for (int c = 0; c < U.nc; ++c)
    for (int iz = 0; iz < U.nz; ++iz) {
      const double dphi = front.dvalue(c, iz);
      const double* u_row = U.row(c, iz);
      double* p_row = p.row(c, iz);
      double* q_row = q.row(c, iz);
      for (int iy = 0; iy < U.ny; ++iy) {
        p_row[iy] = head.a[iy] * dphi;
        q_row[iy] = u_row[iy] - p_row[iy];
      }
    }
  return {std::move(p), std::move(q)};
}

PerturbationState decompose(const Field& u_tilde, const FrontProfile& front,
                            const AdjointNullvector& e, const TransverseFft& fft,
                            const DecomposeOptions& opts) {
  if (u_tilde.nc != front.nc || u_tilde.nz != front.grid.n)
    throw ConfigError("decompose: field shape does not match the front grid");
  if (u_tilde.ny != fft.n_real())
    throw ConfigError("decompose: transverse extent does not match the FFT grid");
  if (e.grid.n != front.grid.n || e.grid.L != front.grid.L)
    throw ConfigError("decompose: adjoint grid does not match the front grid");

  const FrontInterpolant itp = build_interpolant(front);
  const YField head = pi_alpha(u_tilde, e);
  const double q_limit = opts.max_shift_fraction * front.grid.L;

  const int ny = u_tilde.ny, nz = u_tilde.nz, nc = u_tilde.nc;
  PerturbationState st;
  st.q = YField(ny);

  for (int iy = 0; iy < ny; ++iy) {
    // G(q) = head + q * m(q) with m the mean shifted pairing; G(q) = 0 makes
    // the remainder orthogonal to the adjoint direction.
    double q = -head.a[iy];
    bool done = false;
    for (int it = 0; it < opts.max_iter; ++it) {
      if (std::abs(q) > q_limit)
        throw DecompositionError("decompose: shift left the trusted range at a transverse node");
      const double m = pi_mean_shifted_derivative(e, itp, q);
      if (std::abs(m) < opts.min_mass)
        throw DecompositionError("decompose: pairing denominator degenerated (|m| = " +
                                 std::to_string(std::abs(m)) + ")");
      const double g = head.a[iy] + q * m;
      if (std::abs(g) < opts.tol) {
        done = true;
        break;
      }
      // G(q) = pi(u) + pi(phi - phi(. - q)), so dG/dq = pi(phi'(. - q)).
      const double dg = std::abs(q) > 1e-12 ? pi_shifted_derivative(e, itp, q) : m;
      if (std::abs(dg) < 1e-14)
        throw DecompositionError("decompose: Newton derivative vanished");
      q -= g / dg;
    }
    if (!done) throw DecompositionError("decompose: shift solve did not converge");
    st.q.a[iy] = q;
  }

  st.v = Field(nc, nz, ny);
  for (int c = 0; c < nc; ++c)
    for (int iz = 0; iz < nz; ++iz) {
      const double z = front.grid.z(iz);
      const double base = front.value(c, iz);
      const double* u_row = u_tilde.row(c, iz);
      double* v_row = st.v.row(c, iz);
      for (int iy = 0; iy < ny; ++iy)
        v_row[iy] = u_row[iy] - (itp.eval(c, z - st.q.a[iy]) - base);
    }

  st.w = spectral_gradient(st.q, fft);
  return st;
}

Field recompose(const PerturbationState& state, const FrontProfile& front) {
  const int nc = front.nc, nz = front.grid.n;
  if (state.v.nc != nc || state.v.nz != nz)
    throw ConfigError("recompose: state shape does not match the front grid");
  if (state.q.size() != state.v.ny)
    throw ConfigError("recompose: shift field and remainder disagree on the transverse extent");

  double qmax = 0.0;
  for (double q : state.q.a) qmax = std::max(qmax, std::abs(q));
  if (qmax > 0.25 * front.grid.L)
    throw DecompositionError("recompose: shift exceeds a quarter of the domain half-width");

  const FrontInterpolant itp = build_interpolant(front);
  Field out(nc, nz, state.v.ny);
  for (int c = 0; c < nc; ++c)
    for (int iz = 0; iz < nz; ++iz) {
      const double z = front.grid.z(iz);
      const double base = front.value(c, iz);
      const double* v_row = state.v.row(c, iz);
      double* o_row = out.row(c, iz);
      for (int iy = 0; iy < out.ny; ++iy)
        o_row[iy] = itp.eval(c, z - state.q.a[iy]) - base + v_row[iy];
    }
  return out;
}

}  // namespace fsl
