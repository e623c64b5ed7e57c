#include "fsl/analysis.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fsl/errors.hpp"
#include "fsl/quadrature.hpp"
#include "fsl/spectrum.hpp"

namespace fsl {

namespace {

// Least-squares line through (x, y); returns {slope, intercept, stderr of the
// slope (0 with fewer than three points)}.
struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ConfigError("fit_line: degenerate abscissa");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
  }
  return f;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

void AnalysisConfig::validate() const {
  if (!(gamma > 0.0 && gamma < delta && delta < delta0))
    throw ConfigError("analysis config: need 0 < gamma < delta < delta0");
  if (beta <= 0.0) throw ConfigError("analysis config: beta must be positive");
  if (!(fit_window[0] >= 0.0 && fit_window[0] < fit_window[1]))
    throw ConfigError("analysis config: fit window must be increasing and nonnegative");
  if (tol_abscissa <= 0.0 || tol_exponent <= 0.0 || tol_exponent_grad <= 0.0)
    throw ConfigError("analysis config: tolerances must be positive");
  if (bound_slack < 1.0) throw ConfigError("analysis config: bound slack below one");
  if (pairing_floor <= 0.0 || pairing_floor >= 1.0)
    throw ConfigError("analysis config: pairing floor must lie in (0, 1)");
}

NonlinearEval eval_modulation_nonlinearities(const Field& v, const YField& q, const YVecField& w,
                                             const FrontProfile& front, const AdjointNullvector& e,
                                             const ReactionSystem& sys, double pairing_floor) {
  const int n = sys.n, nz = front.grid.n, ny = q.size();
  if (front.nc != n || v.nc != n) throw ConfigError("modulation: component counts disagree");
  if (v.nz != nz || e.grid.n != nz || e.nc != n)
    throw ConfigError("modulation: z grids disagree");
  if (v.ny != ny) throw ConfigError("modulation: transverse sizes disagree");
  if (w.dim < 1 || w.dim > 2 || static_cast<int>(w.comp.size()) != w.dim)
    throw ConfigError("modulation: w must have 1 or 2 axes");
  for (int ax = 0; ax < w.dim; ++ax)
    if (w.comp[ax].size() != ny) throw ConfigError("modulation: w size disagrees with q");
  if (!all_finite(v.a) || !all_finite(q.a)) throw ConfigError("modulation: non-finite input");
  if (pairing_floor <= 0.0) throw ConfigError("modulation: pairing floor must be positive");

  const FrontInterpolant itp = build_interpolant(front);

  // Jacobians along the unshifted profile are shared across the y slices.
  std::vector<Eigen::MatrixXd> jac_phi(nz);
  {
    Eigen::VectorXd pt(n);
    for (int iz = 0; iz < nz; ++iz) {
      for (int c = 0; c < n; ++c) pt[c] = front.value(c, iz);
      jac_phi[iz] = eval_jacobian(sys, pt);
    }
  }
  Eigen::VectorXd rest(n);
  for (int c = 0; c < n; ++c) rest[c] = front.phi_minus[c];
  const Eigen::MatrixXd jac_rest = eval_jacobian(sys, rest);

  NonlinearEval out;
  out.G = Field(n, nz, ny);
  out.F1 = Field(n, nz, ny);
  out.F2 = YField(ny);
  out.K1 = YField(ny);
  out.K2 = YField(ny);

  std::vector<double> ww(ny, 0.0);
  for (int ax = 0; ax < w.dim; ++ax)
    for (int iy = 0; iy < ny; ++iy) ww[iy] += w.comp[ax].a[iy] * w.comp[ax].a[iy];

  for (int iy = 0; iy < ny; ++iy) {
    const double mass = pi_shifted_derivative(e, itp, q.a[iy]);
    if (std::abs(mass) < pairing_floor)
      throw DecompositionError("modulation: pairing with the shifted profile collapsed, |pi| = " +
                               std::to_string(std::abs(mass)));
    out.K1.a[iy] = -pi_shifted_second(e, itp, q.a[iy]) / mass;
    out.K2.a[iy] = -1.0 / mass;
  }

  Eigen::VectorXd phiq(n), vpt(n), gpt(n);
  for (int iz = 0; iz < nz; ++iz) {
    const double z = front.grid.z(iz);
    for (int iy = 0; iy < ny; ++iy) {
      const double zq = z - q.a[iy];
      for (int c = 0; c < n; ++c) {
        phiq[c] = itp.eval(c, zq);
        vpt[c] = v.at(c, iz, iy);
      }
      gpt = (eval_jacobian(sys, phiq) - jac_phi[iz]) * vpt + eval_N(sys, phiq, vpt) * vpt;
      for (int c = 0; c < n; ++c) out.G.at(c, iz, iy) = gpt[c];
    }
  }

  const YField pi_g = pi_alpha(out.G, e);
  for (int iy = 0; iy < ny; ++iy)
    out.F2.a[iy] = out.K1.a[iy] * ww[iy] + out.K2.a[iy] * pi_g.a[iy];

  for (int iz = 0; iz < nz; ++iz) {
    const double z = front.grid.z(iz);
    for (int iy = 0; iy < ny; ++iy) {
      const double zq = z - q.a[iy];
      for (int c = 0; c < n; ++c)
        out.F1.at(c, iz, iy) =
            out.G.at(c, iz, iy) + out.F2.a[iy] * itp.eval_d(c, zq) + ww[iy] * itp.eval_d2(c, zq);
    }
  }

  Field h(n, nz, ny);
  for (int iz = 0; iz < nz; ++iz) {
    const Eigen::MatrixXd glue = jac_phi[iz] - jac_rest;
    for (int iy = 0; iy < ny; ++iy) {
      for (int c = 0; c < n; ++c) vpt[c] = v.at(c, iz, iy);
      gpt = glue * vpt;
      for (int c = 0; c < n; ++c) h.at(c, iz, iy) = out.F1.at(c, iz, iy) + gpt[c];
    }
  }
  out.H1 = slice_components(h, 0, sys.n1);
  out.H2 = slice_components(h, sys.n1, n);

  out.identity_residual = max_abs(pi_alpha(out.F1, e).a);
  return out;
}

namespace {

void scale_state(PerturbationState& st, double s) {
  for (double& x : st.v.a) x *= s;
  for (double& x : st.q.a) x *= s;
  for (auto& comp : st.w.comp)
    for (double& x : comp.a) x *= s;
}

double wvec_norm(const YVecField& w, const TransverseFft& fft, int k) {
  double sum = 0.0;
  for (int ax = 0; ax < w.dim; ++ax) {
    double n = sobolev_norm_y(w.comp[ax], fft, k);
    sum += n * n;
  }
  return std::sqrt(sum);
}

// The three pieces the triangular estimates bound separately:
// (df(phi) - df(0)) v, (df(phi_q) - df(phi)) v, and N(phi_q, v) v.
struct GlueFields {
  Field linear, shift, quadratic;
};

GlueFields eval_glue_fields(const Field& v, const YField& q, const FrontProfile& front,
                            const ReactionSystem& sys) {
  const int n = sys.n, nz = front.grid.n, ny = v.ny;
  const FrontInterpolant itp = build_interpolant(front);
  Eigen::VectorXd rest(n);
  for (int c = 0; c < n; ++c) rest[c] = front.phi_minus[c];
  const Eigen::MatrixXd jac_rest = eval_jacobian(sys, rest);

  GlueFields out{Field(n, nz, ny), Field(n, nz, ny), Field(n, nz, ny)};
  Eigen::VectorXd pt(n), phiq(n), vpt(n), r(n);
  for (int iz = 0; iz < nz; ++iz) {
    for (int c = 0; c < n; ++c) pt[c] = front.value(c, iz);
    const Eigen::MatrixXd jac_here = eval_jacobian(sys, pt);
    const double z = front.grid.z(iz);
    for (int iy = 0; iy < ny; ++iy) {
      const double zq = z - q.a[iy];
      for (int c = 0; c < n; ++c) {
        phiq[c] = itp.eval(c, zq);
        vpt[c] = v.at(c, iz, iy);
      }
      r = (jac_here - jac_rest) * vpt;
      for (int c = 0; c < n; ++c) out.linear.at(c, iz, iy) = r[c];
      r = (eval_jacobian(sys, phiq) - jac_here) * vpt;
      for (int c = 0; c < n; ++c) out.shift.at(c, iz, iy) = r[c];
      r = eval_N(sys, phiq, vpt) * vpt;
      for (int c = 0; c < n; ++c) out.quadratic.at(c, iz, iy) = r[c];
    }
  }
  return out;
}

void add_ratio(RatioStats& r, double num, double den) {
  if (den <= 1e-14) return;  // degenerate direction: the ratio is defined as 0
  const double ratio = num / den;
  r.max_ratio = std::max(r.max_ratio, ratio);
  r.mean_ratio += ratio;
  r.count += 1;
}

void finalize_ratio(RatioStats& r) {
  if (r.count > 0) r.mean_ratio /= r.count;
}

}  // namespace

NonlinearBoundReport verify_nonlinear_bounds(const std::vector<PerturbationState>& samples,
                                             const FrontProfile& front, const ReactionSystem& sys,
                                             const AdjointNullvector& e,
                                             const TransverseGrid& ygrid, int k,
                                             const AnalysisConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw ConfigError("verify_nonlinear_bounds: no samples");
  if (k < 0) throw ConfigError("verify_nonlinear_bounds: k must be nonnegative");
  ygrid.validate();

  const TransverseFft fft(ygrid);
  const WeightFunction wf(e.alpha);
  const Grid1D& zg = front.grid;

  NonlinearBoundReport rep;
  rep.quadratic_ok = true;
  rep.homogeneity_ok = true;
  double worst_quad = 0.0, f2_hom_sum = 0.0, g_hom_sum = 0.0;
  int f2_hom_count = 0, g_hom_count = 0;

  for (const PerturbationState& sample : samples) {
    const std::array<double, 3> scales{1.0, 0.5, 0.25};
    std::array<double, 3> g_n{}, ga_n{}, f1_n{}, f2_n{};
    for (int is = 0; is < 3; ++is) {
      PerturbationState st = sample;
      scale_state(st, scales[is]);
      const NonlinearEval ev =
          eval_modulation_nonlinearities(st.v, st.q, st.w, front, e, sys, cfg.pairing_floor);
      rep.max_identity_residual = std::max(rep.max_identity_residual, ev.identity_residual);
      g_n[is] = sobolev_norm(ev.G, zg, fft, k);
      ga_n[is] = sobolev_norm_weighted(ev.G, zg, fft, k, wf);
      f1_n[is] = sobolev_norm(ev.F1, zg, fft, k);
      f2_n[is] = sobolev_norm_y(ev.F2, fft, k);

      if (is != 0) continue;

      const double vp = sobolev_norm(st.v, zg, fft, k);
      const double va = sobolev_norm_weighted(st.v, zg, fft, k, wf);
      const double v2 = sobolev_norm(slice_components(st.v, sys.n1, sys.n), zg, fft, k);
      const double qn = sobolev_norm_y(st.q, fft, k);
      const double wn = wvec_norm(st.w, fft, k);
      rep.max_sample_size =
          std::max(rep.max_sample_size, h_space_norm(st.v, zg, fft, k, wf) + qn + wn);

      const double den_mixed = vp * va + qn * va + wn * wn;
      add_ratio(rep.g_weighted, ga_n[0], (vp + qn) * va);
      add_ratio(rep.f1_weighted, sobolev_norm_weighted(ev.F1, zg, fft, k, wf), den_mixed);
      add_ratio(rep.f1_plain, f1_n[0], den_mixed + vp * v2);
      add_ratio(rep.f2_plain, f2_n[0], den_mixed);
      add_ratio(rep.f2_l1, l1_norm_y(ev.F2, ygrid), den_mixed);

      const GlueFields glue = eval_glue_fields(st.v, st.q, front, sys);
      add_ratio(rep.glue_linear, sobolev_norm(glue.linear, zg, fft, k), va);
      add_ratio(rep.glue_shift, sobolev_norm(glue.shift, zg, fft, k), qn * va);
      add_ratio(rep.glue_quadratic, sobolev_norm(glue.quadratic, zg, fft, k), vp * (va + v2));
    }

    // all three quantities are quadratic near zero: halving the state should
    // quarter them, and the three-point slope in log scale should sit near 2
    for (const auto& nn : {g_n, f1_n, f2_n}) {
      if (nn[0] > 1e-10) worst_quad = std::max(worst_quad, std::abs(4.0 * nn[1] / nn[0] - 1.0));
    }
    const auto fit_degree = [&](const std::array<double, 3>& nn, double& sum, int& count) {
      if (nn[2] <= 1e-13) return;  // vanishing direction (e.g. v = 0 kills G)
      std::vector<double> lx, ly;
      for (int is = 0; is < 3; ++is) {
        lx.push_back(std::log(scales[is]));
        ly.push_back(std::log(nn[is]));
      }
      const double deg = fit_line(lx, ly).slope;
      sum += deg;
      count += 1;
      if (std::abs(deg - 2.0) > 0.25) rep.homogeneity_ok = false;
    };
    fit_degree(f2_n, f2_hom_sum, f2_hom_count);
    fit_degree(ga_n, g_hom_sum, g_hom_count);
  }

  rep.quad_scaling_worst = worst_quad;
  rep.quadratic_ok = worst_quad <= 0.25;
  rep.f2_homogeneity = f2_hom_count > 0 ? f2_hom_sum / f2_hom_count : 0.0;
  rep.g_homogeneity = g_hom_count > 0 ? g_hom_sum / g_hom_count : 0.0;
  if (f2_hom_count == 0) rep.homogeneity_ok = false;

  finalize_ratio(rep.g_weighted);
  finalize_ratio(rep.f1_weighted);
  finalize_ratio(rep.f1_plain);
  finalize_ratio(rep.f2_plain);
  finalize_ratio(rep.f2_l1);
  finalize_ratio(rep.glue_linear);
  finalize_ratio(rep.glue_shift);
  finalize_ratio(rep.glue_quadratic);
  return rep;
}

double gaussian_heat_sobolev_norm(int m, int k, double sigma0, double t, bool gradient) {
  if ((m != 1 && m != 2) || k < 0 || sigma0 <= 0.0 || t < 0.0)
    throw ConfigError("gaussian_heat_sobolev_norm: bad arguments");
  // unit-mass Gaussian: hat u(xi) = exp(-a |xi|^2 / 2) with a = sigma0^2 + 2t.
  // Substituting x = sqrt(a) r freezes the peak width, so fixed unit panels
  // with a Gauss rule resolve it for every t.
  const double a = sigma0 * sigma0 + 2.0 * t;
  const double sa = std::sqrt(a);
  const QuadRule rule = gauss_legendre_01(16);
  double acc = 0.0;
  for (int panel = 0; panel < 40; ++panel) {
    for (size_t i = 0; i < rule.x.size(); ++i) {
      const double x = panel + rule.x[i];
      const double r2 = x * x / a;
      double w = std::pow(1.0 + r2, k) * std::exp(-x * x);
      if (gradient) w *= r2;
      if (m == 2) w *= x / sa;
      acc += rule.w[i] * w;
    }
  }
  acc /= sa;
  return std::sqrt(m == 1 ? acc / M_PI : acc / (2.0 * M_PI));
}

SemigroupReport verify_semigroup_bounds(const FrontProfile& front, const ReactionSystem& sys,
                                        const WeightSpec& alpha, const AnalysisConfig& cfg,
                                        int d) {
  cfg.validate();
  if (d != 2 && d != 3) throw ConfigError("verify_semigroup_bounds: d must be 2 or 3");

  SemigroupReport rep;
  rep.nu_used = cfg.nu > 0.0 ? cfg.nu : 0.1 * front.c * front.c;
  rep.essential_abscissa = essential_abscissa(front, sys, alpha);

  const Spectrum1D sp = discrete_spectrum_1d(front, sys, alpha, front.grid);
  if (sp.lambda.empty()) throw SpectrumError("verify_semigroup_bounds: empty discrete spectrum");
  rep.spectrum_complete = sp.complete;
  size_t i0 = 0;
  for (size_t i = 1; i < sp.lambda.size(); ++i)
    if (std::abs(sp.lambda[i]) < std::abs(sp.lambda[i0])) i0 = i;
  rep.translational = sp.lambda[i0];
  double discrete = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < sp.lambda.size(); ++i)
    if (i != i0) discrete = std::max(discrete, sp.lambda[i].real());
  rep.q_abscissa = std::max(rep.essential_abscissa, discrete);
  rep.abscissa_ok = rep.q_abscissa <= -rep.nu_used + cfg.tol_abscissa;

  // reaction blocks at the rest state behind the front
  const int n1 = sys.n1, n2 = sys.n2;
  Eigen::VectorXd rest(sys.n);
  for (int c = 0; c < sys.n; ++c) rest[c] = front.phi_minus[c];
  const Eigen::MatrixXd jac = eval_jacobian(sys, rest);
  rep.triangular_defect =
      (n1 > 0 && n2 > 0) ? jac.bottomLeftCorner(n2, n1).cwiseAbs().maxCoeff() : 0.0;

  const std::vector<double> ts{0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  // a semigroup sample "stays bounded" when the late norms do not exceed the
  // early ones; polynomial growth from a defective eigenvalue trips this
  auto sample_sup = [&](const Eigen::MatrixXd& block, double& sup, bool& bounded) {
    double early = 0.0, late = 0.0;
    for (double t : ts) {
      const double nrm = spectral_norm((t * block).exp());
      if (t <= 8.0)
        early = std::max(early, nrm);
      else
        late = std::max(late, nrm);
    }
    sup = std::max(early, late);
    bounded = late <= 1.05 * early;
  };

  if (n1 > 0) {
    sample_sup(jac.topLeftCorner(n1, n1), rep.block1_sup, rep.block1_bounded);
  } else {
    rep.block1_bounded = true;  // no linear block to grow
  }

  if (n2 > 0) {
    const Eigen::MatrixXd a2 = jac.bottomRightCorner(n2, n2);
    double m8 = 0.0, m32 = 0.0;
    for (double t : ts) {
      const double nrm = spectral_norm((t * a2).exp());
      rep.block2_sup = std::max(rep.block2_sup, nrm);
      if (t == 8.0) m8 = nrm;
      if (t == 32.0) m32 = nrm;
    }
    rep.rho_fitted = m32 > 0.0 ? (std::log(m8) - std::log(m32)) / 24.0
                               : std::numeric_limits<double>::infinity();
    rep.block2_decays = rep.rho_fitted > 0.0 && m32 < m8 &&
                        (cfg.rho <= 0.0 || rep.rho_fitted >= cfg.rho * (1.0 - 1e-9));
  } else {
    rep.block2_decays = true;
  }

  sample_sup(jac, rep.minus_sup, rep.minus_bounded);

  // transverse propagator on exact Gaussian data: algebraic decay from unit
  // mass, with the high-frequency remainder absorbed by e^{-beta t}.  The fit
  // starts past the transient, where (1 + 2t) and (1 + t) scale alike.
  const int m = d - 1;
  const int k_heat = 1;
  const double u0_hk = gaussian_heat_sobolev_norm(m, k_heat, 1.0, 0.0);

  std::vector<double> lx, ly, lg;
  const int n_fit = 25;
  for (int i = 0; i < n_fit; ++i) {
    const double t = 5.0 * std::pow(100.0, static_cast<double>(i) / (n_fit - 1));  // [5, 500]
    lx.push_back(std::log1p(t));
    ly.push_back(std::log(gaussian_heat_sobolev_norm(m, k_heat, 1.0, t)));
    lg.push_back(std::log(gaussian_heat_sobolev_norm(m, k_heat, 1.0, t, true)));
  }
  rep.heat_exponent_l1 = fit_line(lx, ly).slope;
  rep.heat_exponent_grad = fit_line(lx, lg).slope;

  const double target_l1 = -0.25 * m;
  const double target_grad = -0.25 * (m + 2);
  for (int i = 0; i < n_fit; ++i) {
    const double t = 5.0 * std::pow(100.0, static_cast<double>(i) / (n_fit - 1));
    const double bound = std::pow(1.0 + t, target_l1) + std::exp(-cfg.beta * t) * u0_hk;
    rep.heat_constant = std::max(rep.heat_constant, std::exp(ly[i]) / bound);
  }
  for (int i = 0; i < 41; ++i) {
    const double t = std::pow(10.0, -3.0 + 5.0 * i / 40.0);  // [1e-3, 100]
    const double g = gaussian_heat_sobolev_norm(m, k_heat, 1.0, t, true);
    rep.grad_thalf_sup = std::max(rep.grad_thalf_sup, g * std::sqrt(t) / u0_hk);
  }

  rep.heat_ok = std::abs(rep.heat_exponent_l1 - target_l1) <= cfg.tol_exponent &&
                std::abs(rep.heat_exponent_grad - target_grad) <= cfg.tol_exponent_grad;
  return rep;
}

bool integral_conditions_met(const IntegralCase& cs) {
  auto is_one = [](double x) { return std::abs(x - 1.0) <= 1e-12; };
  switch (cs.clause) {
    case 1:
      return (cs.a <= cs.b && cs.a <= cs.b + cs.c - 1.0 && !is_one(cs.c)) ||
             (cs.a < cs.b && is_one(cs.c));
    case 2:
      return (cs.a <= cs.c && cs.a <= cs.b + cs.c - 1.0 && !is_one(cs.b)) ||
             (cs.a < cs.c && is_one(cs.b));
    case 3:
      return true;
    default:
      return false;
  }
}

double convolution_integral(int clause, double b, double c, double t) {
  if (t <= 0.0) throw ConfigError("convolution_integral: t must be positive");
  switch (clause) {
    case 1:
      return integrate_adaptive(
          [&](double s) { return std::pow(1.0 + t - s, -b) * std::pow(1.0 + s, -c); }, 0.0,
          0.5 * t);
    case 2:
      return integrate_adaptive(
          [&](double s) { return std::pow(1.0 + t - s, -b) * std::pow(1.0 + s, -c); }, 0.5 * t,
          t);
    case 3:
      return integrate_adaptive(
          [&](double s) { return std::exp(-b * (t - s)) * std::pow(1.0 + s, -c); }, 0.0, t);
    default:
      throw ConfigError("convolution_integral: clause must be 1, 2, or 3");
  }
}

std::vector<IntegralCaseReport> verify_integral_inequalities(
    const std::vector<IntegralCase>& cases) {
  if (cases.empty()) throw ConfigError("verify_integral_inequalities: no cases");

  std::vector<double> ts;
  const int nt = 33;
  for (int i = 0; i < nt; ++i) ts.push_back(std::pow(10.0, 4.0 * i / (nt - 1)));  // [1, 10^4]

  std::vector<IntegralCaseReport> out;
  out.reserve(cases.size());
  for (const IntegralCase& cs : cases) {
    if (cs.clause < 1 || cs.clause > 3)
      throw ConfigError("verify_integral_inequalities: clause must be 1, 2, or 3");
    if (cs.b <= 0.0 || cs.c <= 0.0 || (cs.clause != 3 && cs.a <= 0.0))
      throw ConfigError("verify_integral_inequalities: exponents must be positive");

    IntegralCaseReport rep;
    rep.params = cs;
    rep.conditions_met = integral_conditions_met(cs);
    const double expo = cs.clause == 3 ? cs.c : cs.a;
    std::vector<double> ratios;
    for (double t : ts) {
      ratios.push_back(convolution_integral(cs.clause, cs.b, cs.c, t) *
                       std::pow(1.0 + t, expo));
      rep.c_fitted = std::max(rep.c_fitted, ratios.back());
    }
    // A bounded ratio flattens out for large t; divergence keeps a positive
    // log-log slope.  Fit the slope over the last decade [10^3, 10^4], where
    // slowly saturating boundary cases have already leveled off.
    std::vector<double> lx, ly;
    for (int i = 0; i < nt; ++i) {
      if (ts[i] >= 1.0e3 - 1.0e-9 && ratios[i] > 0.0) {
        lx.push_back(std::log(1.0 + ts[i]));
        ly.push_back(std::log(ratios[i]));
      }
    }
    rep.growth = lx.size() >= 2 ? fit_line(lx, ly).slope : std::numeric_limits<double>::infinity();
    rep.bounded = rep.growth < 0.1;
    out.push_back(rep);
  }
  return out;
}

std::vector<IntegralCase> default_integral_cases() {
  return {
      // clause 1: a <= b, a <= b+c-1 (strict a < b when c = 1)
      {1, 1.0, 1.0, 2.0},   {1, 0.5, 1.0, 1.0},   {1, 1.5, 2.0, 1.5},   {1, 0.75, 0.75, 1.25},
      {1, 1.0, 2.0, 0.5},   {1, 2.0, 3.0, 2.0},   {1, 0.25, 0.5, 0.75}, {1, 1.25, 1.25, 2.0},
      {1, 0.5, 0.75, 1.0},  {1, 3.0, 3.0, 3.0},
      // clause 2: mirrored roles of b and c
      {2, 1.0, 2.0, 1.0},   {2, 0.5, 1.0, 1.0},   {2, 1.5, 0.5, 2.0},   {2, 1.25, 1.5, 1.25},
      {2, 0.5, 2.0, 0.5},   {2, 2.0, 2.0, 3.0},   {2, 0.75, 0.5, 1.5},  {2, 1.0, 3.0, 1.5},
      {2, 0.5, 1.0, 0.75},  {2, 2.5, 4.0, 2.5},
      // clause 3: exponential kernel, rate always c (the a entry mirrors it)
      {3, 2.0, 1.0, 2.0},   {3, 0.5, 0.25, 0.5},  {3, 1.0, 2.0, 1.0},   {3, 1.5, 0.1, 1.5},
      {3, 0.75, 0.5, 0.75}, {3, 3.0, 1.5, 3.0},   {3, 1.0, 0.75, 1.0},  {3, 2.5, 3.0, 2.5},
      {3, 0.25, 0.6, 0.25}, {3, 1.25, 2.5, 1.25},
  };
}

const std::vector<double>& norm_series_column(const NormSeries& s, const std::string& column) {
  if (column == "v_hk") return s.v_hk;
  if (column == "v_hka") return s.v_hka;
  if (column == "v_H") return s.v_H;
  if (column == "v1_hk") return s.v1_hk;
  if (column == "v2_hk") return s.v2_hk;
  if (column == "q_hk") return s.q_hk;
  if (column == "q_l1") return s.q_l1;
  if (column == "w_hk") return s.w_hk;
  if (column == "pi_residual") return s.pi_residual;
  throw ConfigError("norm series: unknown column '" + column + "'");
}

ExponentFit fit_decay_exponent(const NormSeries& s, const std::string& column, double t_lo,
                               double t_hi) {
  const std::vector<double>& val = norm_series_column(s, column);
  if (val.size() != s.t.size())
    throw ConfigError("fit_decay_exponent: column was not recorded for every time");
  if (!(t_lo < t_hi)) throw ConfigError("fit_decay_exponent: window must be increasing");

  std::vector<double> x, y;
  for (size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] < t_lo - 1e-12 || s.t[i] > t_hi + 1e-12) continue;
    if (!(val[i] > 0.0))
      throw ConfigError("fit_decay_exponent: nonpositive value inside the fit window");
    x.push_back(std::log1p(s.t[i]));
    y.push_back(std::log(val[i]));
  }
  if (x.size() < 2) throw ConfigError("fit_decay_exponent: need at least two samples in window");

  const LineFit f = fit_line(x, y);
  ExponentFit out;
  out.exponent = f.slope;
  out.exponent_stderr = f.slope_stderr;
  out.intercept = f.intercept;
  out.n = static_cast<int>(x.size());
  return out;
}

DecayBoundCheck check_decay_bound(const NormSeries& s, const std::string& column, double rate,
                                  double t_lo, double slack) {
  const std::vector<double>& val = norm_series_column(s, column);
  if (val.size() != s.t.size())
    throw ConfigError("check_decay_bound: column was not recorded for every time");
  if (slack < 1.0) throw ConfigError("check_decay_bound: slack below one");

  size_t i0 = s.t.size();
  for (size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] >= t_lo - 1e-12) {
      i0 = i;
      break;
    }
  }
  if (i0 >= s.t.size()) throw ConfigError("check_decay_bound: window start beyond the series");
  if (!(val[i0] > 0.0)) throw ConfigError("check_decay_bound: calibration value must be positive");

  DecayBoundCheck out;
  out.rate = rate;
  out.calibrated_at = s.t[i0];
  out.C_over_Ek =
      val[i0] * std::pow(1.0 + s.t[i0], rate) / (s.E_k > 0.0 ? s.E_k : 1.0);
  for (size_t i = i0; i < s.t.size(); ++i) {
    const double bound = val[i0] * std::pow((1.0 + s.t[i]) / (1.0 + s.t[i0]), -rate);
    out.max_excess = std::max(out.max_excess, val[i] / bound);
  }
  out.pass = out.max_excess <= slack;
  return out;
}

BootstrapSuprema bootstrap_suprema(const NormSeries& s, int d) {
  if (d < 2) throw ConfigError("bootstrap_suprema: d must be at least 2");
  if (s.v_hka.size() != s.t.size() || s.q_hk.size() != s.t.size() ||
      s.w_hk.size() != s.t.size())
    throw ConfigError("bootstrap_suprema: incomplete series");

  const double pv = 0.5 * (d + 1), pq = 0.25 * (d - 1), pw = 0.25 * (d + 1);
  BootstrapSuprema out;
  out.t = s.t;
  double mv = 0.0, mq = 0.0, mw = 0.0;
  for (size_t i = 0; i < s.t.size(); ++i) {
    const double g = 1.0 + s.t[i];
    mv = std::max(mv, std::pow(g, pv) * s.v_hka[i]);
    mq = std::max(mq, std::pow(g, pq) * s.q_hk[i]);
    mw = std::max(mw, std::pow(g, pw) * s.w_hk[i]);
    out.M_v.push_back(mv);
    out.M_q.push_back(mq);
    out.M_w.push_back(mw);
  }
  return out;
}

}  // namespace fsl
