#include "fsl/front.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "fsl/errors.hpp"
#include "fsl/operators.hpp"

namespace fsl {

namespace {

// Grid with a node exactly at z = 0 and spacing exactly h.
Grid1D centered_grid(double L, double h) {
  const long half = std::max<long>(3, std::lround(L / h));
  Grid1D g;
  g.n = static_cast<int>(2 * half + 1);
  g.L = static_cast<double>(half) * h;
  return g;
}

// Derivative of a profile whose tails are flat: apply the interior 5-point
// stencils everywhere, sampling the constant extension past the ends.  The
// extension matches the true profile to machine precision once the domain
// covers the tails, which is the only regime the solvers operate in.
std::vector<double> deriv_const_ext(const std::vector<double>& vals, int nc, const Grid1D& g,
                                    int order, const Eigen::VectorXd& left,
                                    const Eigen::VectorXd& right) {
  const int n = g.n;
  const double h = g.h();
  std::vector<double> out(vals.size(), 0.0);
  const StencilRow r = (order == 1) ? d1_stencil(2, 5, h, false) : d2_stencil(2, 5, h, false);
  for (int c = 0; c < nc; ++c) {
    const double* line = vals.data() + static_cast<size_t>(c) * n;
    double* dst = out.data() + static_cast<size_t>(c) * n;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = 0; k < r.len; ++k) {
        const int j = i + r.off[k];
        const double v = (j < 0) ? left[c] : (j >= n ? right[c] : line[j]);
        acc += r.w[k] * v;
      }
      dst[i] = acc;
    }
  }
  return out;
}

struct LineFit {
  double slope = 0.0, r2 = 0.0;
  int npts = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  f.npts = static_cast<int>(x.size());
  if (f.npts < 8) return f;
  double sx = 0, sy = 0;
  for (int i = 0; i < f.npts; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / f.npts, my = sy / f.npts;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < f.npts; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return f;
  f.slope = sxy / sxx;
  f.r2 = (sxy * sxy) / (sxx * syy);
  return f;
}

TailFit fit_tails(const std::vector<double>& vals, int nc, const Grid1D& g,
                  const Eigen::VectorXd& phim, const Eigen::VectorXd& phip) {
  double jump = 0.0;
  for (int c = 0; c < nc; ++c) jump = std::max(jump, std::abs(phip[c] - phim[c]));
  const int n = g.n;
  auto dev = [&](int i, const Eigen::VectorXd& rest) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c) {
      const double d = vals[static_cast<size_t>(c) * n + i] - rest[c];
      s += d * d;
    }
    return std::sqrt(s);
  };
  TailFit t;
  std::vector<double> zs, ls;
  for (int i = 0; i < n / 2; ++i) {
    const double d = dev(i, phim);
    if (d > 1e-10 * jump && d < 1e-2 * jump) {
      zs.push_back(g.z(i));
      ls.push_back(std::log(d));
    }
  }
  LineFit lf = fit_line(zs, ls);
  t.rate_minus = lf.slope;  // positive: deviation grows toward the interface
  t.r2_minus = lf.r2;
  zs.clear();
  ls.clear();
  for (int i = n / 2 + 1; i < n; ++i) {
    const double d = dev(i, phip);
    if (d > 1e-10 * jump && d < 1e-2 * jump) {
      zs.push_back(g.z(i));
      ls.push_back(std::log(d));
    }
  }
  lf = fit_line(zs, ls);
  t.rate_plus = lf.slope;  // negative
  t.r2_plus = lf.r2;
  return t;
}

// Pick the root actually matched by the measured tail slope when the fit is
// trustworthy; otherwise keep the generic (slowest-decay) root.
double refine_with_tail(const std::vector<std::complex<double>>& mu, bool left_side,
                        double generic_omega, double tail_rate, double tail_r2) {
  if (tail_r2 < 0.99) return generic_omega;
  const double target = tail_rate;  // signed exponent of e^{rate z}
  if (left_side && !(target > 0)) return generic_omega;
  if (!left_side && !(target < 0)) return generic_omega;
  double best = 0.0, bestd = std::numeric_limits<double>::infinity();
  for (const auto& m : mu) {
    const double re = m.real();
    if (left_side && re <= 0) continue;
    if (!left_side && re >= 0) continue;
    const double d = std::abs(re - target);
    if (d < bestd) {
      bestd = d;
      best = re;
    }
  }
  if (bestd < 0.25 * std::abs(target)) return -best;
  return generic_omega;
}

// dvalues / d2values / rates / tails for a profile that already satisfies the
// equation on its grid (or is a spline resample of one).
void finalize_profile(FrontProfile& f, const ReactionSystem& sys) {
  const int n = f.grid.n, nc = f.nc;
  Eigen::VectorXd phim(nc), phip(nc);
  for (int c = 0; c < nc; ++c) {
    phim[c] = f.phi_minus[c];
    phip[c] = f.phi_plus[c];
  }
  f.dvalues = deriv_const_ext(f.values, nc, f.grid, 1, phim, phip);
  // Second derivative from the profile equation itself: exact where the
  // collocation residual vanishes, and much smoother than a second stencil.
  f.d2values.assign(f.values.size(), 0.0);
  Eigen::VectorXd u(nc), fu(nc);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < nc; ++c) u[c] = f.value(c, i);
    sys.f(u.data(), fu.data());
    for (int c = 0; c < nc; ++c) {
      const double d = sys.diffusion[c];
      if (d <= 0.0) continue;
      f.d2values[static_cast<size_t>(c) * n + i] = (-f.c * f.dvalue(c, i) - fu[c]) / d;
    }
  }
  f.tails = fit_tails(f.values, nc, f.grid, phim, phip);
  RateInfo ri =
      asymptotic_rates(sys, eval_jacobian(sys, phim), eval_jacobian(sys, phip), f.c);
  f.omega_minus = refine_with_tail(ri.mu_minus, true, ri.omega_minus, f.tails.rate_minus,
                                   f.tails.r2_minus);
  f.omega_plus =
      refine_with_tail(ri.mu_plus, false, ri.omega_plus, f.tails.rate_plus, f.tails.r2_plus);
  f.marginal_minus = ri.marginal_minus;
  f.marginal_plus = ri.marginal_plus;
  f.transform.shift = f.phi_minus;
  f.transform.reflected = (f.c < 0.0);
}

}  // namespace

ZField FrontProfile::zfield() const {
  ZField z(nc, grid.n);
  z.a = values;
  return z;
}

ZField FrontProfile::dzfield() const {
  ZField z(nc, grid.n);
  z.a = dvalues;
  return z;
}

double FrontProfile::jump_norm() const {
  double j = 0.0;
  for (int c = 0; c < nc; ++c) j = std::max(j, std::abs(phi_plus[c] - phi_minus[c]));
  return j;
}

FrontInterpolant build_interpolant(const FrontProfile& f) {
  const int n = f.grid.n;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = f.grid.z(i);
  FrontInterpolant itp;
  itp.nc = f.nc;
  for (int c = 0; c < f.nc; ++c) {
    std::vector<double> y(f.values.begin() + static_cast<size_t>(c) * n,
                          f.values.begin() + static_cast<size_t>(c + 1) * n);
    itp.phi.emplace_back(x, y, 0.0, 0.0);
    y.assign(f.dvalues.begin() + static_cast<size_t>(c) * n,
             f.dvalues.begin() + static_cast<size_t>(c + 1) * n);
    itp.dphi.emplace_back(x, y, 0.0, 0.0);
    y.assign(f.d2values.begin() + static_cast<size_t>(c) * n,
             f.d2values.begin() + static_cast<size_t>(c + 1) * n);
    itp.d2phi.emplace_back(x, y, 0.0, 0.0);
  }
  return itp;
}

FrontProfile solve_front(const ReactionSystem& sys, const Grid1D& g, const ZField& guess,
                         double c_guess, const FrontSolveOptions& opts) {
  g.validate();
  if (guess.nc != sys.n || guess.nz != g.n)
    throw ConfigError("solve_front: guess shape does not match system/grid");
  if (g.n < 7) throw ConfigError("solve_front: need at least 7 nodes");
  if (!std::isfinite(c_guess)) throw ConfigError("solve_front: non-finite speed guess");

  const int n = g.n, nc = sys.n, ni = n - 2;
  const int N = nc * ni + 1;
  const double h = g.h();

  Eigen::VectorXd phim(nc), phip(nc);
  for (int c = 0; c < nc; ++c) {
    phim[c] = guess.at(c, 0);
    phip[c] = guess.at(c, n - 1);
  }
  double jump = (phip - phim).cwiseAbs().maxCoeff();
  if (jump < 1e-8) throw ConfigError("solve_front: guess endpoints coincide");

  int pc = opts.phase_component;
  if (pc < 0) {
    (phip - phim).cwiseAbs().maxCoeff(&pc);
  }
  if (pc >= nc) throw ConfigError("solve_front: phase component out of range");
  const int imid = (n - 1) / 2;  // node nearest z = 0
  const double phase_target = 0.5 * (phim[pc] + phip[pc]);

  std::vector<StencilRow> s1(n), s2(n);
  for (int i = 1; i < n - 1; ++i) {
    s1[i] = d1_stencil(i, n, h, false);
    s2[i] = d2_stencil(i, n, h, false);
  }

  std::vector<double> phi = guess.a;
  double c = c_guess;

  auto residual = [&](const std::vector<double>& pv, double cv, Eigen::VectorXd& R) {
    R.resize(N);
    Eigen::VectorXd u(nc), fu(nc);
    for (int i = 1; i < n - 1; ++i) {
      for (int cc = 0; cc < nc; ++cc) u[cc] = pv[static_cast<size_t>(cc) * n + i];
      sys.f(u.data(), fu.data());
      for (int cc = 0; cc < nc; ++cc) {
        const double* line = pv.data() + static_cast<size_t>(cc) * n;
        double acc = fu[cc];
        const StencilRow& r2 = s2[i];
        for (int k = 0; k < r2.len; ++k) acc += sys.diffusion[cc] * r2.w[k] * line[i + r2.off[k]];
        const StencilRow& r1 = s1[i];
        for (int k = 0; k < r1.len; ++k) acc += cv * r1.w[k] * line[i + r1.off[k]];
        R[cc * ni + (i - 1)] = acc;
      }
    }
    R[N - 1] = pv[static_cast<size_t>(pc) * n + imid] - phase_target;
  };

  Eigen::VectorXd R(N), Rt(N);
  residual(phi, c, R);
  double nr = R.lpNorm<Eigen::Infinity>();

  Eigen::SparseMatrix<double> J(N, N);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd Jf;
  Eigen::VectorXd u(nc);

  bool converged = nr < opts.tol;
  for (int iter = 0; iter < opts.max_iter && !converged; ++iter) {
    trip.clear();
    for (int i = 1; i < n - 1; ++i) {
      for (int cc = 0; cc < nc; ++cc) u[cc] = phi[static_cast<size_t>(cc) * n + i];
      sys.df(u.data(), Jf);
      const StencilRow& r2 = s2[i];
      const StencilRow& r1 = s1[i];
      for (int cc = 0; cc < nc; ++cc) {
        const int row = cc * ni + (i - 1);
        for (int k = 0; k < r2.len; ++k) {
          const int j = i + r2.off[k];
          if (j >= 1 && j <= n - 2)
            trip.emplace_back(row, cc * ni + (j - 1), sys.diffusion[cc] * r2.w[k]);
        }
        for (int k = 0; k < r1.len; ++k) {
          const int j = i + r1.off[k];
          if (j >= 1 && j <= n - 2) trip.emplace_back(row, cc * ni + (j - 1), c * r1.w[k]);
        }
        for (int c2 = 0; c2 < nc; ++c2) {
          if (Jf(cc, c2) != 0.0) trip.emplace_back(row, c2 * ni + (i - 1), Jf(cc, c2));
        }
        // d/dc of the advection term: the full first derivative at node i.
        const double* line = phi.data() + static_cast<size_t>(cc) * n;
        double d1full = 0.0;
        for (int k = 0; k < r1.len; ++k) d1full += r1.w[k] * line[i + r1.off[k]];
        if (d1full != 0.0) trip.emplace_back(row, N - 1, d1full);
      }
    }
    trip.emplace_back(N - 1, pc * ni + (imid - 1), 1.0);
    J.setFromTriplets(trip.begin(), trip.end());
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw SolverError("solve_front: Jacobian factorization failed");
    Eigen::VectorXd delta = lu.solve(-R);
    if (!delta.allFinite()) throw SolverError("solve_front: Newton step is non-finite");

    double lam = 1.0;
    std::vector<double> pt(phi.size());
    while (true) {
      pt = phi;
      for (int cc = 0; cc < nc; ++cc)
        for (int i = 1; i < n - 1; ++i)
          pt[static_cast<size_t>(cc) * n + i] += lam * delta[cc * ni + (i - 1)];
      const double ct = c + lam * delta[N - 1];
      double nrt = std::numeric_limits<double>::infinity();
      try {
        residual(pt, ct, Rt);
        nrt = Rt.lpNorm<Eigen::Infinity>();
      } catch (const Error&) {
        // trial state overflowed f; treat as a rejected step
      }
      if (nrt < (1.0 - 0.25 * lam) * nr || nrt < opts.tol) {
        phi.swap(pt);
        c = ct;
        R = Rt;
        nr = nrt;
        break;
      }
      lam *= 0.5;
      if (lam < 1.0 / 4096.0)
        throw SolverError("solve_front: line search stalled, residual " + std::to_string(nr));
    }
    converged = nr < opts.tol;
  }
  if (!converged)
    throw SolverError("solve_front: no convergence after " + std::to_string(opts.max_iter) +
                      " iterations, residual " + std::to_string(nr));

  FrontProfile f;
  f.grid = g;
  f.nc = nc;
  f.values = std::move(phi);
  f.c = c;
  f.phi_minus.assign(phim.data(), phim.data() + nc);
  f.phi_plus.assign(phip.data(), phip.data() + nc);
  finalize_profile(f, sys);
  return f;
}

RateInfo asymptotic_rates(const ReactionSystem& sys, const Eigen::MatrixXd& A_minus,
                          const Eigen::MatrixXd& A_plus, double c, double marginal_tol) {
  const int n = sys.n;
  if (A_minus.rows() != n || A_plus.rows() != n)
    throw ConfigError("asymptotic_rates: Jacobian size mismatch");

  auto side_roots = [&](const Eigen::MatrixXd& A) {
    // mu^2 D x + c mu x + A x = 0 as a generalized pencil, so zero diffusion
    // coefficients (first-order components) are handled uniformly: their
    // missing roots show up as infinite eigenvalues and are skipped.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    M.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    M.bottomLeftCorner(n, n) = -A;
    M.bottomRightCorner(n, n) = -c * Eigen::MatrixXd::Identity(n, n);
    B.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) B(n + i, n + i) = sys.diffusion[i];
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(M, B, false);
    if (ges.info() != Eigen::Success)
      throw SolverError("asymptotic_rates: eigensolver failed");
    std::vector<std::complex<double>> mu;
    for (int i = 0; i < 2 * n; ++i) {
      const double beta = ges.betas()[i];
      if (std::abs(beta) < 1e-12) continue;
      mu.push_back(ges.alphas()[i] / beta);
    }
    std::sort(mu.begin(), mu.end(), [](auto a, auto b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return mu;
  };

  RateInfo ri;
  ri.mu_minus = side_roots(A_minus);
  ri.mu_plus = side_roots(A_plus);

  double slowest = std::numeric_limits<double>::infinity();
  for (const auto& m : ri.mu_minus) {
    if (std::abs(m.real()) <= marginal_tol) ri.marginal_minus = true;
    if (m.real() > marginal_tol) slowest = std::min(slowest, m.real());
  }
  ri.omega_minus = std::isfinite(slowest) ? -slowest : 0.0;

  slowest = -std::numeric_limits<double>::infinity();
  for (const auto& m : ri.mu_plus) {
    if (std::abs(m.real()) <= marginal_tol) ri.marginal_plus = true;
    if (m.real() < -marginal_tol) slowest = std::max(slowest, m.real());
  }
  ri.omega_plus = std::isfinite(slowest) ? -slowest : 0.0;
  return ri;
}

ZField tanh_seed(const Eigen::VectorXd& rest_minus, const Eigen::VectorXd& rest_plus,
                 double width, const Grid1D& g) {
  const int nc = static_cast<int>(rest_minus.size());
  ZField z(nc, g.n);
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < g.n; ++i) {
      const double s = 0.5 * (1.0 + std::tanh(g.z(i) / width));
      z.at(c, i) = rest_minus[c] + (rest_plus[c] - rest_minus[c]) * s;
    }
    z.at(c, 0) = rest_minus[c];
    z.at(c, g.n - 1) = rest_plus[c];
  }
  return z;
}

double bistable_exact_speed(double a) { return std::sqrt(2.0) * (a - 0.5); }

double bistable_exact_profile(double z) { return 1.0 / (1.0 + std::exp(-z / std::sqrt(2.0))); }

double recommended_half_width(double omega_minus, double omega_plus) {
  const double r = std::min(std::abs(omega_minus), omega_plus);
  if (r <= 1e-12)
    throw SolverError("recommended_half_width: profile has no strict exponential tail");
  return std::clamp(40.0 / r, 20.0, 400.0);
}

namespace {

FrontProfile solve_combustion_at(const ReactionSystem& sys, const Grid1D& g, const ZField& seed,
                                 const FrontSolveOptions& opts) {
  // The speed is unknown a priori; sweep a few starting guesses before
  // giving up, the damped iteration is cheap.
  const double guesses[] = {1.0, 0.5, 1.5, 0.25, 2.0};
  std::string last;
  for (double c0 : guesses) {
    try {
      return solve_front(sys, g, seed, c0, opts);
    } catch (const SolverError& e) {
      last = e.what();
    }
  }
  throw SolverError("combustion front: all speed guesses failed; last error: " + last);
}

FrontProfile solve_combustion(const ReactionSystem& sys, const Grid1D& g,
                              const FrontSolveOptions& opts) {
  const double kappa = sys.params.at("kappa");
  const double eps = sys.params.at("epsilon");
  const double clamp = sys.params.at("g_clamp");
  try {
    return solve_combustion_at(sys, g, tanh_seed(sys.rest_minus, sys.rest_plus, 2.0, g), opts);
  } catch (const SolverError&) {
    // Continuation in kappa from 1, rescaling the temperature component so
    // each intermediate seed has the right burned state 1/kappa.
    std::vector<double> path;
    double k = 1.0;
    const double ratio = kappa > 1.0 ? 1.25 : 0.8;
    while ((kappa > 1.0 && k < kappa) || (kappa < 1.0 && k > kappa)) {
      path.push_back(k);
      k *= ratio;
    }
    path.push_back(kappa);
    FrontProfile cur;
    for (size_t s = 0; s < path.size(); ++s) {
      CombustionParams p{eps, path[s], clamp};
      ReactionSystem sk = make_combustion(p, sys.theory_mode);
      if (s == 0) {
        cur = solve_combustion_at(sk, g, tanh_seed(sk.rest_minus, sk.rest_plus, 2.0, g), opts);
        continue;
      }
      ZField seed = cur.zfield();
      const double scale = path[s - 1] / path[s];  // u_b ratio
      for (int i = 0; i < g.n; ++i) seed.at(0, i) *= scale;
      seed.at(0, 0) = sk.rest_minus[0];
      seed.at(1, 0) = sk.rest_minus[1];
      seed.at(0, g.n - 1) = sk.rest_plus[0];
      seed.at(1, g.n - 1) = sk.rest_plus[1];
      cur = solve_front(sk, g, seed, cur.c, opts);
    }
    return cur;
  }
}

}  // namespace

FrontProfile solve_front_auto(const ReactionSystem& sys, const AutoSolveSpec& spec) {
  if (spec.h <= 0.0) throw ConfigError("solve_front_auto: h must be > 0");
  if (sys.name == "bistable") {
    const double a = sys.params.at("a");
    const double c0 = bistable_exact_speed(a);
    double L = spec.L;
    if (L <= 0.0) {
      RateInfo ri = asymptotic_rates(sys, eval_jacobian(sys, sys.rest_minus),
                                     eval_jacobian(sys, sys.rest_plus), c0);
      L = recommended_half_width(ri.omega_minus, ri.omega_plus);
    }
    const Grid1D g = centered_grid(L, spec.h);
    ZField seed(1, g.n);
    for (int i = 0; i < g.n; ++i) seed.at(0, i) = bistable_exact_profile(g.z(i));
    seed.at(0, 0) = sys.rest_minus[0];
    seed.at(0, g.n - 1) = sys.rest_plus[0];
    return solve_front(sys, g, seed, c0, spec.newton);
  }
  if (sys.name == "combustion") {
    if (spec.L > 0.0) return solve_combustion(sys, centered_grid(spec.L, spec.h), spec.newton);
    // Two passes: a moderate domain fixes the speed and tail rates, which
    // then size the production domain.
    const Grid1D g0 = centered_grid(80.0, std::max(spec.h, 0.1));
    FrontProfile coarse = solve_combustion(sys, g0, spec.newton);
    const double L = recommended_half_width(coarse.omega_minus, coarse.omega_plus);
    const Grid1D g = centered_grid(L, spec.h);
    FrontProfile seeded = resample(coarse, sys, g);
    ZField seed = seeded.zfield();
    for (int c = 0; c < sys.n; ++c) {
      seed.at(c, 0) = sys.rest_minus[c];
      seed.at(c, g.n - 1) = sys.rest_plus[c];
    }
    return solve_front(sys, g, seed, coarse.c, spec.newton);
  }
  throw ConfigError("solve_front_auto: no seed strategy for model '" + sys.name + "'");
}

FrontProfile resample(const FrontProfile& f, const ReactionSystem& sys, const Grid1D& g) {
  g.validate();
  FrontInterpolant itp = build_interpolant(f);
  FrontProfile out;
  out.grid = g;
  out.nc = f.nc;
  out.c = f.c;
  out.phi_minus = f.phi_minus;
  out.phi_plus = f.phi_plus;
  out.values.resize(static_cast<size_t>(f.nc) * g.n);
  for (int c = 0; c < f.nc; ++c)
    for (int i = 0; i < g.n; ++i)
      out.values[static_cast<size_t>(c) * g.n + i] = itp.eval(c, g.z(i));
  finalize_profile(out, sys);
  return out;
}

void save_front(const FrontProfile& f, const std::filesystem::path& path) {
  nlohmann::json j;
  j["schema"] = "front/1";
  j["grid"] = {{"L", f.grid.L}, {"h", f.grid.h()}, {"n_nodes", f.grid.n}};
  nlohmann::json vals = nlohmann::json::array();
  for (int c = 0; c < f.nc; ++c) {
    vals.push_back(std::vector<double>(f.values.begin() + static_cast<size_t>(c) * f.grid.n,
                                       f.values.begin() + static_cast<size_t>(c + 1) * f.grid.n));
  }
  j["values"] = std::move(vals);
  j["c"] = f.c;
  j["phi_minus"] = f.phi_minus;
  j["phi_plus"] = f.phi_plus;
  j["omega"] = {{"minus", f.omega_minus}, {"plus", f.omega_plus}};
  j["marginal"] = {{"minus", f.marginal_minus}, {"plus", f.marginal_plus}};
  j["transform"] = {{"shift", f.transform.shift}, {"reflected", f.transform.reflected}};
  std::ofstream out(path);
  if (!out) throw IoError("save_front: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

FrontProfile load_front(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_front: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("load_front: parse failure in " + path.string() + ": " + e.what());
  }
  if (j.value("schema", std::string{}) != "front/1")
    throw IoError("load_front: unsupported schema in " + path.string());

  FrontProfile f;
  f.grid.L = j.at("grid").at("L").get<double>();
  f.grid.n = j.at("grid").at("n_nodes").get<int>();
  f.grid.validate();
  const auto& vals = j.at("values");
  f.nc = static_cast<int>(vals.size());
  f.values.reserve(static_cast<size_t>(f.nc) * f.grid.n);
  for (const auto& comp : vals) {
    if (static_cast<int>(comp.size()) != f.grid.n)
      throw IoError("load_front: values/grid size mismatch");
    for (const auto& v : comp) f.values.push_back(v.get<double>());
  }
  f.c = j.at("c").get<double>();
  f.phi_minus = j.at("phi_minus").get<std::vector<double>>();
  f.phi_plus = j.at("phi_plus").get<std::vector<double>>();
  f.omega_minus = j.at("omega").at("minus").get<double>();
  f.omega_plus = j.at("omega").at("plus").get<double>();
  f.marginal_minus = j.at("marginal").at("minus").get<bool>();
  f.marginal_plus = j.at("marginal").at("plus").get<bool>();
  f.transform.shift = j.at("transform").at("shift").get<std::vector<double>>();
  f.transform.reflected = j.at("transform").at("reflected").get<bool>();

  // Kinematic fields are not serialized; rebuild them from the samples alone
  // (stencil-based second derivative, no reaction term available here).
  Eigen::VectorXd phim(f.nc), phip(f.nc);
  for (int c = 0; c < f.nc; ++c) {
    phim[c] = f.phi_minus[c];
    phip[c] = f.phi_plus[c];
  }
  f.dvalues = deriv_const_ext(f.values, f.nc, f.grid, 1, phim, phip);
  f.d2values = deriv_const_ext(f.values, f.nc, f.grid, 2, phim, phip);
  f.tails = fit_tails(f.values, f.nc, f.grid, phim, phip);
  return f;
}

}  // namespace fsl
