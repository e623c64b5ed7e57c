#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fsl/analysis.hpp"
#include "fsl/errors.hpp"
#include "fsl/fft.hpp"
#include "fsl/front.hpp"
#include "fsl/model.hpp"
#include "fsl/norms.hpp"
#include "fsl/projection.hpp"

using namespace fsl;

namespace {

constexpr double kPi = 3.14159265358979323846;

const ReactionSystem& bistable_sys() {
  static ReactionSystem s = make_bistable({});
  return s;
}

const FrontProfile& bistable_front() {
  static FrontProfile f = [] {
    AutoSolveSpec spec;
    spec.L = 30.0;
    spec.h = 0.1;
    return solve_front_auto(bistable_sys(), spec);
  }();
  return f;
}

// A mild two-sided weight keeps the weighted norms distinct from the plain
// ones without changing which perturbations are admissible.
const AdjointNullvector& bistable_adjoint() {
  static AdjointNullvector e =
      compute_adjoint(bistable_front(), bistable_sys(), {0.12, 0.12, 4.0});
  return e;
}

TransverseGrid line_grid(int ny) {
  TransverseGrid g;
  g.dim = 1;
  g.n = {ny, 1};
  g.box = {20.0, 1.0};
  return g;
}

Field bump_v(const FrontProfile& f, int ny, double amp, double center, double phase) {
  Field v(f.nc, f.grid.n, ny);
  for (int c = 0; c < f.nc; ++c)
    for (int iz = 0; iz < f.grid.n; ++iz) {
      const double z = f.grid.z(iz);
      const double env = std::exp(-0.25 * (z - center) * (z - center));
      for (int iy = 0; iy < ny; ++iy)
        v.at(c, iz, iy) = amp * env * (1.0 + 0.3 * std::cos(2.0 * kPi * iy / ny + phase));
    }
  return v;
}

YField harmonic_q(int ny, double amp, int mode, double phase) {
  YField q(ny);
  for (int iy = 0; iy < ny; ++iy) q.a[iy] = amp * std::sin(2.0 * kPi * mode * iy / ny + phase);
  return q;
}

NormSeries series_from(const std::vector<double>& t,
                       const std::function<double(double)>& value) {
  NormSeries s;
  s.t = t;
  s.E_k = 1.0;
  for (double ti : t) {
    const double v = value(ti);
    s.v_hk.push_back(v);
    s.v_hka.push_back(v);
    s.v_H.push_back(v);
    s.v1_hk.push_back(v);
    s.v2_hk.push_back(v);
    s.q_hk.push_back(v);
    s.q_l1.push_back(v);
    s.w_hk.push_back(v);
    s.pi_residual.push_back(0.0);
  }
  return s;
}

std::vector<double> uniform_times(double t0, double t1, double dt) {
  std::vector<double> t;
  for (double x = t0; x <= t1 + 1e-12; x += dt) t.push_back(x);
  return t;
}

}  // namespace

TEST_CASE("modulation nonlinearities vanish without a v or w part") {
  const FrontProfile& f = bistable_front();
  const int ny = 16;
  Field v(1, f.grid.n, ny);
  YField q = harmonic_q(ny, 0.02, 1, 0.0);
  YVecField w(1, ny);

  NonlinearEval ev = eval_modulation_nonlinearities(v, q, w, f, bistable_adjoint(), bistable_sys());
  CHECK(max_abs(ev.G.a) == 0.0);
  CHECK(max_abs(ev.F2.a) == 0.0);
  CHECK(max_abs(ev.F1.a) == 0.0);
  CHECK(max_abs(ev.H1.a) == 0.0);
  CHECK(max_abs(ev.H2.a) == 0.0);
  CHECK(ev.identity_residual == 0.0);
  // the pairing coefficients still reflect the shifted profile
  CHECK(all_finite(ev.K1.a));
  CHECK(all_finite(ev.K2.a));
}

TEST_CASE("pairing coefficients at zero shift match direct quadrature") {
  const FrontProfile& f = bistable_front();
  const AdjointNullvector& e = bistable_adjoint();
  const int ny = 8, nz = f.grid.n;
  Field v = bump_v(f, ny, 0.05, 0.0, 0.0);
  YField q(ny);
  YVecField w(1, ny);

  NonlinearEval ev = eval_modulation_nonlinearities(v, q, w, f, e, bistable_sys());

  // trapezoid pairings of the adjoint with phi'' and phi'
  double num = 0.0, den = 0.0;
  const double h = f.grid.h();
  for (int iz = 0; iz < nz; ++iz) {
    const double wt = (iz == 0 || iz == nz - 1) ? 0.5 : 1.0;
    num += wt * e.e_tilde.at(0, iz) * f.d2values[iz];
    den += wt * e.e_tilde.at(0, iz) * f.dvalues[iz];
  }
  num *= h;
  den *= h;

  CHECK(std::abs(den - 1.0) < 1e-9);  // adjoint normalization
  for (int iy = 0; iy < ny; ++iy) {
    CHECK(std::abs(ev.K1.a[iy] - (-num / den)) < 1e-10);
    CHECK(std::abs(ev.K2.a[iy] - (-1.0 / den)) < 1e-10);
  }
  CHECK(ev.identity_residual < 1e-8);
}

TEST_CASE("shift equation identity holds at quadrature accuracy on random states") {
  const FrontProfile& f = bistable_front();
  const int ny = 16;
  TransverseGrid yg = line_grid(ny);
  TransverseFft fft(yg);
  std::mt19937 rng(2203u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int rep = 0; rep < 5; ++rep) {
    Field v = bump_v(f, ny, 0.04 * (0.5 + 0.5 * u(rng)), 2.0 * u(rng), u(rng));
    YField q = harmonic_q(ny, 0.04, 1, u(rng));
    for (int iy = 0; iy < ny; ++iy) q.a[iy] += 0.02 * std::cos(4.0 * kPi * iy / ny);
    YVecField w = spectral_gradient(q, fft);
    NonlinearEval ev = eval_modulation_nonlinearities(v, q, w, f, bistable_adjoint(), bistable_sys());
    CHECK(ev.identity_residual < 1e-8);
    CHECK(all_finite(ev.F1.a));
    CHECK(all_finite(ev.H1.a));
    CHECK(all_finite(ev.H2.a));
  }
}

TEST_CASE("a shift that leaves the front core collapses the pairing") {
  const FrontProfile& f = bistable_front();
  const int ny = 8;
  Field v = bump_v(f, ny, 0.02, 0.0, 0.0);
  YField q(ny);
  for (int iy = 0; iy < ny; ++iy) q.a[iy] = 12.0;
  YVecField w(1, ny);

  CHECK_THROWS_AS(eval_modulation_nonlinearities(v, q, w, f, bistable_adjoint(), bistable_sys()),
                  DecompositionError);
  // a permissive floor accepts the same shift
  NonlinearEval ev =
      eval_modulation_nonlinearities(v, q, w, f, bistable_adjoint(), bistable_sys(), 0.01);
  CHECK(all_finite(ev.K1.a));
}

TEST_CASE("modulation rejects mismatched shapes and non-finite input") {
  const FrontProfile& f = bistable_front();
  const int ny = 8;
  Field v = bump_v(f, ny, 0.02, 0.0, 0.0);
  YField q(ny);
  YVecField w(1, ny);

  Field bad_ny = bump_v(f, ny + 2, 0.02, 0.0, 0.0);
  CHECK_THROWS_AS(
      eval_modulation_nonlinearities(bad_ny, q, w, f, bistable_adjoint(), bistable_sys()),
      ConfigError);

  Field bad_nc(2, f.grid.n, ny);
  CHECK_THROWS_AS(
      eval_modulation_nonlinearities(bad_nc, q, w, f, bistable_adjoint(), bistable_sys()),
      ConfigError);

  YField qnan = q;
  qnan.a[0] = std::nan("");
  CHECK_THROWS_AS(eval_modulation_nonlinearities(v, qnan, w, f, bistable_adjoint(), bistable_sys()),
                  ConfigError);
}

TEST_CASE("gradient-only perturbations drive the shift equation through the pairings") {
  const FrontProfile& f = bistable_front();
  const AdjointNullvector& e = bistable_adjoint();
  const int ny = 16;
  TransverseGrid yg = line_grid(ny);
  TransverseFft fft(yg);

  Field v(1, f.grid.n, ny);
  YField q = harmonic_q(ny, 0.012, 1, 0.4);
  YVecField w = spectral_gradient(q, fft);

  NonlinearEval ev = eval_modulation_nonlinearities(v, q, w, f, e, bistable_sys());
  CHECK(max_abs(ev.G.a) == 0.0);

  // with G = 0 the shift equation reduces to F2 = K1 (w . w), and K1 is the
  // ratio of the shifted pairings
  FrontInterpolant itp = build_interpolant(f);
  for (int iy = 0; iy < ny; ++iy) {
    const double k1 =
        -pi_shifted_second(e, itp, q.a[iy]) / pi_shifted_derivative(e, itp, q.a[iy]);
    const double ww = w.comp[0].a[iy] * w.comp[0].a[iy];
    CHECK(std::abs(ev.K1.a[iy] - k1) < 1e-12);
    CHECK(std::abs(ev.F2.a[iy] - k1 * ww) < 1e-12);
  }
}

TEST_CASE("nonlinear bound ratios stay bounded and scale quadratically") {
  const FrontProfile& f = bistable_front();
  const int ny = 16;
  TransverseGrid yg = line_grid(ny);
  TransverseFft fft(yg);

  std::vector<PerturbationState> samples;
  {
    PerturbationState st;
    st.v = bump_v(f, ny, 0.012, 0.0, 0.0);
    st.q = harmonic_q(ny, 0.010, 1, 0.0);
    st.w = spectral_gradient(st.q, fft);
    samples.push_back(st);
  }
  {
    PerturbationState st;  // gradient only
    st.v = Field(1, f.grid.n, ny);
    st.q = harmonic_q(ny, 0.012, 1, 1.1);
    st.w = spectral_gradient(st.q, fft);
    samples.push_back(st);
  }
  {
    PerturbationState st;  // v only
    st.v = bump_v(f, ny, 0.015, -2.0, 0.7);
    st.q = YField(ny);
    st.w = YVecField(1, ny);
    samples.push_back(st);
  }

  NonlinearBoundReport r =
      verify_nonlinear_bounds(samples, f, bistable_sys(), bistable_adjoint(), yg, 2);

  CHECK(r.quadratic_ok);
  CHECK(r.quad_scaling_worst <= 0.25);
  CHECK(r.homogeneity_ok);
  CHECK(r.f2_homogeneity == doctest::Approx(2.0).epsilon(0.125));
  CHECK(r.g_homogeneity == doctest::Approx(2.0).epsilon(0.125));
  CHECK(r.max_identity_residual < 1e-8);
  CHECK(r.max_sample_size < 0.5);

  for (const RatioStats* rs : {&r.g_weighted, &r.f1_weighted, &r.f1_plain, &r.f2_plain, &r.f2_l1,
                               &r.glue_linear, &r.glue_shift, &r.glue_quadratic}) {
    CHECK(rs->max_ratio >= 0.0);
    CHECK(rs->max_ratio < 50.0);
  }
  // degenerate directions are skipped, so the counts record which samples
  // could inform each ratio: v kills G and the glue terms, q kills the shift
  CHECK(r.f1_plain.count == 3);
  CHECK(r.f2_plain.count == 3);
  CHECK(r.g_weighted.count == 2);
  CHECK(r.glue_linear.count == 2);
  CHECK(r.glue_shift.count == 1);
  CHECK(r.glue_quadratic.count == 2);

  CHECK_THROWS_AS(verify_nonlinear_bounds({}, f, bistable_sys(), bistable_adjoint(), yg, 2),
                  ConfigError);
  CHECK_THROWS_AS(verify_nonlinear_bounds(samples, f, bistable_sys(), bistable_adjoint(), yg, -1),
                  ConfigError);
}

TEST_CASE("samples without v leave every G composite at zero") {
  const FrontProfile& f = bistable_front();
  const int ny = 16;
  TransverseGrid yg = line_grid(ny);
  TransverseFft fft(yg);

  PerturbationState st;
  st.v = Field(1, f.grid.n, ny);
  st.q = harmonic_q(ny, 0.012, 1, 0.0);
  st.w = spectral_gradient(st.q, fft);

  NonlinearBoundReport r =
      verify_nonlinear_bounds({st}, f, bistable_sys(), bistable_adjoint(), yg, 2);
  CHECK(r.g_weighted.max_ratio == 0.0);
  CHECK(r.glue_linear.max_ratio == 0.0);
  CHECK(r.glue_shift.max_ratio == 0.0);
  CHECK(r.glue_quadratic.max_ratio == 0.0);
  CHECK(r.f2_plain.max_ratio > 0.0);
}

TEST_CASE("semigroup report on the calibration front meets every decay target") {
  SemigroupReport r =
      verify_semigroup_bounds(bistable_front(), bistable_sys(), {0.0, 0.0, 4.0}, {}, 2);

  // scalar rest states make the essential abscissa exactly max(f'(0), f'(1))
  CHECK(std::abs(r.essential_abscissa + 0.3) < 1e-12);
  CHECK(r.q_abscissa <= -0.01);
  CHECK(std::abs(r.translational) < 1e-8);
  CHECK(r.spectrum_complete);
  CHECK(r.abscissa_ok);
  CHECK(r.nu_used == doctest::Approx(0.008).epsilon(1e-4));

  CHECK(r.block1_bounded);
  CHECK(r.block2_decays);
  CHECK(r.rho_fitted == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(r.minus_bounded);
  CHECK(r.triangular_defect == 0.0);

  CHECK(std::abs(r.heat_exponent_l1 + 0.25) < 0.03);
  CHECK(std::abs(r.heat_exponent_grad + 0.75) < 0.05);
  CHECK(r.heat_constant > 0.0);
  CHECK(r.heat_constant < 10.0);
  CHECK(r.grad_thalf_sup < 1.0);
  CHECK(r.heat_ok);
  CHECK(r.ok());
}

TEST_CASE("semigroup report for the reactive front under its stabilizing weight") {
  ReactionSystem sys = make_combustion({0.0, 1.0, 0.0});
  AutoSolveSpec spec;
  spec.h = 0.1;
  FrontProfile f = solve_front_auto(sys, spec);

  const double a = f.c / 2.0;  // the weight that centers the dispersion parabola
  SemigroupReport r = verify_semigroup_bounds(f, sys, {a, a, 4.0}, {}, 2);

  CHECK(std::abs(r.essential_abscissa + f.c * f.c / 4.0) < 1e-12);
  CHECK(r.abscissa_ok);
  CHECK(std::abs(r.translational) < 1e-6);

  // the first reaction block is identically zero, the second decays at the
  // linearized burn rate exp(-1), and the coupled block saturates at sqrt(2)
  CHECK(r.block1_bounded);
  CHECK(r.block1_sup == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.block2_decays);
  CHECK(r.rho_fitted == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(r.minus_bounded);
  CHECK(r.minus_sup == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
  CHECK(r.triangular_defect == 0.0);
  CHECK(r.heat_ok);
  CHECK(r.ok());
}

TEST_CASE("heat propagation norms match the closed forms") {
  const double s = std::sqrt(7.0);  // sigma after t = 3 with sigma0 = 1
  const double sp = std::sqrt(kPi);

  const double h1 = gaussian_heat_sobolev_norm(1, 1, 1.0, 3.0);
  const double h1_exact = std::sqrt(1.0 / (2.0 * sp * s) + 1.0 / (4.0 * sp * s * s * s));
  CHECK(h1 == doctest::Approx(h1_exact).epsilon(1e-12));

  const double g1 = gaussian_heat_sobolev_norm(1, 1, 1.0, 3.0, true);
  const double g1_exact =
      std::sqrt(1.0 / (4.0 * sp * s * s * s) + 3.0 / (8.0 * sp * std::pow(s, 5.0)));
  CHECK(g1 == doctest::Approx(g1_exact).epsilon(1e-12));

  const double l2_init = gaussian_heat_sobolev_norm(1, 0, 1.0, 0.0);
  CHECK(l2_init == doctest::Approx(std::sqrt(1.0 / (2.0 * sp))).epsilon(1e-12));

  // planar analogue, radial quadrature against the polar closed forms
  const double a = 7.0;
  CHECK(gaussian_heat_sobolev_norm(2, 0, 1.0, 3.0) ==
        doctest::Approx(1.0 / (2.0 * std::sqrt(kPi * a))).epsilon(1e-12));
  CHECK(gaussian_heat_sobolev_norm(2, 0, 1.0, 3.0, true) ==
        doctest::Approx(1.0 / (2.0 * a * sp)).epsilon(1e-12));

  CHECK_THROWS_AS(gaussian_heat_sobolev_norm(3, 0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(gaussian_heat_sobolev_norm(1, -1, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(gaussian_heat_sobolev_norm(1, 0, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(gaussian_heat_sobolev_norm(1, 0, 1.0, -1.0), ConfigError);
}

TEST_CASE("integral inequality sweep confirms every default case") {
  const std::vector<IntegralCase> cases = default_integral_cases();
  int per_clause[4] = {0, 0, 0, 0};
  for (const IntegralCase& cs : cases) per_clause[cs.clause] += 1;
  CHECK(per_clause[1] == 10);
  CHECK(per_clause[2] == 10);
  CHECK(per_clause[3] == 10);

  const auto reports = verify_integral_inequalities(cases);
  REQUIRE(reports.size() == cases.size());
  for (const IntegralCaseReport& r : reports) {
    CAPTURE(r.params.clause);
    CAPTURE(r.params.a);
    CAPTURE(r.params.b);
    CAPTURE(r.params.c);
    CHECK(r.conditions_met);
    CHECK(r.bounded);
    CHECK(r.c_fitted > 0.0);
    CHECK(r.c_fitted < 100.0);
  }
}

TEST_CASE("violated balance conditions make the ratio diverge") {
  // a > b in the early-time split: the integral only decays like (1+t)^{-b}
  const auto rep = verify_integral_inequalities({{1, 1.5, 1.0, 2.0}});
  REQUIRE(rep.size() == 1);
  CHECK_FALSE(rep[0].conditions_met);
  CHECK_FALSE(rep[0].bounded);
  CHECK(rep[0].growth > 0.3);
}

TEST_CASE("integral sweep rejects malformed cases") {
  CHECK_THROWS_AS(verify_integral_inequalities({}), ConfigError);
  CHECK_THROWS_AS(verify_integral_inequalities({{0, 1.0, 1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(verify_integral_inequalities({{1, -0.5, 1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(verify_integral_inequalities({{1, 1.0, -1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(verify_integral_inequalities({{2, 1.0, 1.0, 0.0}}), ConfigError);
}

TEST_CASE("balance conditions follow the clause logic") {
  CHECK(integral_conditions_met({1, 1.0, 1.0, 2.0}));
  CHECK(integral_conditions_met({1, 0.5, 1.0, 1.0}));       // c = 1 needs a < b
  CHECK_FALSE(integral_conditions_met({1, 1.0, 1.0, 1.0}));  // a = b fails at c = 1
  CHECK_FALSE(integral_conditions_met({1, 1.5, 1.0, 2.0}));  // a > b
  CHECK_FALSE(integral_conditions_met({1, 1.0, 1.0, 0.5}));  // a > b + c - 1

  CHECK(integral_conditions_met({2, 1.0, 2.0, 1.0}));
  CHECK(integral_conditions_met({2, 0.5, 1.0, 1.0}));        // b = 1 needs a < c
  CHECK_FALSE(integral_conditions_met({2, 1.0, 1.0, 1.0}));  // a = c fails at b = 1
  CHECK_FALSE(integral_conditions_met({2, 2.0, 2.0, 1.5}));  // a > c

  CHECK(integral_conditions_met({3, 5.0, 1.0, 2.0}));  // always holds, rate comes from c
}

TEST_CASE("convolution integrals match a direct fine quadrature") {
  // early-time split at t = 4: integrand (5 - s)^{-2} (1 + s)^{-2} on [0, 2]
  const double got = convolution_integral(1, 2.0, 2.0, 4.0);
  int n = 200000;
  double h = 2.0 / n, acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double sx = i * h;
    const double fval = std::pow(5.0 - sx, -2.0) * std::pow(1.0 + sx, -2.0);
    acc += (i == 0 || i == n) ? 0.5 * fval : fval;
  }
  acc *= h;
  CHECK(got == doctest::Approx(acc).epsilon(1e-10));

  // exponential kernel at t = 2: integrand exp(-(2 - s)) (1 + s)^{-2} on [0, 2]
  const double got3 = convolution_integral(3, 1.0, 2.0, 2.0);
  acc = 0.0;
  h = 2.0 / n;
  for (int i = 0; i <= n; ++i) {
    const double sx = i * h;
    const double fval = std::exp(-(2.0 - sx)) * std::pow(1.0 + sx, -2.0);
    acc += (i == 0 || i == n) ? 0.5 * fval : fval;
  }
  acc *= h;
  CHECK(got3 == doctest::Approx(acc).epsilon(1e-10));

  CHECK_THROWS_AS(convolution_integral(1, 2.0, 2.0, 0.0), ConfigError);
  CHECK_THROWS_AS(convolution_integral(4, 2.0, 2.0, 1.0), ConfigError);
}

TEST_CASE("decay exponent fits recover constructed rates") {
  const auto times = uniform_times(0.5, 100.0, 0.5);

  NormSeries pure = series_from(times, [](double t) { return std::pow(1.0 + t, -1.5); });
  ExponentFit fit = fit_decay_exponent(pure, "v_hk", 0.5, 100.0);
  CHECK(fit.exponent == doctest::Approx(-1.5).epsilon(1e-9));
  CHECK(fit.exponent_stderr < 1e-10);
  CHECK(fit.n == static_cast<int>(times.size()));

  NormSeries mixed = series_from(
      times, [](double t) { return 3.0 * std::pow(1.0 + t, -0.25) + 5.0 * std::exp(-t); });
  ExponentFit asym = fit_decay_exponent(mixed, "q_hk", 10.0, 100.0);
  CHECK(std::abs(asym.exponent + 0.25) < 0.02);

  CHECK_THROWS_AS(fit_decay_exponent(pure, "no_such_column", 0.5, 100.0), ConfigError);
  CHECK_THROWS_AS(fit_decay_exponent(pure, "v_hk", 50.0, 10.0), ConfigError);
  CHECK_THROWS_AS(fit_decay_exponent(pure, "v_hk", 200.0, 300.0), ConfigError);

  NormSeries zeroed = series_from(times, [](double) { return 0.0; });
  CHECK_THROWS_AS(fit_decay_exponent(zeroed, "v_hk", 0.5, 100.0), ConfigError);
}

TEST_CASE("decay bound checks are one sided") {
  const auto times = uniform_times(0.5, 100.0, 0.5);
  NormSeries pure = series_from(times, [](double t) { return std::pow(1.0 + t, -1.5); });

  DecayBoundCheck at_rate = check_decay_bound(pure, "v_hka", 1.5, 5.0);
  CHECK(at_rate.pass);
  CHECK(at_rate.max_excess == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(at_rate.calibrated_at == doctest::Approx(5.0));

  // claiming a faster rate than the data must fail
  DecayBoundCheck too_fast = check_decay_bound(pure, "v_hka", 1.6, 5.0);
  CHECK_FALSE(too_fast.pass);
  CHECK(too_fast.max_excess > 1.2);

  // a slower claimed rate is a weaker statement and passes
  DecayBoundCheck slower = check_decay_bound(pure, "v_hka", 1.4, 5.0);
  CHECK(slower.pass);

  // rate zero is a pure boundedness check
  DecayBoundCheck flat = check_decay_bound(pure, "v_hka", 0.0, 5.0);
  CHECK(flat.pass);

  // the calibration constant is reported relative to the initial energy
  NormSeries scaled = pure;
  scaled.E_k = 2.0;
  DecayBoundCheck rel = check_decay_bound(scaled, "v_hka", 1.5, 5.0);
  CHECK(rel.C_over_Ek == doctest::Approx(0.5 * at_rate.C_over_Ek).epsilon(1e-12));

  CHECK_THROWS_AS(check_decay_bound(pure, "v_hka", 1.5, 5.0, 0.5), ConfigError);
  CHECK_THROWS_AS(check_decay_bound(pure, "v_hka", 1.5, 500.0), ConfigError);
}

TEST_CASE("bootstrap suprema match a running maximum and never decrease") {
  NormSeries s;
  s.t = {0.0, 1.0, 3.0};
  s.v_hka = {1.0, 0.5, 0.1};
  s.q_hk = {1.0, 0.5, 0.1};
  s.w_hk = {1.0, 0.5, 0.1};

  BootstrapSuprema b = bootstrap_suprema(s, 2);
  REQUIRE(b.t.size() == 3);
  // d = 2: M_v uses (1+t)^{3/2}, M_q uses (1+t)^{1/4}, M_w uses (1+t)^{3/4}
  CHECK(b.M_v[0] == doctest::Approx(1.0));
  CHECK(b.M_v[1] == doctest::Approx(0.5 * std::pow(2.0, 1.5)));
  CHECK(b.M_v[2] == doctest::Approx(std::max(0.5 * std::pow(2.0, 1.5), 0.1 * std::pow(4.0, 1.5))));
  CHECK(b.M_q[1] == doctest::Approx(std::max(1.0, 0.5 * std::pow(2.0, 0.25))));
  CHECK(b.M_w[2] >= b.M_w[1]);

  // property: nondecreasing on noisy series
  std::mt19937 rng(97u);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NormSeries noisy;
  for (int i = 0; i < 200; ++i) {
    noisy.t.push_back(0.1 * i);
    noisy.v_hka.push_back(u(rng));
    noisy.q_hk.push_back(u(rng));
    noisy.w_hk.push_back(u(rng));
  }
  BootstrapSuprema nb = bootstrap_suprema(noisy, 3);
  for (size_t i = 1; i < nb.t.size(); ++i) {
    CHECK(nb.M_v[i] >= nb.M_v[i - 1]);
    CHECK(nb.M_q[i] >= nb.M_q[i - 1]);
    CHECK(nb.M_w[i] >= nb.M_w[i - 1]);
  }

  CHECK_THROWS_AS(bootstrap_suprema(s, 1), ConfigError);
  NormSeries incomplete;
  incomplete.t = {0.0, 1.0};
  incomplete.v_hka = {1.0};
  CHECK_THROWS_AS(bootstrap_suprema(incomplete, 2), ConfigError);
}

TEST_CASE("analysis configuration rejects inconsistent constants") {
  AnalysisConfig ok;
  CHECK_NOTHROW(ok.validate());

  AnalysisConfig bad = ok;
  bad.gamma = bad.delta;  // needs gamma < delta
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = ok;
  bad.delta = bad.delta0;  // needs delta < delta0
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = ok;
  bad.beta = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = ok;
  bad.fit_window = {30.0, 5.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = ok;
  bad.bound_slack = 0.9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = ok;
  bad.pairing_floor = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("norm series columns resolve by name") {
  NormSeries s;
  s.t = {0.0};
  s.v_hk = {1.0};
  s.q_l1 = {2.0};
  CHECK(&norm_series_column(s, "v_hk") == &s.v_hk);
  CHECK(&norm_series_column(s, "q_l1") == &s.q_l1);
  CHECK_THROWS_AS(norm_series_column(s, "energy"), ConfigError);
}
