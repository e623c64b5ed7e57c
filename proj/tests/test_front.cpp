#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fsl/errors.hpp"
#include "fsl/front.hpp"
#include "fsl/model.hpp"

using namespace fsl;

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Collocation residual of the spline interpolant of a solved profile,
// sampled between the nodes.  Decays like h^2 under refinement (the limiting
// term is the spline's second-derivative error), so halving h quarters it.
double interpolant_residual(const FrontProfile& f, const ReactionSystem& sys) {
  FrontInterpolant itp = build_interpolant(f);
  double worst = 0.0;
  Eigen::VectorXd u(sys.n), fu(sys.n);
  const double L = f.grid.L - 1.0;
  for (double z = -L; z <= L; z += 0.0131) {
    for (int c = 0; c < sys.n; ++c) u[c] = itp.eval(c, z);
    sys.f(u.data(), fu.data());
    for (int c = 0; c < sys.n; ++c) {
      // Differentiate the value spline itself: its second derivative carries
      // the dominant O(h^2) interpolation error this ratio is probing.
      const double r =
          sys.diffusion[c] * itp.phi[c].deriv2(z) + f.c * itp.phi[c].deriv(z) + fu[c];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("bistable front reproduces the closed-form solution") {
  ReactionSystem sys = make_bistable({0.7});
  AutoSolveSpec spec;
  spec.h = 0.05;
  FrontProfile f = solve_front_auto(sys, spec);

  // c = sqrt(2) (a - 1/2), phi = 1/(1 + e^{-z/sqrt 2}), phi' = phi(1-phi)/sqrt2
  CHECK(std::abs(f.c - 0.28284271247461906) < 1e-6);
  double max_err = 0.0, max_derr = 0.0;
  for (int i = 0; i < f.grid.n; ++i) {
    const double z = f.grid.z(i);
    const double ex = bistable_exact_profile(z);
    max_err = std::max(max_err, std::abs(f.value(0, i) - ex));
    max_derr = std::max(max_derr, std::abs(f.dvalue(0, i) - ex * (1.0 - ex) / kSqrt2));
  }
  CHECK(max_err < 1e-6);
  CHECK(max_derr < 1e-6);

  // Phase pinning: midpoint value at z = 0.
  CHECK(std::abs(f.value(0, (f.grid.n - 1) / 2) - 0.5) < 1e-9);

  // Spatial roots at the rest state behind the front: the quadratic
  // mu^2 + c mu - a = 0 has roots 0.7071067811865476 and -0.9899494936611665.
  REQUIRE(f.nc == 1);
  RateInfo ri = asymptotic_rates(sys, eval_jacobian(sys, sys.rest_minus),
                                 eval_jacobian(sys, sys.rest_plus), f.c);
  REQUIRE(ri.mu_minus.size() == 2);
  CHECK(std::abs(ri.mu_minus[0].real() + 0.9899494936611665) < 1e-6);
  CHECK(std::abs(ri.mu_minus[1].real() - 0.7071067811865476) < 1e-6);
  CHECK(std::abs(f.omega_minus + 0.7071067811865476) < 1e-6);
  CHECK(std::abs(f.omega_plus - 0.7071067811865476) < 1e-6);
  CHECK_FALSE(f.marginal_minus);
  CHECK_FALSE(f.marginal_plus);

  // Both tails are clean exponentials and the measured slopes match.
  CHECK(f.tails.r2_minus > 0.999);
  CHECK(f.tails.r2_plus > 0.999);
  CHECK(std::abs(f.tails.rate_minus - 0.7071) < 0.01);
  CHECK(std::abs(f.tails.rate_plus + 0.7071) < 0.01);

  CHECK_FALSE(f.transform.reflected);
  CHECK(f.transform.shift[0] == f.phi_minus[0]);
}

TEST_CASE("interpolant residual drops fourfold under h-halving") {
  ReactionSystem sys = make_bistable({0.7});
  AutoSolveSpec coarse, fine;
  coarse.L = fine.L = 30.0;
  coarse.h = 0.2;
  fine.h = 0.1;
  const double rc = interpolant_residual(solve_front_auto(sys, coarse), sys);
  const double rf = interpolant_residual(solve_front_auto(sys, fine), sys);
  CHECK(rc / rf > 3.2);
  CHECK(rc / rf < 4.8);
}

TEST_CASE("combustion front: conserved combination and tail structure") {
  ReactionSystem sys = make_combustion({0.0, 1.0, 0.0});
  AutoSolveSpec spec;
  spec.h = 0.1;
  FrontProfile f = solve_front_auto(sys, spec);

  CHECK(f.c > 0.1);
  CHECK(f.c < 3.0);

  // With equal diffusivities the discrete equations preserve
  // kappa*phi1 + phi2 = 1 exactly (the residual combination is linear with
  // constant boundary data), so this checks the solve, not the model.
  double worst = 0.0;
  for (int i = 0; i < f.grid.n; ++i)
    worst = std::max(worst, std::abs(f.value(0, i) + f.value(1, i) - 1.0));
  CHECK(worst < 1e-8);

  // Decay behind the front: mu^2 + c mu - g(1) = 0, g(1) = e^{-1}.
  const double mu = 0.5 * (-f.c + std::sqrt(f.c * f.c + 4.0 * std::exp(-1.0)));
  CHECK(std::abs(f.omega_minus + mu) < 1e-9);
  // Ahead of the front the Jacobian vanishes: rates {0, 0, -c, -c}, so the
  // approach rate is c and the zero roots flag both sides as marginal.
  CHECK(std::abs(f.omega_plus - f.c) < 1e-9);
  CHECK(f.marginal_plus);
  CHECK(f.marginal_minus);

  // Burned temperature overshoot cannot happen for equal diffusivities:
  // profile stays within the rest interval.
  for (int i = 0; i < f.grid.n; ++i) {
    CHECK(f.value(0, i) > -1e-9);
    CHECK(f.value(0, i) < 1.0 + 1e-9);
  }
}

TEST_CASE("combustion continuation reaches other exothermicities") {
  ReactionSystem s1 = make_combustion({0.0, 1.0, 0.0});
  ReactionSystem s2 = make_combustion({0.0, 2.0, 0.0});
  AutoSolveSpec spec;
  spec.h = 0.1;
  spec.L = 120.0;
  FrontProfile f1 = solve_front_auto(s1, spec);
  FrontProfile f2 = solve_front_auto(s2, spec);

  CHECK(f2.phi_minus[0] == doctest::Approx(0.5).epsilon(1e-14));
  double worst = 0.0;
  for (int i = 0; i < f2.grid.n; ++i)
    worst = std::max(worst, std::abs(2.0 * f2.value(0, i) + f2.value(1, i) - 1.0));
  CHECK(worst < 1e-8);
  // Burned state is cooler, reaction slower, front slower.
  CHECK(f2.c < f1.c);
  CHECK(f2.c > 0.0);
}

TEST_CASE("zero-diffusion components are handled by the rate pencil") {
  ReactionSystem sys;
  sys.n = 2;
  sys.diffusion = {1.0, 0.0};
  Eigen::MatrixXd A(2, 2);
  A << -1.0, 0.0, 0.0, -2.0;
  // First block: mu^2 + mu - 1 = 0; second (first order): mu = 2.
  RateInfo ri = asymptotic_rates(sys, A, A, 1.0);
  REQUIRE(ri.mu_minus.size() == 3);
  CHECK(std::abs(ri.mu_minus[0].real() + 1.618033988749895) < 1e-12);
  CHECK(std::abs(ri.mu_minus[1].real() - 0.618033988749895) < 1e-12);
  CHECK(std::abs(ri.mu_minus[2].real() - 2.0) < 1e-12);
  CHECK(ri.omega_minus == doctest::Approx(-0.618033988749895).epsilon(1e-12));
}

TEST_CASE("profile JSON round trip and schema guard") {
  ReactionSystem sys = make_bistable({0.7});
  AutoSolveSpec spec;
  spec.h = 0.1;
  spec.L = 25.0;
  FrontProfile f = solve_front_auto(sys, spec);

  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "fsl_front_roundtrip.json";
  save_front(f, path);
  FrontProfile r = load_front(path);

  CHECK(r.grid.n == f.grid.n);
  CHECK(r.grid.L == f.grid.L);
  CHECK(r.c == f.c);
  CHECK(r.omega_minus == f.omega_minus);
  CHECK(r.omega_plus == f.omega_plus);
  CHECK(r.marginal_minus == f.marginal_minus);
  CHECK(r.values == f.values);
  CHECK(r.transform.shift == f.transform.shift);

  const auto bad = dir / "fsl_front_bad_schema.json";
  {
    std::ofstream out(bad);
    out << "{\"schema\": \"front/9\"}\n";
  }
  CHECK_THROWS_AS(load_front(bad), IoError);
  std::filesystem::remove(path);
  std::filesystem::remove(bad);
}

TEST_CASE("resampling onto a finer grid keeps the profile") {
  ReactionSystem sys = make_bistable({0.7});
  AutoSolveSpec spec;
  spec.h = 0.1;
  spec.L = 30.0;
  FrontProfile f = solve_front_auto(sys, spec);
  Grid1D fine;
  fine.L = 30.0;
  fine.n = 2 * (f.grid.n - 1) + 1;
  FrontProfile r = resample(f, sys, fine);
  double max_err = 0.0;
  for (int i = 0; i < fine.n; ++i)
    max_err = std::max(max_err, std::abs(r.value(0, i) - bistable_exact_profile(fine.z(i))));
  CHECK(max_err < 1e-5);
  CHECK(r.c == f.c);
}

TEST_CASE("solver input validation") {
  ReactionSystem sys = make_bistable({0.7});
  Grid1D g;
  g.L = 20.0;
  g.n = 401;
  ZField flat(1, g.n);
  for (int i = 0; i < g.n; ++i) flat.at(0, i) = 0.3;
  CHECK_THROWS_AS(solve_front(sys, g, flat, 0.3), ConfigError);

  ZField wrong(2, g.n);
  CHECK_THROWS_AS(solve_front(sys, g, wrong, 0.3), ConfigError);

  AutoSolveSpec spec;
  spec.h = -1.0;
  CHECK_THROWS_AS(solve_front_auto(sys, spec), ConfigError);
}
