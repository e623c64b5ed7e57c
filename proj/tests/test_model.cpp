#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fsl/errors.hpp"
#include "fsl/model.hpp"

using namespace fsl;

namespace {

// Central-difference Jacobian, the independent check for the analytic df.
Eigen::MatrixXd fd_jacobian(const ReactionSystem& sys, const Eigen::VectorXd& u, double h = 1e-6) {
  Eigen::MatrixXd J(sys.n, sys.n);
  for (int j = 0; j < sys.n; ++j) {
    Eigen::VectorXd up = u, dn = u;
    up[j] += h;
    dn[j] -= h;
    J.col(j) = (eval_f(sys, up) - eval_f(sys, dn)) / (2.0 * h);
  }
  return J;
}

}  // namespace

TEST_CASE("combustion rest states and conservation structure") {
  for (double kappa : {1.0, 2.0, 0.5}) {
    ReactionSystem sys = make_combustion({1.0 - 1e-9, kappa, 0.0});
    CHECK(sys.n == 2);
    CHECK(sys.n1 == 1);
    CHECK(sys.n2 == 1);
    CHECK(sys.rest_minus[0] == doctest::Approx(1.0 / kappa).epsilon(1e-15));
    CHECK(sys.rest_minus[1] == 0.0);
    CHECK(sys.rest_plus[0] == 0.0);
    CHECK(sys.rest_plus[1] == 1.0);

    CHECK(eval_f(sys, sys.rest_minus).norm() == 0.0);
    CHECK(eval_f(sys, sys.rest_plus).norm() == 0.0);

    // kappa*f1 + f2 == 0 identically: kappa*u1 + u2 is conserved by the flow.
    for (double u1 : {0.05, 0.3, 1.2}) {
      for (double u2 : {-0.2, 0.4, 1.0}) {
        Eigen::VectorXd u(2);
        u << u1, u2;
        Eigen::VectorXd fv = eval_f(sys, u);
        CHECK(std::abs(kappa * fv[0] + fv[1]) < 1e-15);
      }
    }

    // The whole u2 = 0 line is a rest set: that is the triangular structure
    // (A1 = 0) the decay estimates for the first block rely on.
    for (double u1 : {-1.0, 0.0, 0.7, 3.0}) {
      Eigen::VectorXd u(2);
      u << u1, 0.0;
      CHECK(eval_f(sys, u).norm() == 0.0);
    }
    CHECK(sys.A1.rows() == 1);
    CHECK(sys.A1(0, 0) == 0.0);
  }
}

TEST_CASE("combustion rate values and degenerate Jacobian ahead of the front") {
  ReactionSystem sys = make_combustion({0.0, 1.0, 0.0});
  // g(1) = exp(-1), g(1/2) = exp(-2), dg(1/2) = 4 exp(-2)
  Eigen::VectorXd u(2);
  u << 1.0, 1.0;
  CHECK(eval_f(sys, u)[0] == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  u << 0.5, 1.0;
  CHECK(eval_f(sys, u)[0] == doctest::Approx(0.1353352832366127).epsilon(1e-15));
  Eigen::MatrixXd J = eval_jacobian(sys, u);
  CHECK(J(0, 0) == doctest::Approx(0.5413411329464508).epsilon(1e-14));
  CHECK(J(0, 1) == doctest::Approx(0.1353352832366127).epsilon(1e-15));
  CHECK(J(1, 0) == doctest::Approx(-0.5413411329464508).epsilon(1e-14));
  CHECK(J(1, 1) == doctest::Approx(-0.1353352832366127).epsilon(1e-15));

  // The rate vanishes to all orders at zero temperature, so df at the
  // unburned state is the zero matrix.
  CHECK(eval_jacobian(sys, sys.rest_plus).norm() == 0.0);
  std::vector<Eigen::MatrixXd> H;
  sys.d2f(sys.rest_plus.data(), H);
  CHECK(H[0].norm() == 0.0);
  CHECK(H[1].norm() == 0.0);

  // Below the clamp the rate is exactly zero, not merely tiny.
  u << -0.3, 1.0;
  CHECK(eval_f(sys, u).norm() == 0.0);
}

TEST_CASE("analytic derivatives agree with finite differences") {
  ReactionSystem comb = make_combustion({0.5, 1.3, 0.0}, false);
  Eigen::VectorXd u(2);
  u << 0.42, 0.63;
  CHECK((eval_jacobian(comb, u) - fd_jacobian(comb, u)).norm() < 1e-8);

  std::vector<Eigen::MatrixXd> H;
  comb.d2f(u.data(), H);
  const double h = 1e-5;
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd up = u, dn = u;
    up[j] += h;
    dn[j] -= h;
    Eigen::MatrixXd D = (eval_jacobian(comb, up) - eval_jacobian(comb, dn)) / (2.0 * h);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i) CHECK(std::abs(D(k, i) - H[k](i, j)) < 1e-7);
  }

  ReactionSystem bis = make_bistable({0.7});
  Eigen::VectorXd ub(1);
  ub << 0.37;
  CHECK((eval_jacobian(bis, ub) - fd_jacobian(bis, ub)).norm() < 1e-8);
}

TEST_CASE("bistable cubic: zeros, slopes, diffusion") {
  ReactionSystem sys = make_bistable({0.7});
  CHECK(sys.n == 1);
  CHECK(sys.n1 == 0);
  CHECK(sys.n2 == 1);
  CHECK(sys.diffusion[0] == 1.0);
  for (double r : {0.0, 0.7, 1.0}) {
    Eigen::VectorXd u(1);
    u << r;
    CHECK(std::abs(eval_f(sys, u)[0]) < 1e-16);
  }
  Eigen::VectorXd z(1);
  z << 0.0;
  CHECK(eval_jacobian(sys, z)(0, 0) == doctest::Approx(-0.7).epsilon(1e-15));
  z << 1.0;
  CHECK(eval_jacobian(sys, z)(0, 0) == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("N(u,v) is the exact Taylor remainder kernel") {
  // Closed form for the cubic: N(u,v) = -3uv - v^2 + (1+a)v.
  ReactionSystem bis = make_bistable({0.7});
  Eigen::VectorXd u(1), v(1);
  u << 0.3;
  v << 0.2;
  Eigen::MatrixXd N = eval_N(bis, u, v);
  CHECK(N(0, 0) == doctest::Approx(0.12).epsilon(1e-13));

  // f(u+v) - f(u) - df(u) v = N(u,v) v for both models.
  auto remainder_check = [](const ReactionSystem& sys, const Eigen::VectorXd& uu,
                            const Eigen::VectorXd& vv, double tol) {
    Eigen::VectorXd lhs = eval_f(sys, uu + vv) - eval_f(sys, uu) - eval_jacobian(sys, uu) * vv;
    Eigen::VectorXd rhs = eval_N(sys, uu, vv) * vv;
    CHECK((lhs - rhs).norm() < tol);
  };
  remainder_check(bis, u, v, 1e-15);

  ReactionSystem comb = make_combustion({0.0, 1.0, 0.0});
  Eigen::VectorXd uc(2), vc(2);
  uc << 0.6, 0.5;
  vc << 0.07, -0.04;
  remainder_check(comb, uc, vc, 1e-12);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_combustion({0.0, -1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(make_combustion({0.0, 0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(make_combustion({1.0, 1.0, 0.0}), ConfigError);   // epsilon == 1
  CHECK_THROWS_AS(make_combustion({-0.1, 1.0, 0.0}), ConfigError);  // epsilon < 0
  CHECK_THROWS_AS(make_bistable({0.5}), ConfigError);
  CHECK_THROWS_AS(make_bistable({1.0}), ConfigError);

  ReactionSystem expl = make_combustion({0.25, 1.0, 0.0}, false);
  CHECK(expl.diffusion == std::vector<double>{1.0, 0.25});
  ReactionSystem theo = make_combustion({0.25, 1.0, 0.0}, true);
  CHECK(theo.diffusion == std::vector<double>{1.0, 1.0});

  ReactionSystem bis = make_bistable({0.7});
  Eigen::VectorXd bad(1);
  bad << std::nan("");
  CHECK_THROWS_AS(eval_f(bis, bad), ConfigError);
  Eigen::VectorXd wrong(2);
  wrong << 0.0, 0.0;
  CHECK_THROWS_AS(eval_f(bis, wrong), ConfigError);
}
