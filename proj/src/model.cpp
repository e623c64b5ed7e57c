#include "fsl/model.hpp"

#include <cmath>

#include "fsl/errors.hpp"
#include "fsl/quadrature.hpp"

namespace fsl {

namespace {

// Reaction rate and its first two derivatives.  Below ~1e-6 the true values
// are far under double precision, so we return exact zeros rather than risk
// 0 * inf in the derivative formulas.
struct Rate {
  double g, dg, d2g;
};

Rate rate(double u1, double clamp) {
  if (u1 <= clamp + 1e-6) return {0.0, 0.0, 0.0};
  const double inv = 1.0 / u1;
  const double e = std::exp(-inv);
  const double dg = e * inv * inv;
  const double d2g = e * (inv * inv * inv * inv - 2.0 * inv * inv * inv);
  return {e, dg, d2g};
}

void check_state(const double* u, int n) {
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(u[i])) throw ConfigError("reaction system: non-finite state");
}

}  // namespace

ReactionSystem make_combustion(const CombustionParams& p, bool theory_mode) {
  if (p.kappa <= 0.0) throw ConfigError("make_combustion: kappa must be > 0");
  if (p.epsilon < 0.0 || p.epsilon >= 1.0)
    throw ConfigError("make_combustion: epsilon must lie in [0, 1)");

  ReactionSystem sys;
  sys.name = "combustion";
  sys.n = 2;
  sys.n1 = 1;
  sys.n2 = 1;
  sys.theory_mode = theory_mode;
  sys.diffusion = theory_mode ? std::vector<double>{1.0, 1.0} : std::vector<double>{1.0, p.epsilon};
  sys.A1 = Eigen::MatrixXd::Zero(1, 1);
  // Burned state behind the front, unburned ahead; the burned temperature
  // 1/kappa follows from integrating kappa*u1 + u2 across the front.
  sys.rest_minus = Eigen::Vector2d(1.0 / p.kappa, 0.0);
  sys.rest_plus = Eigen::Vector2d(0.0, 1.0);
  sys.params = {{"kappa", p.kappa}, {"epsilon", p.epsilon}, {"g_clamp", p.g_clamp}};

  const double kappa = p.kappa, clamp = p.g_clamp;
  sys.f = [kappa, clamp](const double* u, double* out) {
    check_state(u, 2);
    const double g = rate(u[0], clamp).g;
    out[0] = u[1] * g;
    out[1] = -kappa * u[1] * g;
  };
  sys.df = [kappa, clamp](const double* u, Eigen::MatrixXd& J) {
    check_state(u, 2);
    const Rate r = rate(u[0], clamp);
    J.resize(2, 2);
    J(0, 0) = u[1] * r.dg;
    J(0, 1) = r.g;
    J(1, 0) = -kappa * u[1] * r.dg;
    J(1, 1) = -kappa * r.g;
  };
  sys.d2f = [kappa, clamp](const double* u, std::vector<Eigen::MatrixXd>& H) {
    check_state(u, 2);
    const Rate r = rate(u[0], clamp);
    H.assign(2, Eigen::MatrixXd::Zero(2, 2));
    H[0](0, 0) = u[1] * r.d2g;
    H[0](0, 1) = H[0](1, 0) = r.dg;
    H[1] = -kappa * H[0];
  };
  return sys;
}

ReactionSystem make_bistable(const BistableParams& p) {
  if (!(p.a > 0.5 && p.a < 1.0)) throw ConfigError("make_bistable: a must lie in (1/2, 1)");

  ReactionSystem sys;
  sys.name = "bistable";
  sys.n = 1;
  sys.n1 = 0;
  sys.n2 = 1;
  sys.theory_mode = true;
  sys.diffusion = {1.0};
  sys.A1 = Eigen::MatrixXd::Zero(0, 0);
  sys.rest_minus = Eigen::VectorXd::Zero(1);
  sys.rest_plus = Eigen::VectorXd::Ones(1);
  sys.params = {{"a", p.a}};

  const double a = p.a;
  sys.f = [a](const double* u, double* out) {
    check_state(u, 1);
    out[0] = u[0] * (1.0 - u[0]) * (u[0] - a);
  };
  sys.df = [a](const double* u, Eigen::MatrixXd& J) {
    check_state(u, 1);
    J.resize(1, 1);
    J(0, 0) = -3.0 * u[0] * u[0] + 2.0 * (1.0 + a) * u[0] - a;
  };
  sys.d2f = [a](const double* u, std::vector<Eigen::MatrixXd>& H) {
    check_state(u, 1);
    H.assign(1, Eigen::MatrixXd::Zero(1, 1));
    H[0](0, 0) = -6.0 * u[0] + 2.0 * (1.0 + a);
  };
  return sys;
}

Eigen::VectorXd eval_f(const ReactionSystem& sys, const Eigen::VectorXd& u) {
  if (u.size() != sys.n) throw ConfigError("eval_f: state dimension mismatch");
  Eigen::VectorXd out(sys.n);
  sys.f(u.data(), out.data());
  return out;
}

Eigen::MatrixXd eval_jacobian(const ReactionSystem& sys, const Eigen::VectorXd& u) {
  if (u.size() != sys.n) throw ConfigError("eval_jacobian: state dimension mismatch");
  Eigen::MatrixXd J;
  sys.df(u.data(), J);
  return J;
}

Eigen::MatrixXd eval_N(const ReactionSystem& sys, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v, int quad_order) {
  if (u.size() != sys.n || v.size() != sys.n) throw ConfigError("eval_N: dimension mismatch");
  const QuadRule q = gauss_legendre_01(quad_order);
  Eigen::MatrixXd J0;
  sys.df(u.data(), J0);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(sys.n, sys.n);
  Eigen::VectorXd us(sys.n);
  Eigen::MatrixXd Js;
  for (size_t k = 0; k < q.x.size(); ++k) {
    us = u + q.x[k] * v;
    sys.df(us.data(), Js);
    acc += q.w[k] * (Js - J0);
  }
  return acc;
}

}  // namespace fsl
