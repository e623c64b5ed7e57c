#include "fsl/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "fsl/errors.hpp"

namespace fsl {

QuadRule gauss_legendre_01(int order) {
  if (order < 1 || order > 64) throw ConfigError("gauss_legendre_01: order must be in [1, 64]");
  QuadRule r;
  r.x.resize(order);
  r.w.resize(order);
  // Nodes on [-1, 1] by Newton iteration on P_n, then map to [0, 1].
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.x[i] = 0.5 * (1.0 - x);  // descending cos order maps to ascending on [0,1]
    r.x[n - 1 - i] = 0.5 * (1.0 + x);
    r.w[i] = 0.5 * w;
    r.w[n - 1 - i] = 0.5 * w;
  }
  return r;
}

std::vector<double> trapezoid_weights(int n, double h) {
  std::vector<double> w(n, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double abs_tol, double rel_tol,
                    int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double err = left + right - whole;
  double tol = std::max(abs_tol, rel_tol * std::abs(left + right));
  if (depth <= 0 || std::abs(err) < 15.0 * tol) return left + right + err / 15.0;
  return adaptive_rec(f, a, fa, m, fm, lm, flm, left, abs_tol * 0.5, rel_tol, depth - 1) +
         adaptive_rec(f, m, fm, b, fb, rm, frm, right, abs_tol * 0.5, rel_tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, b, fb, fm);
  return adaptive_rec(f, a, fa, b, fb, m, fm, whole, abs_tol, rel_tol, max_depth);
}

}  // namespace fsl
