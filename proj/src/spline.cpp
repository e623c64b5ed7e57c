#include "fsl/spline.hpp"

#include <algorithm>
#include <cmath>

#include "fsl/errors.hpp"

namespace fsl {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y, double slope_left,
                         double slope_right)
    : x_(std::move(x)), y_(std::move(y)) {
  const int n = static_cast<int>(x_.size());
  if (n < 3 || y_.size() != x_.size()) throw ConfigError("CubicSpline: need >= 3 matching knots");
  for (int i = 0; i + 1 < n; ++i)
    if (!(x_[i + 1] > x_[i])) throw ConfigError("CubicSpline: knots must increase");

  // Tridiagonal system for the second derivatives, clamped at both ends.
  std::vector<double> dl(n, 0.0), dd(n, 0.0), du(n, 0.0), rhs(n, 0.0);
  auto h = [&](int i) { return x_[i + 1] - x_[i]; };
  dd[0] = h(0) / 3.0;
  du[0] = h(0) / 6.0;
  rhs[0] = (y_[1] - y_[0]) / h(0) - slope_left;
  for (int i = 1; i < n - 1; ++i) {
    dl[i] = h(i - 1) / 6.0;
    dd[i] = (h(i - 1) + h(i)) / 3.0;
    du[i] = h(i) / 6.0;
    rhs[i] = (y_[i + 1] - y_[i]) / h(i) - (y_[i] - y_[i - 1]) / h(i - 1);
  }
  dl[n - 1] = h(n - 2) / 6.0;
  dd[n - 1] = h(n - 2) / 3.0;
  rhs[n - 1] = slope_right - (y_[n - 1] - y_[n - 2]) / h(n - 2);

  // Thomas algorithm.
  m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0);
  c[0] = du[0] / dd[0];
  m_[0] = rhs[0] / dd[0];
  for (int i = 1; i < n; ++i) {
    double denom = dd[i] - dl[i] * c[i - 1];
    c[i] = (i < n - 1) ? du[i] / denom : 0.0;
    m_[i] = (rhs[i] - dl[i] * m_[i - 1]) / denom;
  }
  for (int i = n - 2; i >= 0; --i) m_[i] -= c[i] * m_[i + 1];
}

int CubicSpline::locate(double x) const {
  int lo = 0, hi = static_cast<int>(x_.size()) - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (x_[mid] <= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double CubicSpline::eval(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  int i = locate(x);
  double h = x_[i + 1] - x_[i], t = x - x_[i];
  double b = (y_[i + 1] - y_[i]) / h - h / 6.0 * (2.0 * m_[i] + m_[i + 1]);
  return y_[i] + t * (b + t * (0.5 * m_[i] + t * (m_[i + 1] - m_[i]) / (6.0 * h)));
}

double CubicSpline::deriv(double x) const {
  if (x <= x_.front() || x >= x_.back()) return 0.0;
  int i = locate(x);
  double h = x_[i + 1] - x_[i], t = x - x_[i];
  double b = (y_[i + 1] - y_[i]) / h - h / 6.0 * (2.0 * m_[i] + m_[i + 1]);
  return b + t * (m_[i] + 0.5 * t * (m_[i + 1] - m_[i]) / h);
}

double CubicSpline::deriv2(double x) const {
  if (x <= x_.front() || x >= x_.back()) return 0.0;
  int i = locate(x);
  double h = x_[i + 1] - x_[i], t = x - x_[i];
  return m_[i] + t * (m_[i + 1] - m_[i]) / h;
}

}  // namespace fsl
