// Reference computations used only by the tests. Nothing here calls into the
// library's numerical kernels.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting on a copy.
inline std::vector<double> dense_solve(Dense a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (a[p][k] == 0.0) throw std::runtime_error("dense_solve: singular");
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= l * a[k][j];
      b[i] -= l * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
    x[k] = s / a[k][k];
  }
  return x;
}

inline double central_dx(const std::function<double(double, double)>& f, double x, double y,
                         double h) {
  return (f(x + h, y) - f(x - h, y)) / (2 * h);
}

inline double central_dy(const std::function<double(double, double)>& f, double x, double y,
                         double h) {
  return (f(x, y + h) - f(x, y - h)) / (2 * h);
}

inline double central_dxx(const std::function<double(double, double)>& f, double x, double y,
                          double h) {
  return (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / (h * h);
}

// Least-squares slope of -log e against log N.
inline double fitted_order(const std::vector<int>& N, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(N.size());
  for (std::size_t i = 0; i < N.size(); ++i) {
    const double lx = std::log(static_cast<double>(N[i]));
    const double ly = std::log(e[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
