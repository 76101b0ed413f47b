#pragma once

// Reference integrators for tests. Deliberately share nothing with the
// library's adaptive quadrature.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

/// Nodes and weights of n-point Gauss-Legendre on [-1, 1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Composite rule over consecutive breakpoints.
inline double integrate(const std::function<double(double)>& f, const std::vector<double>& breaks, int order = 20) {
  static thread_local std::pair<std::vector<double>, std::vector<double>> rule;
  if (static_cast<int>(rule.first.size()) != order) rule = gauss_legendre(order);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += rule.second[i] * f(c + h * rule.first[i]);
    total += h * s;
  }
  return total;
}

/// Geometric panels from lo to hi, no wider than max_width.
inline std::vector<double> breaks(double lo, double hi, double per_decade, double max_width = INFINITY) {
  std::vector<double> b{lo};
  const double ratio = std::pow(10.0, 1.0 / per_decade);
  while (b.back() < hi) b.push_back(std::min({b.back() * ratio, b.back() + max_width, hi}));
  return b;
}

}  // namespace oracle
