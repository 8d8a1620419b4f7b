#include "sbiwss/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sbiwss {

QuadRule1D gauss_legendre(int n) {
  if (n < 1 || n > 200) throw std::invalid_argument("gauss_legendre: bad point count");
  QuadRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(3.14159265358979323846 * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) { p1 = x; }
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[n - 1 - k] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - k] = 0.5 * w;
  }
  return rule;
}

TriQuadRule tri_quadrature(int n) {
  const QuadRule1D line = gauss_legendre(n);
  TriQuadRule rule;
  rule.points.reserve(static_cast<size_t>(n) * n);
  rule.weights.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = line.points[i], v = line.points[j];
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(line.weights[i] * line.weights[j] * (1.0 - u));
    }
  return rule;
}

TriQuadRule tri_quadrature_composite(int n, int levels) {
  if (levels < 1) throw std::invalid_argument("tri_quadrature_composite: levels must be >= 1");
  const TriQuadRule base = tri_quadrature(n);
  if (levels == 1) return base;
  TriQuadRule rule;
  const double inv = 1.0 / levels;
  const double scale = inv * inv;
  auto emit = [&](const Vec2& a, const Vec2& b, const Vec2& c) {
    for (int q = 0; q < base.size(); ++q) {
      const double xi = base.points[q][0], eta = base.points[q][1];
      rule.points.push_back({a[0] + xi * (b[0] - a[0]) + eta * (c[0] - a[0]),
                             a[1] + xi * (b[1] - a[1]) + eta * (c[1] - a[1])});
      rule.weights.push_back(base.weights[q] * scale);
    }
  };
  for (int i = 0; i < levels; ++i)
    for (int j = 0; i + j < levels; ++j) {
      const Vec2 p00 = {i * inv, j * inv};
      const Vec2 p10 = {(i + 1) * inv, j * inv};
      const Vec2 p01 = {i * inv, (j + 1) * inv};
      emit(p00, p10, p01);
      if (i + j < levels - 1) {
        const Vec2 p11 = {(i + 1) * inv, (j + 1) * inv};
        emit(p10, p11, p01);
      }
    }
  return rule;
}

}  // namespace sbiwss
