#include "sbiwss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbiwss/quadrature.hpp"

namespace sbiwss {

GammaSamples build_gamma(const ChannelSpec& spec, const ScanRegion& region,
                         int count, WallSide side) {
  const double xa = std::max(spec.x_min, region.x0);
  const double xb = std::min(spec.x_max, region.x1);
  if (xa >= xb)
    throw std::invalid_argument(
        "build_gamma: scan region does not intersect the channel");
  if (count < 2) throw std::invalid_argument("build_gamma: need at least 2 stations");
  const double sa = wall_arc_length(spec, spec.x_min, xa);
  const double sb = wall_arc_length(spec, spec.x_min, xb);
  GammaSamples g;
  g.side = side;
  g.s.resize(count);
  g.point.resize(count);
  g.normal.resize(count);
  for (int k = 0; k < count; ++k) {
    const double s = sa + (sb - sa) * k / (count - 1);
    const double x = station_at_arc_length(spec, s);
    const WallPoint wp = wall_point(spec, x, side);
    g.s[k] = s;
    g.point[k] = wp.point;
    g.normal[k] = wp.normal;
  }
  return g;
}

namespace {

double lagrange4(const double* xs, const double* ys, double t) {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    double term = ys[i];
    for (int j = 0; j < 4; ++j)
      if (j != i) term *= (t - xs[j]) / (xs[i] - xs[j]);
    acc += term;
  }
  return acc;
}

}  // namespace

double relative_l2_error(const WssProfile& ref, const WssProfile& test,
                         int quad_order) {
  const int n = ref.size();
  if (n != test.size())
    throw std::invalid_argument("relative_l2_error: profiles differ in station count");
  if (n < 4)
    throw std::invalid_argument("relative_l2_error: need at least 4 stations");
  if (quad_order < 1 || quad_order > 200)
    throw std::invalid_argument("relative_l2_error: bad quadrature order");
  for (int k = 0; k < n; ++k)
    if (std::abs(ref.s[k] - test.s[k]) > 1e-9 * (1.0 + std::abs(ref.s[k])))
      throw std::invalid_argument(
          "relative_l2_error: profiles sampled at different stations");

  const QuadRule1D rule = gauss_legendre(quad_order);
  double num = 0.0, den = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    const int i0 = std::clamp(k - 1, 0, n - 4);
    const double len = ref.s[k + 1] - ref.s[k];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double t = ref.s[k] + rule.points[q] * len;
      const double w = rule.weights[q] * len;
      const double r = lagrange4(&ref.s[i0], &ref.wss[i0], t);
      const double v = lagrange4(&test.s[i0], &test.wss[i0], t);
      num += w * (r - v) * (r - v);
      den += w * r * r;
    }
  }
  if (den <= 0.0)
    throw std::domain_error(
        "relative_l2_error: reference profile vanishes along the segment");
  return 100.0 * std::sqrt(num / den);
}

ErrorReport make_error_report(const WssProfile& truth, const WssProfile& sbi,
                              const WssProfile& mri, int quad_order) {
  ErrorReport r;
  r.e_sbi = relative_l2_error(truth, sbi, quad_order);
  r.e_mri = relative_l2_error(truth, mri, quad_order);
  r.abs_err_sbi.resize(truth.size());
  r.abs_err_mri.resize(truth.size());
  for (int k = 0; k < truth.size(); ++k) {
    r.abs_err_sbi[k] = std::abs(truth.wss[k] - sbi.wss[k]);
    r.abs_err_mri[k] = std::abs(truth.wss[k] - mri.wss[k]);
  }
  r.side = truth.side;
  r.s_begin = truth.s.empty() ? 0.0 : truth.s.front();
  r.s_end = truth.s.empty() ? 0.0 : truth.s.back();
  r.quad_order = quad_order;
  return r;
}

}  // namespace sbiwss
