#include "sbiwss/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbiwss {

namespace {

constexpr double kPi = 3.14159265358979323846;

double side_sign(WallSide side) { return side == WallSide::Top ? 1.0 : -1.0; }

// Integrand of the wall arc length.
double arc_speed(const ChannelSpec& spec, double x) {
  const double d = half_width_deriv(spec, x);
  return std::sqrt(1.0 + d * d);
}

// Adaptive Simpson quadrature, absolute tolerance.
double simpson(const ChannelSpec& spec, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = arc_speed(spec, lm), frm = arc_speed(spec, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) < 15.0 * tol) return left + right + diff / 15.0;
  return simpson(spec, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(spec, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

void ChannelSpec::validate() const {
  if (half_width0 <= 0.0) throw std::invalid_argument("ChannelSpec: half_width0 must be positive");
  if (bump_sigma <= 0.0) throw std::invalid_argument("ChannelSpec: bump_sigma must be positive");
  if (bump_area < 0.0) throw std::invalid_argument("ChannelSpec: bump_area must be non-negative");
  if (x_max <= x_min) throw std::invalid_argument("ChannelSpec: x_max must exceed x_min");
  if (throat_half_width() <= 0.0)
    throw std::invalid_argument("ChannelSpec: bump closes the channel (throat half-width <= 0)");
}

double ChannelSpec::bump_amplitude() const {
  return bump_area / std::sqrt(2.0 * kPi * bump_sigma * bump_sigma);
}

double half_width(const ChannelSpec& spec, double x) {
  const double d = x - spec.bump_center;
  return spec.half_width0 -
         spec.bump_amplitude() * std::exp(-d * d / (2.0 * spec.bump_sigma * spec.bump_sigma));
}

double half_width_deriv(const ChannelSpec& spec, double x) {
  const double s2 = spec.bump_sigma * spec.bump_sigma;
  const double d = x - spec.bump_center;
  return spec.bump_amplitude() * std::exp(-d * d / (2.0 * s2)) * d / s2;
}

double half_width_deriv2(const ChannelSpec& spec, double x) {
  const double s2 = spec.bump_sigma * spec.bump_sigma;
  const double d = x - spec.bump_center;
  return spec.bump_amplitude() * std::exp(-d * d / (2.0 * s2)) * (1.0 / s2 - d * d / (s2 * s2));
}

Vec2 wall_normal(const ChannelSpec& spec, double x, WallSide side) {
  const double yp = half_width_deriv(spec, x);
  const double len = std::sqrt(1.0 + yp * yp);
  // Top wall: rotate the tangent (1, y') a quarter turn toward +x2; the
  // bottom wall is its mirror image about the x1 axis.
  return {-yp / len, side_sign(side) / len};
}

Vec2 wall_tangent(const ChannelSpec& spec, double x, WallSide side) {
  const double yp = side_sign(side) * half_width_deriv(spec, x);
  const double len = std::sqrt(1.0 + yp * yp);
  return {1.0 / len, yp / len};
}

double wall_arc_length(const ChannelSpec& spec, double x0, double x1) {
  if (x1 < x0) return -wall_arc_length(spec, x1, x0);
  if (x1 == x0) return 0.0;
  const double fa = arc_speed(spec, x0), fb = arc_speed(spec, x1);
  const double m = 0.5 * (x0 + x1);
  const double fm = arc_speed(spec, m);
  const double whole = (x1 - x0) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(spec, x0, x1, fa, fm, fb, whole, 1e-14 * std::max(1.0, whole), 48);
}

double station_at_arc_length(const ChannelSpec& spec, double s) {
  const double total = wall_arc_length(spec, spec.x_min, spec.x_max);
  if (s <= 0.0) return spec.x_min;
  if (s >= total) return spec.x_max;
  double x = spec.x_min + (spec.x_max - spec.x_min) * (s / total);
  for (int it = 0; it < 60; ++it) {
    const double r = wall_arc_length(spec, spec.x_min, x) - s;
    const double step = r / arc_speed(spec, x);
    x = std::clamp(x - step, spec.x_min, spec.x_max);
    if (std::abs(step) < 1e-14 * (spec.x_max - spec.x_min)) break;
  }
  return x;
}

WallPoint wall_point(const ChannelSpec& spec, double x, WallSide side) {
  WallPoint w;
  w.side = side;
  w.point = {x, side_sign(side) * half_width(spec, x)};
  w.normal = wall_normal(spec, x, side);
  w.tangent = wall_tangent(spec, x, side);
  w.s = wall_arc_length(spec, spec.x_min, x);
  return w;
}

WallPoint project_to_wall(const ChannelSpec& spec, const Vec2& p, WallSide side) {
  const double sgn = side_sign(side);
  // Stationarity of the squared distance to (x, sgn*y(x)):
  //   g(x) = (x - p1) + (sgn*y(x) - p2) * sgn * y'(x) = 0
  // Safeguarded Newton; the wall slope is mild so the minimizer is unique.
  double lo = spec.x_min, hi = spec.x_max;
  double x = std::clamp(p[0], lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double y = sgn * half_width(spec, x);
    const double yp = sgn * half_width_deriv(spec, x);
    const double ypp = sgn * half_width_deriv2(spec, x);
    const double g = (x - p[0]) + (y - p[1]) * yp;
    const double gp = 1.0 + (y - p[1]) * ypp + yp * yp;
    if (g > 0.0) hi = std::min(hi, x);
    else lo = std::max(lo, x);
    double xn = (gp > 0.0) ? x - g / gp : 0.5 * (lo + hi);
    if (xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-15 * (spec.x_max - spec.x_min)) { x = xn; break; }
    x = xn;
  }
  return wall_point(spec, x, side);
}

WallPoint project_to_wall(const ChannelSpec& spec, const Vec2& p) {
  if (p[1] > 0.0) return project_to_wall(spec, p, WallSide::Top);
  if (p[1] < 0.0) return project_to_wall(spec, p, WallSide::Bottom);
  const WallPoint top = project_to_wall(spec, p, WallSide::Top);
  const WallPoint bot = project_to_wall(spec, p, WallSide::Bottom);
  const auto d2 = [&p](const WallPoint& w) {
    const double dx = w.point[0] - p[0], dy = w.point[1] - p[1];
    return dx * dx + dy * dy;
  };
  return d2(top) <= d2(bot) ? top : bot;
}

bool inside(const ChannelSpec& spec, const Vec2& p) {
  return p[0] >= spec.x_min && p[0] <= spec.x_max && std::abs(p[1]) <= half_width(spec, p[0]);
}

double signed_distance(const ChannelSpec& spec, const Vec2& p) {
  const double dwall = (std::abs(p[1]) - half_width(spec, p[0])) / arc_speed(spec, p[0]);
  return std::max({spec.x_min - p[0], p[0] - spec.x_max, dwall});
}

double domain_area(const ChannelSpec& spec) {
  const double rt2 = std::sqrt(2.0);
  const double a = (spec.x_min - spec.bump_center) / (rt2 * spec.bump_sigma);
  const double b = (spec.x_max - spec.bump_center) / (rt2 * spec.bump_sigma);
  const double bump_mass = 0.5 * spec.bump_area * (std::erf(b) - std::erf(a));
  return 2.0 * (spec.half_width0 * (spec.x_max - spec.x_min) - bump_mass);
}

}  // namespace sbiwss
