#ifndef SBIWSS_GEOMETRY_HPP
#define SBIWSS_GEOMETRY_HPP

//! Parametric stenotic channel
//!
//!   Omega = { (x1, x2) : x_min <= x1 <= x_max, |x2| <= y(x1) }
//!   y(x)  = B0 - A / sqrt(2 pi sigma^2) * exp(-(x - c)^2 / (2 sigma^2))
//!
//! i.e. a straight channel of half-width B0 narrowed by a Gaussian bump of
//! integrated area A centred at c.  A = 0 recovers the straight channel.
//! All coordinates in cm.

#include <array>
#include <string>

namespace sbiwss {

using Vec2 = std::array<double, 2>;

enum class BoundaryTag { Wall, Inflow, Outflow };

enum class WallSide { Top, Bottom };

struct ChannelSpec {
  double half_width0 = 0.3;  // B0
  double bump_area = 0.18;   // A
  double bump_center = 3.0;  // c
  double bump_sigma = 0.6;   // sigma
  double x_min = 0.0;
  double x_max = 6.0;

  // Throws std::invalid_argument if the parameters close the throat or are
  // otherwise degenerate.
  void validate() const;

  double bump_amplitude() const;  // A / sqrt(2 pi sigma^2)
  double throat_half_width() const { return half_width0 - bump_amplitude(); }
  double diameter() const { return 2.0 * half_width0; }
};

struct WallPoint {
  Vec2 point;        // on the wall curve
  Vec2 normal;       // unit, outward
  Vec2 tangent;      // unit, oriented with increasing x
  double s = 0.0;    // arc length from x = x_min along the same side
  WallSide side = WallSide::Top;
};

double half_width(const ChannelSpec& spec, double x);
double half_width_deriv(const ChannelSpec& spec, double x);
double half_width_deriv2(const ChannelSpec& spec, double x);

// Unit outward normal / unit tangent of the wall curve at station x.
Vec2 wall_normal(const ChannelSpec& spec, double x, WallSide side);
Vec2 wall_tangent(const ChannelSpec& spec, double x, WallSide side);

// Closest point on the given wall (or on the nearer of the two when side is
// not forced).  The returned arc length is measured along that wall from
// x = x_min.  Station is clamped to [x_min, x_max].
WallPoint project_to_wall(const ChannelSpec& spec, const Vec2& p, WallSide side);
WallPoint project_to_wall(const ChannelSpec& spec, const Vec2& p);

// Arc length along one wall between stations x0 <= x1, and its inverse.
double wall_arc_length(const ChannelSpec& spec, double x0, double x1);
double station_at_arc_length(const ChannelSpec& spec, double s);

// Wall sample (point, normal, tangent, arc length) at station x.
WallPoint wall_point(const ChannelSpec& spec, double x, WallSide side);

bool inside(const ChannelSpec& spec, const Vec2& p);

// Approximate signed distance (negative inside), exact enough near the
// boundary for mesh generation; the wall term is first-order normalized.
double signed_distance(const ChannelSpec& spec, const Vec2& p);

// Analytic domain area (bump mass over [x_min, x_max] via erf).
double domain_area(const ChannelSpec& spec);

}  // namespace sbiwss

#endif
