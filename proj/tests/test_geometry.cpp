#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sbiwss/geometry.hpp"
#include "sbiwss/units.hpp"

using namespace sbiwss;

namespace {

ChannelSpec vessel() {
  ChannelSpec spec;  // defaults are the stenotic vessel
  spec.validate();
  return spec;
}

ChannelSpec straight() {
  ChannelSpec spec;
  spec.bump_area = 0.0;
  spec.validate();
  return spec;
}

}  // namespace

TEST_CASE("spec validation rejects degenerate channels") {
  ChannelSpec bad = vessel();
  bad.bump_area = 0.9;  // amplitude 0.598 > B0: throat closes
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = vessel();
  bad.half_width0 = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = vessel();
  bad.x_max = bad.x_min;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = vessel();
  bad.bump_sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("half width: frozen values on the default vessel") {
  const ChannelSpec spec = vessel();
  CHECK(spec.bump_amplitude() == doctest::Approx(0.11968268412042980).epsilon(1e-14));
  CHECK(half_width(spec, 3.0) == doctest::Approx(0.18031731587957020).epsilon(1e-14));
  CHECK(spec.throat_half_width() == doctest::Approx(0.18031731587957020).epsilon(1e-14));
  CHECK(half_width(spec, 3.6) == doctest::Approx(0.22740878264425700).epsilon(1e-14));
  CHECK(half_width(spec, 2.4) == doctest::Approx(0.22740878264425700).epsilon(1e-14));
  CHECK(half_width(spec, 1.5) == doctest::Approx(0.29474150985192944).epsilon(1e-14));
  CHECK(half_width(spec, 0.0) == doctest::Approx(0.29999955398414558).epsilon(1e-14));
  // narrowest at the bump center, widening monotonically outward
  CHECK(half_width(spec, 3.0) < half_width(spec, 2.9));
  CHECK(half_width(spec, 2.9) < half_width(spec, 2.5));
}

TEST_CASE("half width: straight channel is constant B0") {
  const ChannelSpec spec = straight();
  for (double x : {0.0, 1.7, 3.0, 6.0}) {
    CHECK(half_width(spec, x) == 0.3);
    CHECK(half_width_deriv(spec, x) == 0.0);
  }
}

TEST_CASE("derivatives match central differences") {
  const ChannelSpec spec = vessel();
  const double h = 1e-6;
  for (double x : {0.5, 2.0, 2.4, 3.0, 3.3, 4.8}) {
    const double fd1 = (half_width(spec, x + h) - half_width(spec, x - h)) / (2.0 * h);
    CHECK(half_width_deriv(spec, x) == doctest::Approx(fd1).epsilon(1e-8));
    const double fd2 =
        (half_width_deriv(spec, x + h) - half_width_deriv(spec, x - h)) / (2.0 * h);
    CHECK(half_width_deriv2(spec, x) == doctest::Approx(fd2).epsilon(1e-7));
  }
  CHECK(half_width_deriv(spec, 2.4) == doctest::Approx(-0.12098536225957167).epsilon(1e-14));
}

TEST_CASE("wall normals and tangents are unit, orthogonal, outward") {
  const ChannelSpec spec = vessel();
  for (double x : {0.3, 2.4, 3.0, 5.1}) {
    for (WallSide side : {WallSide::Top, WallSide::Bottom}) {
      const Vec2 n = wall_normal(spec, x, side);
      const Vec2 t = wall_tangent(spec, x, side);
      CHECK(std::hypot(n[0], n[1]) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::hypot(t[0], t[1]) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(n[0] * t[0] + n[1] * t[1]) < 1e-14);
      // outward: moving off the wall along n leaves the domain
      const double y = half_width(spec, x) * (side == WallSide::Top ? 1.0 : -1.0);
      const Vec2 off = {x + 1e-6 * n[0], y + 1e-6 * n[1]};
      CHECK(!inside(spec, off));
    }
  }
  const Vec2 n = wall_normal(spec, 2.4, WallSide::Top);
  CHECK(n[0] == doctest::Approx(0.12010950676735380).epsilon(1e-13));
  CHECK(n[1] == doctest::Approx(0.99276064909126157).epsilon(1e-13));
  // bottom wall is the mirror image
  const Vec2 nb = wall_normal(spec, 2.4, WallSide::Bottom);
  CHECK(nb[0] == doctest::Approx(n[0]).epsilon(1e-14));
  CHECK(nb[1] == doctest::Approx(-n[1]).epsilon(1e-14));
}

TEST_CASE("normal agrees with the finite-difference curve tangent") {
  const ChannelSpec spec = vessel();
  const double h = 1e-6;
  for (double x : {1.0, 2.4, 3.0, 4.2}) {
    const Vec2 n = wall_normal(spec, x, WallSide::Top);
    const double ty = (half_width(spec, x + h) - half_width(spec, x - h)) / (2.0 * h);
    const double dot = n[0] * 1.0 + n[1] * ty;
    CHECK(std::abs(dot) / std::hypot(1.0, ty) < 1e-8);
  }
}

TEST_CASE("projection: optimality, idempotence, frozen example") {
  const ChannelSpec spec = vessel();

  const WallPoint w = project_to_wall(spec, {2.5, 0.4}, WallSide::Top);
  CHECK(w.point[0] == doctest::Approx(2.4783689230906540).epsilon(1e-12));
  CHECK(w.point[1] == doctest::Approx(0.21798282382326846).epsilon(1e-12));
  const double dist = std::hypot(2.5 - w.point[0], 0.4 - w.point[1]);
  CHECK(dist == doctest::Approx(0.18329799756573821).epsilon(1e-12));

  // stationarity residual of the squared distance
  const double x = w.point[0];
  const double g = (x - 2.5) + (half_width(spec, x) - 0.4) * half_width_deriv(spec, x);
  CHECK(std::abs(g) < 1e-10);

  // idempotence: projecting a wall point returns it
  for (double xs : {0.7, 2.4, 3.0, 5.5}) {
    const Vec2 p = {xs, half_width(spec, xs)};
    const WallPoint again = project_to_wall(spec, p, WallSide::Top);
    CHECK(again.point[0] == doctest::Approx(xs).epsilon(1e-12));
    CHECK(again.point[1] == doctest::Approx(p[1]).epsilon(1e-12));
  }

  // side selection and clamping
  const WallPoint bottom = project_to_wall(spec, {3.0, -0.1});
  CHECK(bottom.side == WallSide::Bottom);
  CHECK(bottom.point[1] < 0.0);
  const WallPoint clamped = project_to_wall(spec, {7.0, 0.1}, WallSide::Top);
  CHECK(clamped.point[0] == 6.0);
}

TEST_CASE("arc length and its inverse") {
  const ChannelSpec spec = vessel();
  const double total = wall_arc_length(spec, 0.0, 6.0);
  CHECK(total == doctest::Approx(6.0105508187578521).epsilon(1e-12));
  CHECK(wall_arc_length(spec, 1.5, 4.5) == doctest::Approx(3.0104889099344878).epsilon(1e-12));
  // straight channel: arc length equals station difference
  CHECK(wall_arc_length(straight(), 0.7, 4.2) == doctest::Approx(3.5).epsilon(1e-14));
  // additivity and antisymmetry
  const double a = wall_arc_length(spec, 0.0, 2.3), b = wall_arc_length(spec, 2.3, 6.0);
  CHECK(a + b == doctest::Approx(total).epsilon(1e-12));
  CHECK(wall_arc_length(spec, 4.5, 1.5) == doctest::Approx(-3.0104889099344878).epsilon(1e-12));
  // inverse round trip
  for (double s : {0.0, 0.4 * total, 0.5 * total, 0.93 * total, total}) {
    const double x = station_at_arc_length(spec, s);
    CHECK(wall_arc_length(spec, 0.0, x) == doctest::Approx(s).epsilon(1e-10));
  }
}

TEST_CASE("inside and signed distance") {
  const ChannelSpec spec = vessel();
  CHECK(inside(spec, {3.0, 0.0}));
  CHECK(inside(spec, {3.0, 0.18}));
  CHECK(!inside(spec, {3.0, 0.19}));
  CHECK(!inside(spec, {-0.1, 0.0}));
  CHECK(!inside(spec, {6.1, 0.0}));
  CHECK(signed_distance(spec, {3.0, 0.0}) < 0.0);
  CHECK(signed_distance(spec, {3.0, 0.25}) > 0.0);
  // near the wall the normalized wall term approximates true distance
  const Vec2 p = {2.4, half_width(spec, 2.4) - 1e-4};
  CHECK(signed_distance(spec, p) == doctest::Approx(-1e-4).epsilon(1e-2));
  CHECK(std::abs(signed_distance(spec, {2.4, half_width(spec, 2.4)})) < 1e-14);
}

TEST_CASE("domain area") {
  CHECK(domain_area(vessel()) == doctest::Approx(3.2400002063891318).epsilon(1e-14));
  CHECK(domain_area(straight()) == doctest::Approx(3.6).epsilon(1e-14));
}

TEST_CASE("fluid properties and Reynolds conversions") {
  const FluidProps props;
  CHECK(props.dynamic_viscosity() == doctest::Approx(0.0029998).epsilon(1e-14));
  CHECK(props.nu_cm2_s() == doctest::Approx(0.0283).epsilon(1e-14));

  const double d = vessel().diameter();
  CHECK(d == 0.6);
  CHECK(reynolds_to_theta(100.0, d, props) == doctest::Approx(4.7166666666666667).epsilon(1e-14));
  CHECK(reynolds_to_theta(500.0, d, props) == doctest::Approx(23.583333333333333).epsilon(1e-14));
  CHECK(reynolds_to_theta(1000.0, d, props) == doctest::Approx(47.166666666666667).epsilon(1e-14));
  for (double re : {100.0, 350.0, 1000.0})
    CHECK(theta_to_reynolds(reynolds_to_theta(re, d, props), d, props) ==
          doctest::Approx(re).epsilon(1e-14));
  CHECK_THROWS_AS(reynolds_to_theta(100.0, 0.0, props), std::invalid_argument);

  // kinematic cm^2/s^2 -> Pa
  CHECK(kinematic_pressure_to_pa(1.0, props) == doctest::Approx(0.106).epsilon(1e-14));
}
