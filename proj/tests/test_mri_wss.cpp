#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sbiwss/flow_solver.hpp"
#include "sbiwss/geometry.hpp"
#include "sbiwss/metrics.hpp"
#include "sbiwss/mri_wss.hpp"
#include "sbiwss/units.hpp"
#include "sbiwss/voxels.hpp"

using namespace sbiwss;

namespace {

ChannelSpec straight_spec() {
  ChannelSpec spec;
  spec.bump_area = 0.0;
  spec.validate();
  return spec;
}

VoxelGrid plain_grid(double x0, double x1, double y0, double y1, int nx, int ny) {
  VoxelGrid g;
  g.region = {x0, x1, y0, y1};
  g.nx = nx;
  g.ny = ny;
  g.dx = (x1 - x0) / nx;
  g.dy = (y1 - y0) / ny;
  g.alpha.assign(g.count(), 1);
  return g;
}

VoxelData sample_exact(const VoxelGrid& grid, double (*fu)(double, double),
                       double (*fv)(double, double)) {
  VoxelData d;
  d.grid = grid;
  d.values.assign(2 * static_cast<size_t>(grid.count()), 0.0);
  for (int i = 0; i < grid.count(); ++i) {
    if (!grid.alpha[i]) continue;
    const Vec2 c = grid.centroid(i);
    d.values[2 * static_cast<size_t>(i)] = fu(c[0], c[1]);
    d.values[2 * static_cast<size_t>(i) + 1] = fv(c[0], c[1]);
  }
  return d;
}

}  // namespace

TEST_CASE("probe increment follows the capped spacing rule") {
  VoxelGrid coarse = plain_grid(0, 3, 0, 0.6, 15, 3);    // 0.2 cm voxels
  VoxelGrid nine = plain_grid(0, 3, 0, 0.6, 45, 9);      // 0.0667 cm
  VoxelGrid fine = plain_grid(0, 3, 0, 0.6, 140, 28);    // 0.0214 cm
  CHECK(mri_delta(coarse) == doctest::Approx(0.072).epsilon(1e-12));
  CHECK(mri_delta(nine) == doctest::Approx(0.072).epsilon(1e-12));
  CHECK(mri_delta(fine) == doctest::Approx(1.2 * 0.6 / 28).epsilon(1e-12));
}

TEST_CASE("bilinear reconstruction is exact at centroids and averages neighbors") {
  VoxelGrid g = plain_grid(0, 1, 0, 0.75, 4, 3);
  VoxelData d;
  d.grid = g;
  d.values.resize(2 * static_cast<size_t>(g.count()));
  for (int i = 0; i < g.count(); ++i) {
    d.values[2 * static_cast<size_t>(i)] = 1.0 + 0.37 * i;
    d.values[2 * static_cast<size_t>(i) + 1] = -2.0 + 0.11 * i * i;
  }
  for (int i = 0; i < g.count(); ++i) {
    const Vec2 v = bilinear_reconstruct(d, g.centroid(i));
    CHECK(v[0] == doctest::Approx(d.u(i)).epsilon(1e-13));
    CHECK(v[1] == doctest::Approx(d.v(i)).epsilon(1e-13));
  }
  // midpoint of two horizontally adjacent centroids, exactly on their row
  const int i = 1 * g.nx + 1;
  const Vec2 mid{0.5 * (g.cx(1) + g.cx(2)), g.cy(1)};
  const Vec2 v = bilinear_reconstruct(d, mid);
  CHECK(v[0] == doctest::Approx(0.5 * (d.u(i) + d.u(i + 1))).epsilon(1e-13));
  CHECK(v[1] == doctest::Approx(0.5 * (d.v(i) + d.v(i + 1))).epsilon(1e-13));
}

TEST_CASE("bilinear reconstruction reproduces linear fields anywhere") {
  const VoxelGrid g = plain_grid(1.0, 3.0, -0.5, 0.5, 25, 12);
  const VoxelData d = sample_exact(
      g, [](double x, double y) { return 2.0 - 1.3 * x + 0.4 * y; },
      [](double x, double y) { return -0.7 + 0.2 * x + 1.9 * y; });
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(g.cx(0), g.cx(g.nx - 1));
  std::uniform_real_distribution<double> uy(g.cy(0), g.cy(g.ny - 1));
  for (int t = 0; t < 25; ++t) {
    const double x = ux(rng), y = uy(rng);
    const Vec2 v = bilinear_reconstruct(d, {x, y});
    CHECK(v[0] == doctest::Approx(2.0 - 1.3 * x + 0.4 * y).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(-0.7 + 0.2 * x + 1.9 * y).epsilon(1e-12));
  }
}

TEST_CASE("points beyond the centroid lattice clamp instead of extrapolating") {
  const VoxelGrid g = plain_grid(0.0, 2.0, 0.0, 1.0, 10, 5);
  const VoxelData d = sample_exact(
      g, [](double x, double y) { return x + y; },
      [](double x, double) { return 2.0 * x; });
  const Vec2 inside = bilinear_reconstruct(d, {g.cx(g.nx - 1), 0.5});
  const Vec2 outside = bilinear_reconstruct(d, {g.region.x1 + 5.0, 0.5});
  CHECK(outside[0] == doctest::Approx(inside[0]).epsilon(1e-13));
  CHECK(outside[1] == doctest::Approx(inside[1]).epsilon(1e-13));
  const Vec2 corner = bilinear_reconstruct(d, {-3.0, -2.0});
  CHECK(corner[0] == doctest::Approx(d.u(0)).epsilon(1e-13));
}

TEST_CASE("masked-out voxels contribute zero; fully dead cells are an error") {
  VoxelGrid g = plain_grid(0.0, 1.0, 0.0, 1.0, 4, 4);
  // kill a 2x2 block in the upper right
  for (int iy = 2; iy < 4; ++iy)
    for (int ix = 2; ix < 4; ++ix) g.alpha[iy * g.nx + ix] = 0;
  VoxelData d;
  d.grid = g;
  d.values.assign(2 * static_cast<size_t>(g.count()), 0.0);
  for (int i = 0; i < g.count(); ++i)
    if (g.alpha[i]) d.values[2 * static_cast<size_t>(i)] = 5.0;
  CHECK_THROWS_AS(bilinear_reconstruct(d, {g.cx(2) + 0.6 * g.dx, g.cy(2) + 0.6 * g.dy}),
                  std::domain_error);
  // mixed cell: dead corners pull the interpolant toward zero
  const Vec2 v = bilinear_reconstruct(d, {0.5 * (g.cx(1) + g.cx(2)), g.cy(2)});
  CHECK(v[0] == doctest::Approx(2.5).epsilon(1e-13));  // (5 + 0) / 2
}

TEST_CASE("wall derivative recovers the linear coefficient of a quadratic profile") {
  // probes placed exactly on centroid rows so reconstruction is exact there
  const VoxelGrid g = plain_grid(0.0, 2.0, 0.0, 1.0, 20, 10);
  const double y0 = g.cy(8);  // wall station on the lattice
  const double a_u = 3.5, b_u = -1.25, a_v = -0.6, b_v = 0.05;
  VoxelData d;
  d.grid = g;
  d.values.resize(2 * static_cast<size_t>(g.count()));
  for (int i = 0; i < g.count(); ++i) {
    const double r = y0 - g.centroid(i)[1];  // inward distance from the wall
    d.values[2 * static_cast<size_t>(i)] = a_u * r + b_u * r * r;
    d.values[2 * static_cast<size_t>(i) + 1] = a_v * r + b_v * r * r;
  }
  const Vec2 x{g.cx(7), y0};
  const Vec2 n{0.0, 1.0};
  const Vec2 deriv = normal_velocity_derivative(d, x, n, g.dy);
  CHECK(deriv[0] == doctest::Approx(a_u).epsilon(1e-12));
  CHECK(deriv[1] == doctest::Approx(a_v).epsilon(1e-12));

  VoxelData zero = d;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  const Vec2 dz = normal_velocity_derivative(zero, x, n, g.dy);
  CHECK(dz[0] == 0.0);
  CHECK(dz[1] == 0.0);
  CHECK_THROWS(normal_velocity_derivative(d, x, n, 0.0));
}

TEST_CASE("tangential projection ignores the normal part and scales linearly") {
  const double mu = 0.003;
  const Vec2 n{0.6, 0.8};
  const Vec2 d{1.7, -0.4};
  const double base = tangential_traction_magnitude(d, n, mu);
  const Vec2 shifted{d[0] + 3.3 * n[0], d[1] + 3.3 * n[1]};
  CHECK(tangential_traction_magnitude(shifted, n, mu) ==
        doctest::Approx(base).epsilon(1e-12));
  const Vec2 scaled{-2.0 * d[0], -2.0 * d[1]};
  CHECK(tangential_traction_magnitude(scaled, n, mu) ==
        doctest::Approx(2.0 * base).epsilon(1e-12));
  // axis-aligned wall: the magnitude is mu times the tangential derivative
  CHECK(tangential_traction_magnitude({7.0, 123.0}, {0.0, 1.0}, mu) ==
        doctest::Approx(mu * 7.0).epsilon(1e-12));
}

TEST_CASE("parabolic channel data yields the analytic wall shear to a few percent") {
  const ChannelSpec spec = straight_spec();
  const FluidProps props;
  const double theta = reynolds_to_theta(1000.0, spec.diameter(), props);
  const VoxelGrid grid = make_vpd_grid(spec, ScanRegion{}, 15);
  // idealized direct sampling of the exact parabola at voxel centroids
  VoxelData d;
  d.grid = grid;
  d.values.assign(2 * static_cast<size_t>(grid.count()), 0.0);
  for (int i = 0; i < grid.count(); ++i) {
    if (!grid.alpha[i]) continue;
    const double y = grid.centroid(i)[1];
    d.values[2 * static_cast<size_t>(i)] =
        theta * (1.0 - (y / spec.half_width0) * (y / spec.half_width0));
  }
  const double slope = 2.0 * theta / spec.half_width0;  // 1/s, at the wall
  const Vec2 deriv = normal_velocity_derivative(
      d, {3.0, spec.half_width0}, {0.0, 1.0}, mri_delta(grid));
  CHECK(std::abs(deriv[0]) == doctest::Approx(slope).epsilon(0.03));
  CHECK(deriv[0] > 0.0);  // speed grows inward from the no-slip wall
  CHECK(deriv[1] == 0.0);

  // whole profile: uniform and close to the analytic 0.9433 Pa
  const GammaSamples gamma = build_gamma(spec, ScanRegion{}, 200);
  const WssProfile prof = mri_wss_profile(d, gamma, props);
  const double exact = props.dynamic_viscosity() * slope;
  CHECK(exact == doctest::Approx(0.94327044444444444).epsilon(1e-10));
  for (double w : prof.wss) CHECK(w == doctest::Approx(exact).epsilon(0.05));

  // scaling the data scales the profile by the magnitude
  VoxelData neg = d;
  for (auto& v : neg.values) v *= -2.0;
  const WssProfile prof2 = mri_wss_profile(neg, gamma, props);
  for (int k = 0; k < prof.size(); ++k)
    CHECK(prof2.wss[k] == doctest::Approx(2.0 * prof.wss[k]).epsilon(1e-12));

  // zero data, zero profile
  VoxelData zero = d;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  const WssProfile prof0 = mri_wss_profile(zero, gamma, props);
  for (double w : prof0.wss) CHECK(w == 0.0);
}
