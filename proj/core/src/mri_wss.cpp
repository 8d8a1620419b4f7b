#include "sbiwss/mri_wss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbiwss {

double mri_delta(const VoxelGrid& grid) {
  return 1.2 * std::min({grid.dx, grid.dy, 0.06});
}

Vec2 bilinear_reconstruct(const VoxelData& data, const Vec2& p) {
  const VoxelGrid& g = data.grid;
  if (g.nx < 2 || g.ny < 2)
    throw std::invalid_argument("bilinear_reconstruct: grid too small");
  const double px = std::clamp(p[0], g.cx(0), g.cx(g.nx - 1));
  const double py = std::clamp(p[1], g.cy(0), g.cy(g.ny - 1));
  const double qx = (px - g.region.x0) / g.dx - 0.5;
  const double qy = (py - g.region.y0) / g.dy - 0.5;
  const int ix = std::clamp(static_cast<int>(std::floor(qx)), 0, g.nx - 2);
  const int iy = std::clamp(static_cast<int>(std::floor(qy)), 0, g.ny - 2);
  const double tx = std::clamp(qx - ix, 0.0, 1.0);
  const double ty = std::clamp(qy - iy, 0.0, 1.0);
  const int i00 = iy * g.nx + ix;
  const int i10 = i00 + 1;
  const int i01 = i00 + g.nx;
  const int i11 = i01 + 1;
  if (!g.alpha[i00] && !g.alpha[i10] && !g.alpha[i01] && !g.alpha[i11])
    throw std::domain_error("bilinear_reconstruct: all four voxels around (" +
                            std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                            ") are masked out");
  const double w00 = (1.0 - tx) * (1.0 - ty), w10 = tx * (1.0 - ty);
  const double w01 = (1.0 - tx) * ty, w11 = tx * ty;
  return {w00 * data.u(i00) + w10 * data.u(i10) + w01 * data.u(i01) +
              w11 * data.u(i11),
          w00 * data.v(i00) + w10 * data.v(i10) + w01 * data.v(i01) +
              w11 * data.v(i11)};
}

Vec2 normal_velocity_derivative(const VoxelData& data, const Vec2& x,
                                const Vec2& n, double delta) {
  if (delta <= 0.0)
    throw std::invalid_argument("normal_velocity_derivative: delta must be positive");
  Vec2 v1, v2;
  try {
    v1 = bilinear_reconstruct(data, {x[0] - delta * n[0], x[1] - delta * n[1]});
  } catch (const std::domain_error& e) {
    throw std::runtime_error(std::string("first probe (one delta inward) failed: ") +
                             e.what());
  }
  try {
    v2 = bilinear_reconstruct(
        data, {x[0] - 2.0 * delta * n[0], x[1] - 2.0 * delta * n[1]});
  } catch (const std::domain_error& e) {
    throw std::runtime_error(std::string("second probe (two deltas inward) failed: ") +
                             e.what());
  }
  return {(2.0 / delta) * v1[0] - (0.5 / delta) * v2[0],
          (2.0 / delta) * v1[1] - (0.5 / delta) * v2[1]};
}

double tangential_traction_magnitude(const Vec2& deriv, const Vec2& n,
                                     double mu) {
  const double dn = deriv[0] * n[0] + deriv[1] * n[1];
  const double tx = deriv[0] - dn * n[0];
  const double ty = deriv[1] - dn * n[1];
  return mu * std::hypot(tx, ty);
}

WssProfile mri_wss_profile(const VoxelData& data, const GammaSamples& gamma,
                           const FluidProps& props) {
  const double delta = mri_delta(data.grid);
  const double mu = props.dynamic_viscosity();
  WssProfile p;
  p.method = WssMethod::Mri;
  p.side = gamma.side;
  p.s = gamma.s;
  p.point = gamma.point;
  p.normal = gamma.normal;
  p.wss.resize(gamma.s.size());
  for (int k = 0; k < gamma.size(); ++k) {
    const Vec2 d =
        normal_velocity_derivative(data, gamma.point[k], gamma.normal[k], delta);
    p.wss[k] = tangential_traction_magnitude(d, gamma.normal[k], mu);
  }
  return p;
}

}  // namespace sbiwss
