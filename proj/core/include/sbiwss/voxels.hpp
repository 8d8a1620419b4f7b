#ifndef SBIWSS_VOXELS_HPP
#define SBIWSS_VOXELS_HPP

//! Cartesian voxel grids over a rectangular scan region, and the synthetic
//! velocity data living on them.  Voxels are ordered row-major, index
//! i = iy * nx + ix, with centroids on a uniform lattice.  The mask alpha
//! marks voxels whose rectangle intersects the flow domain; only masked
//! voxels carry data.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbiwss/geometry.hpp"

namespace sbiwss {

struct ScanRegion {
  double x0 = 1.5, x1 = 4.5;
  double y0 = -0.3, y1 = 0.3;
};

struct VoxelGrid {
  ScanRegion region;
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;
  std::vector<char> alpha;  // nx * ny, row-major

  int count() const { return nx * ny; }
  double cx(int ix) const { return region.x0 + (ix + 0.5) * dx; }
  double cy(int iy) const { return region.y0 + (iy + 0.5) * dy; }
  Vec2 centroid(int i) const { return {cx(i % nx), cy(i / nx)}; }
  // voxels per diameter, the resolution measure used throughout
  double vpd(double diameter) const { return diameter / dy; }
};

// Grid with the given voxel counts; spacings tile the region exactly.  The
// mask is exact for the channel geometry: a voxel is kept iff its rectangle
// intersects the domain (the half-width is unimodal, so the interval maximum
// sits at an endpoint).
VoxelGrid make_voxel_grid(const ScanRegion& region, int nx, int ny,
                          const ChannelSpec& spec);

// Square voxels sized so that the vessel diameter spans vpd voxels
// (dy = diameter / vpd); counts are rounded to tile the region.
VoxelGrid make_vpd_grid(const ChannelSpec& spec, const ScanRegion& region,
                        int vpd);

struct VoxelData {
  VoxelGrid grid;
  std::vector<double> values;  // 2 per voxel (u, v), cm/s; zero if unmasked
  double kappa = 0.0;          // noise level used, fraction of peak speed
  std::uint64_t seed = 0;      // RNG seed; meaningful only when noisy
  bool noisy = false;

  double u(int i) const { return values[2 * static_cast<size_t>(i)]; }
  double v(int i) const { return values[2 * static_cast<size_t>(i) + 1]; }
};

// Adds i.i.d. per-component Gaussian noise of standard deviation
// kappa * peak_speed to every masked voxel.  Draws are keyed by
// (seed, voxel, component) with a counter-based generator, so results do not
// depend on evaluation order.  kappa = 0 returns the input bit-exactly.
VoxelData add_noise(const VoxelData& clean, double kappa, std::uint64_t seed,
                    double peak_speed);

void write_voxel_data(std::ostream& out, const VoxelData& data);
void save_voxel_data(const std::string& path, const VoxelData& data);
VoxelData read_voxel_data(std::istream& in);
VoxelData load_voxel_data(const std::string& path);

// Plot-friendly export: header then one `x,y,u,v,alpha` row per voxel.
void export_voxel_csv(std::ostream& out, const VoxelData& data);

}  // namespace sbiwss

#endif
