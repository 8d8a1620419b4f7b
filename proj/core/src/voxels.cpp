#include "sbiwss/voxels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sbiwss {

namespace {

// largest half-width over [a, b]: the profile is unimodal with its minimum
// at the bump center, so the maximum is at an endpoint
double max_half_width(const ChannelSpec& spec, double a, double b) {
  return std::max(half_width(spec, a), half_width(spec, b));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double to_unit(std::uint64_t bits) {
  // (0, 1], so the log in Box-Muller is always finite
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

VoxelGrid make_voxel_grid(const ScanRegion& region, int nx, int ny,
                          const ChannelSpec& spec) {
  if (nx <= 0 || ny <= 0)
    throw std::invalid_argument("make_voxel_grid: counts must be positive");
  if (region.x1 <= region.x0 || region.y1 <= region.y0)
    throw std::invalid_argument("make_voxel_grid: empty region");
  VoxelGrid grid;
  grid.region = region;
  grid.nx = nx;
  grid.ny = ny;
  grid.dx = (region.x1 - region.x0) / nx;
  grid.dy = (region.y1 - region.y0) / ny;
  grid.alpha.assign(static_cast<size_t>(nx) * ny, 0);

  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double xa = std::max(grid.cx(ix) - 0.5 * grid.dx, spec.x_min);
      const double xb = std::min(grid.cx(ix) + 0.5 * grid.dx, spec.x_max);
      if (xa > xb) continue;  // no x-overlap with the channel
      // the domain slab over [xa, xb] is |y| <= max half-width there
      const double hw = max_half_width(spec, xa, xb);
      const double ya = grid.cy(iy) - 0.5 * grid.dy;
      const double yb = grid.cy(iy) + 0.5 * grid.dy;
      if (ya <= hw && yb >= -hw)
        grid.alpha[static_cast<size_t>(iy) * nx + ix] = 1;
    }
  return grid;
}

VoxelGrid make_vpd_grid(const ChannelSpec& spec, const ScanRegion& region,
                        int vpd) {
  if (vpd <= 0) throw std::invalid_argument("make_vpd_grid: vpd must be positive");
  const double target = spec.diameter() / vpd;
  const int nx = std::max(1, static_cast<int>(std::lround((region.x1 - region.x0) / target)));
  const int ny = std::max(1, static_cast<int>(std::lround((region.y1 - region.y0) / target)));
  return make_voxel_grid(region, nx, ny, spec);
}

VoxelData add_noise(const VoxelData& clean, double kappa, std::uint64_t seed,
                    double peak_speed) {
  if (kappa < 0.0) throw std::invalid_argument("add_noise: negative noise level");
  VoxelData out = clean;
  out.kappa = kappa;
  out.seed = seed;
  if (kappa == 0.0) {
    out.noisy = false;
    return out;
  }
  out.noisy = true;
  const double sigma = kappa * peak_speed;
  const std::uint64_t base = splitmix64(seed ^ 0x5bf0f5e2a9d3c84dULL);
  for (int i = 0; i < clean.grid.count(); ++i) {
    if (!clean.grid.alpha[i]) continue;
    for (int c = 0; c < 2; ++c) {
      const std::uint64_t k =
          splitmix64(base ^ (2ULL * static_cast<std::uint64_t>(i) + c));
      const std::uint64_t a = splitmix64(k);
      const std::uint64_t b = splitmix64(a);
      const double r = std::sqrt(-2.0 * std::log(to_unit(a)));
      const double z = r * std::cos(2.0 * M_PI * to_unit(b));
      out.values[2 * static_cast<size_t>(i) + c] += sigma * z;
    }
  }
  return out;
}

void write_voxel_data(std::ostream& out, const VoxelData& data) {
  const VoxelGrid& g = data.grid;
  out << "voxels " << g.nx << ' ' << g.ny << '\n';
  out.precision(17);
  out << "region " << g.region.x0 << ' ' << g.region.x1 << ' ' << g.region.y0
      << ' ' << g.region.y1 << '\n';
  out << "kappa " << data.kappa << '\n';
  out << "seed " << data.seed << ' ' << (data.noisy ? 1 : 0) << '\n';
  out << "alpha";
  for (char a : g.alpha) out << ' ' << static_cast<int>(a);
  out << "\nvalues\n";
  for (int i = 0; i < g.count(); ++i)
    out << data.u(i) << ' ' << data.v(i) << '\n';
}

void save_voxel_data(const std::string& path, const VoxelData& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_voxel_data(out, data);
}

VoxelData read_voxel_data(std::istream& in) {
  auto expect = [&in](const char* word) {
    std::string tok;
    if (!(in >> tok) || tok != word)
      throw std::runtime_error(std::string("voxel data: expected ") + word);
  };
  VoxelData data;
  VoxelGrid& g = data.grid;
  expect("voxels");
  in >> g.nx >> g.ny;
  expect("region");
  in >> g.region.x0 >> g.region.x1 >> g.region.y0 >> g.region.y1;
  g.dx = (g.region.x1 - g.region.x0) / g.nx;
  g.dy = (g.region.y1 - g.region.y0) / g.ny;
  expect("kappa");
  in >> data.kappa;
  expect("seed");
  int noisy = 0;
  in >> data.seed >> noisy;
  data.noisy = noisy != 0;
  expect("alpha");
  g.alpha.resize(static_cast<size_t>(g.nx) * g.ny);
  for (char& a : g.alpha) {
    int v;
    in >> v;
    a = static_cast<char>(v);
  }
  expect("values");
  data.values.resize(2 * static_cast<size_t>(g.count()));
  for (double& v : data.values) in >> v;
  if (!in) throw std::runtime_error("voxel data: truncated stream");
  return data;
}

VoxelData load_voxel_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_voxel_data(in);
}

void export_voxel_csv(std::ostream& out, const VoxelData& data) {
  out << "x,y,u,v,alpha\n";
  out.precision(17);
  for (int i = 0; i < data.grid.count(); ++i) {
    const Vec2 c = data.grid.centroid(i);
    out << c[0] << ',' << c[1] << ',' << data.u(i) << ',' << data.v(i) << ','
        << static_cast<int>(data.grid.alpha[i]) << '\n';
  }
}

}  // namespace sbiwss
