#ifndef SBIWSS_WSS_PROFILE_HPP
#define SBIWSS_WSS_PROFILE_HPP

//! Wall shear stress magnitudes along a fixed set of wall stations, tagged by
//! the method that produced them.  All three reconstruction routes (truth
//! solve, direct voxel postprocessing, fitted simulation) report onto the
//! same station set so profiles can be compared pointwise and in norm.

#include <iosfwd>
#include <vector>

#include "sbiwss/geometry.hpp"
#include "sbiwss/wss.hpp"

namespace sbiwss {

enum class WssMethod { Truth, Mri, Sbi };

const char* wss_method_name(WssMethod method);

// Stations along one wall, uniform in arc length; s is measured along the
// wall from x = x_min, points and normals come from the exact geometry.
struct GammaSamples {
  WallSide side = WallSide::Top;
  std::vector<double> s;
  std::vector<Vec2> point;
  std::vector<Vec2> normal;

  int size() const { return static_cast<int>(s.size()); }
};

struct WssProfile {
  WssMethod method = WssMethod::Truth;
  WallSide side = WallSide::Top;
  std::vector<double> s;
  std::vector<Vec2> point;
  std::vector<Vec2> normal;
  std::vector<double> wss;  // Pa, magnitudes

  int size() const { return static_cast<int>(s.size()); }
};

// Profile from FE wall samples; keeps |wss_full| (the paper's sigma is a
// norm, so profiles are unsigned).
WssProfile profile_from_wall_samples(const std::vector<WallSample>& samples,
                                     WallSide side, WssMethod method);

// Header then one `s,x,y,nx,ny,wss,method` row per station.
void export_wss_csv(std::ostream& out, const WssProfile& profile);

}  // namespace sbiwss

#endif
