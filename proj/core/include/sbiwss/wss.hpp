#ifndef SBIWSS_WSS_HPP
#define SBIWSS_WSS_HPP

//! Wall shear stress extraction from a converged flow state.  Each requested
//! arc-length station on the analytic wall is snapped to the nearest point of
//! the discrete (cubic) wall, where two estimators are evaluated: the
//! tangential component of the full traction 2 mu eps(u) n - p n, and the
//! velocity-gradient shortcut mu (I - n n^T) (grad u) n used by voxel-based
//! postprocessing.  On the discrete no-slip wall the two agree identically;
//! they differ only off the wall or under interpolation error.

#include <vector>

#include "sbiwss/flow_solution.hpp"
#include "sbiwss/geometry.hpp"

namespace sbiwss {

struct WallSample {
  double s = 0.0;   // arc length along the analytic wall, from x_min
  Vec2 point;       // snapped point on the discrete wall
  Vec2 normal;      // unit outward, from the discrete edge geometry
  Vec2 tangent;     // unit, oriented with increasing x
  double wss_full = 0.0;      // Pa
  double wss_shortcut = 0.0;  // Pa
  double pressure = 0.0;      // Pa
};

// Samples along one wall of the channel at the given arc lengths.  The
// solution must live on a curved mesh of the same channel.  Both estimators
// are signed as the force the fluid exerts on the wall along the +x tangent,
// so attached forward flow is positive and recirculation is negative.
std::vector<WallSample> compute_wss(const FlowSolution& sol,
                                    const ChannelSpec& spec, WallSide side,
                                    const std::vector<double>& arcs);

}  // namespace sbiwss

#endif
