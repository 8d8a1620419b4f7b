#ifndef SBIWSS_MRI_WSS_HPP
#define SBIWSS_MRI_WSS_HPP

//! Wall shear stress directly from voxel data, the clinical-postprocessing
//! route: bilinear reconstruction of the voxel velocities, a quadratic fit of
//! the velocity along the inward wall normal through zero at the wall, and
//! the tangential projection of its one-sided derivative.

#include "sbiwss/units.hpp"
#include "sbiwss/voxels.hpp"
#include "sbiwss/wss_profile.hpp"

namespace sbiwss {

// Probe increment: 1.2 * min(dx, dy, 0.06 cm).  The cap keeps coarse grids
// from probing deeper than a tenth of the diameter.
double mri_delta(const VoxelGrid& grid);

// Bilinear interpolation on the 2x2 voxel-centroid cell containing p; exact
// at centroids.  Points outside the centroid lattice are clamped onto it, so
// values are never extrapolated.  Masked-out corners contribute zero (their
// stored value); a cell with all four corners masked out throws.
Vec2 bilinear_reconstruct(const VoxelData& data, const Vec2& p);

// Derivative at the wall of the quadratic through (0, 0), (delta, v(x -
// delta n)) and (2 delta, v(x - 2 delta n)), where distance runs inward
// along -n: (2/delta) v1 - (1/(2 delta)) v2.
Vec2 normal_velocity_derivative(const VoxelData& data, const Vec2& x,
                                const Vec2& n, double delta);

// Magnitude of mu (I - n n^T) deriv, the tangential part of the one-sided
// traction estimate.  Adding any multiple of n to deriv cannot change it.
double tangential_traction_magnitude(const Vec2& deriv, const Vec2& n,
                                     double mu);

// Full profile at the given wall stations (exact geometry points/normals).
WssProfile mri_wss_profile(const VoxelData& data, const GammaSamples& gamma,
                           const FluidProps& props);

}  // namespace sbiwss

#endif
