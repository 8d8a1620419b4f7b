#ifndef SBIWSS_PSF_HPP
#define SBIWSS_PSF_HPP

//! The voxel point-spread operator: each voxel observes a weighted average
//! of the velocity field, the weight being a normalized tensor product of a
//! sinc (zeros at integer voxel offsets) with a smoothed box of width four
//! voxels.  The box's nominal edge coincides with the sinc's second zero, so
//! truncating the support at +-2 voxels per direction keeps the weight
//! continuous (though not smooth, which is why quadrature panels end there).
//!
//! Weights are integrated element by element over the FE mesh.  Within one
//! element both the velocity and the weight are smooth except where a
//! support edge cuts through, and every voxel's support edges lie on the
//! lattice of voxel-center lines.  Each element is therefore decomposed
//! into columns: x-panels split at corner stations, center lines, and the
//! points where an element edge crosses a horizontal center line, then
//! y-panels between center lines.  The integrand is smooth inside every
//! panel and the tensor Gauss rule converges spectrally in quad_order.
//! The result is a sparse matrix over scalar velocity dofs; voxels whose
//! support barely intersects the domain are dropped from the mask.

#include <Eigen/Sparse>

#include <vector>

#include "sbiwss/flow_solution.hpp"
#include "sbiwss/mesh.hpp"
#include "sbiwss/voxels.hpp"

namespace sbiwss {

// sin(pi z) / (pi z), with the removable singularity filled in.
double psf_sinc(double z);

// Difference of two logistics: approximately 1 inside
// [s0 - omega/2, s0 + omega/2], 0 outside, transitions of scale gamma.
double smoothed_box(double s, double s0, double omega, double gamma);

// Smoothness parameter tied to the grid: 0.1 * min(dx, dy).
double psf_smoothness(const VoxelGrid& grid);

// Unnormalized weight of one voxel at a point: Psi(x, X_i, dx) *
// Psi(y, Y_i, dy) with Psi(s, c, ds) = sinc((s-c)/ds) * box(s, c, 4 ds),
// truncated to zero outside the +-2 voxel support.
double psf_weight_raw(const VoxelGrid& grid, int voxel, const Vec2& p);

class PsfOperator {
 public:
  // quad_order is the 1D Gauss order per panel; quad_subdiv splits each
  // panel into that many pieces per axis.  The defaults put interior-voxel
  // normalization errors far below 1e-6; raising quad_order is the
  // convergence knob.
  PsfOperator(const Mesh& mesh, const VoxelGrid& grid, int quad_order = 18,
              int quad_subdiv = 1);

  // Grid with the mask after the drop rule (normalization below
  // 1e-6 * dx * dy means the voxel support barely touches the domain).
  const VoxelGrid& grid() const { return grid_; }

  // Row-normalized weight matrix, count() x num_nodes; unmasked voxels have
  // empty rows.  Applying it to a scalar dof vector yields all voxel
  // averages of that component.
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& weights() const {
    return w_;
  }

  // Voxel averages of both velocity components of a flow state on the same
  // mesh the operator was built for.
  VoxelData apply(const FlowSolution& sol) const;

  // Raw normalization integral of one voxel's weight over the channel.
  double normalization(int voxel) const { return z_[voxel]; }

 private:
  VoxelGrid grid_;
  int n_nodes_ = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> w_;
  std::vector<double> z_;
};

}  // namespace sbiwss

#endif
