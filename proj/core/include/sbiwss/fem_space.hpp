#ifndef SBIWSS_FEM_SPACE_HPP
#define SBIWSS_FEM_SPACE_HPP

//! Taylor-Hood function space on a curved (p_geo = 3) mesh: cubic velocity
//! components collocated with the geometry nodes, quadratic pressure on
//! vertices plus one dof per unique edge.  Global dof layout of a state
//! vector is [u_x | u_y | p].

#include <vector>

#include "sbiwss/mesh.hpp"
#include "sbiwss/quadrature.hpp"

namespace sbiwss {

struct FlowSpace {
  const Mesh* mesh = nullptr;
  int n_vel = 0;              // scalar velocity dofs, one per mesh node
  int n_pre = 0;              // pressure dofs: vertices + unique edges
  std::vector<int> pre_conn;  // 6 per element: v0 v1 v2, then edge 01 12 20

  int n_total() const { return 2 * n_vel + n_pre; }
  int ux(int node) const { return node; }
  int uy(int node) const { return n_vel + node; }
  int pr(int dof) const { return 2 * n_vel + dof; }
};

// Requires mesh.p_geo == 3 (throws otherwise).
FlowSpace make_flow_space(const Mesh& mesh);

// Strong boundary conditions: homogeneous on walls, a parabolic profile
// u_x(y) = theta * 4 (y - lo)(hi - y) / (hi - lo)^2 on the inflow (so theta
// is the centerline speed), nothing on the outflow.  Wall membership wins
// at corners.  inflow_shape holds the profile factor per inflow node, so the
// boundary value is theta * inflow_shape[i].
struct FlowBC {
  std::vector<int> wall_nodes;
  std::vector<int> inflow_nodes;
  std::vector<double> inflow_shape;
  double y_lo = 0.0, y_hi = 0.0;  // inflow span
};

FlowBC make_flow_bc(const Mesh& mesh);

// Per-element quadrature data for the isoparametric map: integration weights
// times Jacobian determinant and physical gradients of the velocity shapes.
// Reference-space shape values are shared across elements.
struct ElementQuad {
  std::vector<double> wdet;      // nq
  std::vector<double> dvx, dvy;  // nq * 10, gradient of velocity shape a at q
};

struct FlowQuadCache {
  TriQuadRule rule;
  std::vector<double> vel_val;  // nq * 10
  std::vector<double> pre_val;  // nq * 6
  std::vector<ElementQuad> elems;
};

// order is the tensor order of the collapsed triangle rule.
FlowQuadCache build_quad_cache(const Mesh& mesh, int order = 6);

}  // namespace sbiwss

#endif
