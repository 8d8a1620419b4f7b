#ifndef SBIWSS_MESHING_HPP
#define SBIWSS_MESHING_HPP

//! Force-equilibrated Delaunay meshing (the DistMesh construction): points
//! seeded on a hex lattice inside a signed-distance domain, relaxed by bar
//! forces with retriangulation, boundary points projected back onto the
//! boundary.  Straight meshes can then be elevated to cubic geometry with
//! wall nodes snapped onto the exact boundary curve.

#include <cstdint>
#include <functional>
#include <vector>

#include "sbiwss/geometry.hpp"
#include "sbiwss/mesh.hpp"
#include "sbiwss/polyline.hpp"

namespace sbiwss {

struct ImplicitDomain {
  std::function<double(const Vec2&)> sdf;                   // negative inside
  std::function<BoundaryTag(const Vec2&)> classify;         // nearest boundary part
  std::function<Vec2(const Vec2&, BoundaryTag)> snap;       // exact projection per part
  Vec2 lo{0.0, 0.0}, hi{1.0, 1.0};                          // bounding box
  std::vector<Vec2> fixed;                                  // pinned points (corners)
};

ImplicitDomain make_domain(const ChannelSpec& spec);
ImplicitDomain make_domain(const PolylineGeometry& poly);

struct MeshingOptions {
  double h = 0.1;              // target edge length, cm
  int max_iters = 1200;
  double quality_floor = 0.5;  // minimum radius-ratio accepted
  double dt = 0.2;
  double ttol = 0.1;           // retriangulation threshold (relative to h)
  double fscale = 1.2;         // bar rest-length inflation
  double dptol = 1e-3;         // convergence threshold (relative to h)
};

// Straight (p_geo = 1) mesh of the domain.  Throws std::runtime_error when
// the quality floor is not reached, reporting the achieved quality.
Mesh generate_mesh(const ImplicitDomain& domain, const MeshingOptions& opt);
Mesh generate_mesh(const ChannelSpec& spec, const MeshingOptions& opt);

// Order elevation (p_geo = 2 or 3) with boundary snapping: wall edge nodes are
// projected onto the exact boundary, element-interior nodes blended so curved
// elements stay valid.  Throws if any curved-element Jacobian is non-positive.
Mesh elevate_order(const Mesh& mesh, int p_geo, const ImplicitDomain& domain);
Mesh elevate_order(const Mesh& mesh, int p_geo, const ChannelSpec& spec);

// Domain area of the (possibly curved) mesh by quadrature.
double mesh_area(const Mesh& mesh);

// Calibrated target edge lengths for the default stenotic vessel, chosen to
// land near 368 / 766 / 1590 elements (1 : 2 : 4 ratios).
enum class MeshResolution { Coarse, Medium, Fine };
double calibrated_h(MeshResolution r);
const char* resolution_name(MeshResolution r);

}  // namespace sbiwss

#endif
