#ifndef SBIWSS_LOCATE_HPP
#define SBIWSS_LOCATE_HPP

//! Point location in a (possibly curved) triangle mesh.
//!
//! A uniform bin grid over element bounding boxes narrows the candidate
//! list; the reference coordinates are then recovered per element with a
//! Newton inversion of the geometric map.

#include <vector>

#include "sbiwss/mesh.hpp"

namespace sbiwss {

// Newton inversion of one element's geometric map.  Returns false when the
// iteration fails to converge (degenerate Jacobian or point far away); xi
// may land outside the reference triangle, which the caller judges via its
// margin.  `start` seeds the iteration (element centroid when null), which
// pays off when sweeping over nearby points.
bool invert_element_map(const Mesh& mesh, int elem, const Vec2& p, Vec2& xi,
                        const Vec2* start = nullptr);

class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);

  bool invert(int elem, const Vec2& p, Vec2& xi) const;

  // Finds the element containing p.  Points up to `slack` outside the
  // reference triangle (in barycentric margin) are accepted, which tolerates
  // probes on a curved boundary edge.  `hint` is tried first and makes
  // sweeps over nearby points cheap.  Returns false when no element accepts
  // the point.
  bool locate(const Vec2& p, int& elem, Vec2& xi, int hint = -1, double slack = 1e-9) const;

 private:
  const Mesh& mesh_;
  std::vector<std::vector<int>> bins_;
  int nx_ = 1, ny_ = 1;
  double x0_ = 0.0, y0_ = 0.0, dx_ = 1.0, dy_ = 1.0;
};

}  // namespace sbiwss

#endif
