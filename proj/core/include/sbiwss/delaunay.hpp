#ifndef SBIWSS_DELAUNAY_HPP
#define SBIWSS_DELAUNAY_HPP

#include <array>
#include <vector>

#include "sbiwss/geometry.hpp"

namespace sbiwss {

// Delaunay triangulation of a planar point set (incremental Bowyer-Watson).
// Returned triangles are CCW and index into the input array.  Near-cocircular
// ties are resolved toward larger insertion cavities, which keeps the result
// valid (possibly trading an exactly-Delaunay sliver) for the well-spread
// point sets the mesher produces.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& pts);

}  // namespace sbiwss

#endif
