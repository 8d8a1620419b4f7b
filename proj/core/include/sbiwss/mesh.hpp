#ifndef SBIWSS_MESH_HPP
#define SBIWSS_MESH_HPP

//! Unstructured triangle mesh, straight (p_geo = 1) or curved (p_geo = 3).
//!
//! Local node order per element:
//!   p = 1:  v0 v1 v2
//!   p = 2:  v0 v1 v2 | e01 | e12 | e20
//!   p = 3:  v0 v1 v2 | e01a e01b | e12a e12b | e20a e20b | center
//! Edge k runs from vertex k to vertex (k+1) % 3; edge nodes are listed in
//! that direction.  Vertices are stored first in the global node array
//! (ids [0, num_vertices)), then edge nodes, then element-interior nodes.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbiwss/geometry.hpp"

namespace sbiwss {

struct BoundaryFace {
  int elem = 0;
  int edge = 0;  // local edge index 0..2
  BoundaryTag tag = BoundaryTag::Wall;
};

struct Mesh {
  int p_geo = 1;
  int num_vertices = 0;
  std::vector<Vec2> nodes;
  std::vector<int> conn;  // num_elems * nodes_per_elem
  std::vector<BoundaryFace> boundary;

  int nodes_per_elem() const { return (p_geo + 1) * (p_geo + 2) / 2; }
  int num_elems() const {
    return conn.empty() ? 0 : static_cast<int>(conn.size()) / nodes_per_elem();
  }
  int num_nodes() const { return static_cast<int>(nodes.size()); }

  const int* elem(int e) const { return conn.data() + static_cast<size_t>(e) * nodes_per_elem(); }

  // Local node indices along local edge k, endpoints included, edge order.
  std::vector<int> edge_local_nodes(int edge) const;

  // Vertex-triangle signed area (positive for CCW storage).
  double vertex_area(int e) const;

  // Radius-ratio quality of the vertex triangle, 1 = equilateral.
  double quality(int e) const;
  double min_quality() const;

  // Structural checks: connectivity in range, positive vertex areas,
  // boundary faces valid.  Throws std::runtime_error on violation.
  void validate() const;
};

std::string tag_name(BoundaryTag tag);
BoundaryTag tag_from_name(const std::string& name);

// Plain-text serialization, lossless (17 significant digits).
void write_mesh(std::ostream& out, const Mesh& mesh);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
Mesh load_mesh(const std::string& path);

}  // namespace sbiwss

#endif
