#ifndef SBIWSS_POLYLINE_HPP
#define SBIWSS_POLYLINE_HPP

//! Boundary-sampled geometry: a closed polygon read from plain text.
//!
//! File format, line oriented, '#' starts a comment:
//!
//!   points
//!   <x> <y>            one vertex per line, loop closed implicitly
//!   ...
//!   tags
//!   <name> <i0> <i1>   segments i0 .. i1-1 (vertex i -> i+1, cyclic) carry
//!   ...                the tag; names: wall, inflow, outflow
//!
//! A missing tags section marks every segment as wall.

#include <iosfwd>
#include <string>
#include <vector>

#include "sbiwss/geometry.hpp"

namespace sbiwss {

struct PolylineProjection {
  Vec2 point;
  Vec2 normal;      // unit outward
  int segment = 0;
  BoundaryTag tag = BoundaryTag::Wall;
  double distance = 0.0;
};

class PolylineGeometry {
 public:
  PolylineGeometry() = default;
  PolylineGeometry(std::vector<Vec2> vertices, std::vector<BoundaryTag> segment_tags);

  static PolylineGeometry read(std::istream& in);
  static PolylineGeometry load(const std::string& path);

  int num_vertices() const { return static_cast<int>(verts_.size()); }
  const std::vector<Vec2>& vertices() const { return verts_; }
  BoundaryTag segment_tag(int seg) const { return tags_[seg]; }

  bool inside(const Vec2& p) const;           // boundary counts as inside
  double signed_distance(const Vec2& p) const;
  PolylineProjection project(const Vec2& p) const;

  double area() const;                        // positive (vertices stored CCW)
  void bounding_box(Vec2& lo, Vec2& hi) const;

 private:
  std::vector<Vec2> verts_;
  std::vector<BoundaryTag> tags_;  // one per segment i -> i+1
};

}  // namespace sbiwss

#endif
