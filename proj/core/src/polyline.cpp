#include "sbiwss/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sbiwss {

namespace {

double polygon_signed_area(const std::vector<Vec2>& v) {
  double twice = 0.0;
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    twice += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * twice;
}

BoundaryTag parse_tag(const std::string& name) {
  if (name == "wall") return BoundaryTag::Wall;
  if (name == "inflow") return BoundaryTag::Inflow;
  if (name == "outflow") return BoundaryTag::Outflow;
  throw std::invalid_argument("polyline: unknown boundary tag '" + name + "'");
}

}  // namespace

PolylineGeometry::PolylineGeometry(std::vector<Vec2> vertices, std::vector<BoundaryTag> segment_tags)
    : verts_(std::move(vertices)), tags_(std::move(segment_tags)) {
  if (verts_.size() < 3) throw std::invalid_argument("polyline: need at least 3 vertices");
  if (tags_.empty()) tags_.assign(verts_.size(), BoundaryTag::Wall);
  if (tags_.size() != verts_.size())
    throw std::invalid_argument("polyline: one tag per segment required");
  if (polygon_signed_area(verts_) < 0.0) {  // store CCW so outward normals are consistent
    std::reverse(verts_.begin(), verts_.end());
    std::reverse(tags_.begin(), tags_.end());
    std::rotate(tags_.begin(), tags_.end() - 1, tags_.end());
  }
  if (polygon_signed_area(verts_) <= 0.0)
    throw std::invalid_argument("polyline: degenerate polygon (zero area)");
}

PolylineGeometry PolylineGeometry::read(std::istream& in) {
  std::vector<Vec2> pts;
  std::vector<std::array<long, 3>> ranges;  // tag, i0, i1
  std::vector<BoundaryTag> range_tags;
  enum class Section { None, Points, Tags } section = Section::None;

  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "points") { section = Section::Points; continue; }
    if (first == "tags") { section = Section::Tags; continue; }
    if (section == Section::Points) {
      double x = std::stod(first), y;
      if (!(ls >> y)) throw std::invalid_argument("polyline: malformed point line");
      pts.push_back({x, y});
    } else if (section == Section::Tags) {
      long i0, i1;
      if (!(ls >> i0 >> i1)) throw std::invalid_argument("polyline: malformed tag line");
      ranges.push_back({0, i0, i1});
      range_tags.push_back(parse_tag(first));
    } else {
      throw std::invalid_argument("polyline: data before a section header");
    }
  }
  if (pts.size() < 3) throw std::invalid_argument("polyline: need at least 3 vertices");

  std::vector<BoundaryTag> tags(pts.size(), BoundaryTag::Wall);
  const long n = static_cast<long>(pts.size());
  for (size_t r = 0; r < ranges.size(); ++r) {
    long i0 = ranges[r][1], i1 = ranges[r][2];
    if (i0 < 0 || i0 >= n || i1 < 0 || i1 > n)
      throw std::invalid_argument("polyline: tag range out of bounds");
    for (long i = i0; i != i1; i = (i + 1) % n) tags[i] = range_tags[r];
  }
  return PolylineGeometry(std::move(pts), std::move(tags));
}

PolylineGeometry PolylineGeometry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("polyline: cannot open '" + path + "'");
  return read(in);
}

bool PolylineGeometry::inside(const Vec2& p) const {
  if (project(p).distance < 1e-14) return true;
  // even-odd crossing count against the ray x > p.x
  bool in = false;
  const int n = num_vertices();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = verts_[i];
    const Vec2& b = verts_[(i + 1) % n];
    if ((a[1] > p[1]) != (b[1] > p[1])) {
      const double xc = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
      if (xc > p[0]) in = !in;
    }
  }
  return in;
}

PolylineProjection PolylineGeometry::project(const Vec2& p) const {
  PolylineProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  const int n = num_vertices();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = verts_[i];
    const Vec2& b = verts_[(i + 1) % n];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0.0 ? ((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 q = {a[0] + t * ex, a[1] + t * ey};
    const double d = std::hypot(p[0] - q[0], p[1] - q[1]);
    if (d < best.distance) {
      best.distance = d;
      best.point = q;
      best.segment = i;
      best.tag = tags_[i];
      const double len = std::sqrt(len2);
      best.normal = {ey / len, -ex / len};  // right of a CCW walk = outward
    }
  }
  return best;
}

double PolylineGeometry::signed_distance(const Vec2& p) const {
  const double d = project(p).distance;
  return inside(p) ? -d : d;
}

double PolylineGeometry::area() const { return polygon_signed_area(verts_); }

void PolylineGeometry::bounding_box(Vec2& lo, Vec2& hi) const {
  lo = hi = verts_.front();
  for (const Vec2& v : verts_) {
    lo[0] = std::min(lo[0], v[0]); lo[1] = std::min(lo[1], v[1]);
    hi[0] = std::max(hi[0], v[0]); hi[1] = std::max(hi[1], v[1]);
  }
}

}  // namespace sbiwss
