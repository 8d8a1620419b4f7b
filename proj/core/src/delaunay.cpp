#include "sbiwss/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace sbiwss {

namespace {

// Incremental Bowyer-Watson on the extended plane: the convex hull is closed
// by symbolic triangles sharing one vertex "at infinity" (kInf), whose
// circumdisk degenerates to the half-plane outside their hull edge.  This
// keeps hull coverage exact even for nearly collinear point chains, whose
// circumcircles grow without bound and would swallow any finite super
// triangle.
constexpr int kInf = -1;

struct Tri {
  int v[3];
  int adj[3];  // neighbor across edge k = (v[k], v[k+1]), -1 only at bootstrap
  bool alive = true;
};

struct EdgeKey {
  int a, b;
  bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

struct EdgeKeyHash {
  size_t operator()(const EdgeKey& k) const {
    return std::hash<long long>()((static_cast<long long>(k.a) << 32) ^ static_cast<unsigned>(k.b));
  }
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
}

double orient_mag(const Vec2& a, const Vec2& b, const Vec2& c) {
  return std::abs(b[0] - a[0]) * std::abs(c[1] - a[1]) +
         std::abs(c[0] - a[0]) * std::abs(b[1] - a[1]);
}

// > 0 when p lies inside the circumcircle of CCW triangle (a, b, c); ties
// (relative magnitude below 1e-12) are counted as inside so a cocircular
// cavity stays connected instead of leaving degenerate rim slivers behind.
bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const double ax = a[0] - p[0], ay = a[1] - p[1];
  const double bx = b[0] - p[0], by = b[1] - p[1];
  const double cx = c[0] - p[0], cy = c[1] - p[1];
  const double a2 = ax * ax + ay * ay;
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
  const double mag = std::abs(ax * by * c2) + std::abs(ax * b2 * cy) + std::abs(ay * bx * c2) +
                     std::abs(ay * b2 * cx) + std::abs(a2 * bx * cy) + std::abs(a2 * by * cx);
  return det > -1e-12 * mag;
}

class Triangulator {
 public:
  explicit Triangulator(const std::vector<Vec2>& input) : n_input_(static_cast<int>(input.size())) {
    pts_ = input;
    // normalize into O(1) coordinates
    Vec2 lo = pts_[0], hi = pts_[0];
    for (const Vec2& p : pts_) {
      lo[0] = std::min(lo[0], p[0]); lo[1] = std::min(lo[1], p[1]);
      hi[0] = std::max(hi[0], p[0]); hi[1] = std::max(hi[1], p[1]);
    }
    const double scale = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-30});
    for (Vec2& p : pts_) p = {(p[0] - lo[0]) / scale, (p[1] - lo[1]) / scale};
  }

  std::vector<std::array<int, 3>> run() {
    int a = 0, b = -1, c = -1;
    for (int j = 1; j < n_input_ && b < 0; ++j)
      if (dist2(pts_[a], pts_[j]) > 1e-26) b = j;
    if (b < 0) throw std::runtime_error("delaunay: all points coincide");
    for (int k = 1; k < n_input_ && c < 0; ++k) {
      if (k == b) continue;
      const double o = orient(pts_[a], pts_[b], pts_[k]);
      if (std::abs(o) > 1e-12 * orient_mag(pts_[a], pts_[b], pts_[k])) c = k;
    }
    if (c < 0) throw std::runtime_error("delaunay: input points are collinear");
    if (orient(pts_[a], pts_[b], pts_[c]) < 0.0) std::swap(b, c);
    bootstrap(a, b, c);
    for (int i = 1; i < n_input_; ++i)
      if (i != b && i != c) insert(i);

    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] == kInf || t.v[1] == kInf || t.v[2] == kInf) continue;
      out.push_back({t.v[0], t.v[1], t.v[2]});
    }
    return out;
  }

 private:
  static double dist2(const Vec2& a, const Vec2& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
  }

  void bootstrap(int a, int b, int c) {
    tris_.push_back({{a, b, c}, {-1, -1, -1}});
    tris_.push_back({{b, a, kInf}, {-1, -1, -1}});
    tris_.push_back({{c, b, kInf}, {-1, -1, -1}});
    tris_.push_back({{a, c, kInf}, {-1, -1, -1}});
    std::unordered_map<EdgeKey, std::pair<int, int>, EdgeKeyHash> open;
    for (int t = 0; t < 4; ++t)
      for (int k = 0; k < 3; ++k) {
        const EdgeKey mine{tris_[t].v[k], tris_[t].v[(k + 1) % 3]};
        const EdgeKey theirs{mine.b, mine.a};
        auto it = open.find(theirs);
        if (it != open.end()) {
          tris_[t].adj[k] = it->second.first;
          tris_[it->second.first].adj[it->second.second] = t;
          open.erase(it);
        } else {
          open.emplace(mine, std::make_pair(t, k));
        }
      }
    hint_ = 0;
  }

  int inf_slot(const Tri& t) const {
    for (int k = 0; k < 3; ++k)
      if (t.v[k] == kInf) return k;
    return -1;
  }

  // circumdisk of an infinite triangle: the open half-plane outside its hull
  // edge; a tie counts only when p projects strictly inside the edge, which
  // is the "new point on an existing hull edge" case and must split it
  bool in_circumdisk(const Tri& t, const Vec2& p) const {
    const int s = inf_slot(t);
    if (s < 0) return in_circumcircle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], p);
    const Vec2& u = pts_[t.v[(s + 1) % 3]];
    const Vec2& w = pts_[t.v[(s + 2) % 3]];
    const double o = orient(u, w, p);
    const double tie = 1e-12 * orient_mag(u, w, p);
    if (o > tie) return true;
    if (o < -tie) return false;
    const double dot = (p[0] - u[0]) * (w[0] - u[0]) + (p[1] - u[1]) * (w[1] - u[1]);
    return dot > 0.0 && dot < dist2(u, w);
  }

  int locate(const Vec2& p) const {
    int cur = hint_;
    if (cur < 0 || cur >= static_cast<int>(tris_.size()) || !tris_[cur].alive ||
        inf_slot(tris_[cur]) >= 0) {
      cur = -1;
      for (int t = static_cast<int>(tris_.size()) - 1; t >= 0; --t)
        if (tris_[t].alive && inf_slot(tris_[t]) < 0) { cur = t; break; }
    }
    const int cap = static_cast<int>(tris_.size()) + 64;
    for (int step = 0; step < cap && cur >= 0; ++step) {
      const Tri& t = tris_[cur];
      if (inf_slot(t) >= 0) return cur;  // walked out of the hull: p is exterior
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        if (orient(pts_[t.v[k]], pts_[t.v[(k + 1) % 3]], p) < 0.0) {
          next = t.adj[k];
          break;
        }
      }
      if (next < 0) return cur;  // inside (or on) this triangle
      cur = next;
    }
    // walk failed (degenerate orientation chain); scan every live triangle
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive || inf_slot(tris_[t]) >= 0) continue;
      const Tri& tr = tris_[t];
      bool ok = true;
      for (int k = 0; k < 3; ++k)
        if (orient(pts_[tr.v[k]], pts_[tr.v[(k + 1) % 3]], p) < -1e-14) { ok = false; break; }
      if (ok) return t;
    }
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      if (tris_[t].alive && inf_slot(tris_[t]) >= 0 && in_circumdisk(tris_[t], p)) return t;
    throw std::runtime_error("delaunay: point location failed");
  }

  void insert(int pi) {
    const Vec2& p = pts_[pi];
    const int seed = locate(p);
    for (int k = 0; k < 3; ++k) {
      const int v = tris_[seed].v[k];
      if (v >= 0 && dist2(pts_[v], p) < 1e-26) return;  // duplicate point
    }

    // grow the cavity of circumdisk violations
    std::vector<int> cavity;
    std::vector<int> stack = {seed};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[seed] = 1;
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      cavity.push_back(ti);
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[ti].adj[k];
        if (nb < 0 || in_cavity[nb]) continue;
        if (in_circumdisk(tris_[nb], p)) {
          in_cavity[nb] = 1;
          stack.push_back(nb);
        }
      }
    }

    // boundary edges of the cavity, walked in cavity order
    struct Rim { int a, b, outer; };
    std::vector<Rim> rim;
    for (int ti : cavity) {
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[ti].adj[k];
        if (nb >= 0 && in_cavity[nb]) continue;
        rim.push_back({tris_[ti].v[k], tris_[ti].v[(k + 1) % 3], nb});
      }
    }
    for (int ti : cavity) tris_[ti].alive = false;

    // one new triangle per rim edge; stitch neighbors through an edge map
    std::unordered_map<EdgeKey, std::pair<int, int>, EdgeKeyHash> open;  // (tri, local edge)
    open.reserve(rim.size() * 2);
    int first_new_finite = -1;
    for (const Rim& e : rim) {
      Tri nt;
      nt.v[0] = e.a; nt.v[1] = e.b; nt.v[2] = pi;
      nt.adj[0] = e.outer; nt.adj[1] = nt.adj[2] = -1;
      const int id = static_cast<int>(tris_.size());
      if (first_new_finite < 0 && e.a != kInf && e.b != kInf) first_new_finite = id;
      if (e.outer >= 0) {
        Tri& ot = tris_[e.outer];
        for (int k = 0; k < 3; ++k)
          if ((ot.v[k] == e.b && ot.v[(k + 1) % 3] == e.a)) ot.adj[k] = id;
      }
      for (int k = 1; k < 3; ++k) {
        const int va = nt.v[k], vb = nt.v[(k + 1) % 3];
        const EdgeKey mine{va, vb}, theirs{vb, va};
        auto it = open.find(theirs);
        if (it != open.end()) {
          nt.adj[k] = it->second.first;
          tris_[it->second.first].adj[it->second.second] = id;
          open.erase(it);
        } else {
          open.emplace(mine, std::make_pair(id, k));
        }
      }
      tris_.push_back(nt);
    }
    if (!open.empty()) throw std::runtime_error("delaunay: cavity rim failed to close");
    hint_ = first_new_finite;
  }

  int n_input_;
  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  int hint_ = 0;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& pts) {
  if (pts.size() < 3) throw std::invalid_argument("delaunay: need at least 3 points");
  return Triangulator(pts).run();
}

}  // namespace sbiwss
