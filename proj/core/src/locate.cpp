#include "sbiwss/locate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbiwss/basis.hpp"

namespace sbiwss {

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(mesh) {
  if (mesh.num_nodes() == 0) throw std::invalid_argument("MeshLocator: empty mesh");
  Vec2 lo = mesh.nodes[0], hi = mesh.nodes[0];
  for (const Vec2& p : mesh.nodes) {
    lo[0] = std::min(lo[0], p[0]); lo[1] = std::min(lo[1], p[1]);
    hi[0] = std::max(hi[0], p[0]); hi[1] = std::max(hi[1], p[1]);
  }
  const int target = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_elems()))));
  nx_ = target; ny_ = target;
  x0_ = lo[0]; y0_ = lo[1];
  dx_ = std::max((hi[0] - lo[0]) / nx_, 1e-12);
  dy_ = std::max((hi[1] - lo[1]) / ny_, 1e-12);
  bins_.assign(static_cast<size_t>(nx_) * ny_, {});
  const int nn = mesh.nodes_per_elem();
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* c = mesh.elem(e);
    Vec2 elo = mesh.nodes[c[0]], ehi = elo;
    for (int a = 1; a < nn; ++a) {
      elo[0] = std::min(elo[0], mesh.nodes[c[a]][0]); elo[1] = std::min(elo[1], mesh.nodes[c[a]][1]);
      ehi[0] = std::max(ehi[0], mesh.nodes[c[a]][0]); ehi[1] = std::max(ehi[1], mesh.nodes[c[a]][1]);
    }
    // pad: a cubic edge can bulge slightly past its node bounding box
    const double pad = 0.05 * std::max(ehi[0] - elo[0], ehi[1] - elo[1]);
    const int i0 = std::clamp(static_cast<int>((elo[0] - pad - x0_) / dx_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((ehi[0] + pad - x0_) / dx_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((elo[1] - pad - y0_) / dy_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((ehi[1] + pad - y0_) / dy_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) bins_[static_cast<size_t>(j) * nx_ + i].push_back(e);
  }
}

bool invert_element_map(const Mesh& mesh, int elem, const Vec2& p, Vec2& xi,
                        const Vec2* start) {
  const TriBasis& gb = tri_basis(mesh.p_geo);
  const int nn = gb.size();
  double val[15], gx[15], gy[15];
  const int* c = mesh.elem(elem);
  Vec2 x = start ? *start : Vec2{1.0 / 3.0, 1.0 / 3.0};
  for (int it = 0; it < 20; ++it) {
    gb.eval(x[0], x[1], val);
    gb.eval_grad(x[0], x[1], gx, gy);
    double fx = -p[0], fy = -p[1];
    double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
    for (int a = 0; a < nn; ++a) {
      fx += mesh.nodes[c[a]][0] * val[a];
      fy += mesh.nodes[c[a]][1] * val[a];
      j00 += mesh.nodes[c[a]][0] * gx[a];
      j01 += mesh.nodes[c[a]][0] * gy[a];
      j10 += mesh.nodes[c[a]][1] * gx[a];
      j11 += mesh.nodes[c[a]][1] * gy[a];
    }
    const double det = j00 * j11 - j01 * j10;
    if (std::abs(det) < 1e-30) return false;
    const double sx = (j11 * fx - j01 * fy) / det;
    const double sy = (-j10 * fx + j00 * fy) / det;
    x[0] -= sx; x[1] -= sy;
    // keep the iterate from wandering far outside the reference triangle
    x[0] = std::clamp(x[0], -0.5, 1.5);
    x[1] = std::clamp(x[1], -0.5, 1.5);
    // the step bottoms out near coordinate roundoff, about 1e-13 for
    // points a few units from the origin
    if (std::abs(sx) + std::abs(sy) < 1e-12) {
      xi = x;
      return true;
    }
  }
  return false;
}

bool MeshLocator::invert(int elem, const Vec2& p, Vec2& xi) const {
  return invert_element_map(mesh_, elem, p, xi);
}

namespace {
double margin_of(const Vec2& xi) { return std::min({xi[0], xi[1], 1.0 - xi[0] - xi[1]}); }
}  // namespace

bool MeshLocator::locate(const Vec2& p, int& elem, Vec2& xi, int hint, double slack) const {
  if (hint >= 0 && hint < mesh_.num_elems()) {
    Vec2 x;
    if (invert(hint, p, x) && margin_of(x) >= -slack) {
      elem = hint;
      xi = x;
      return true;
    }
  }
  const int i = std::clamp(static_cast<int>((p[0] - x0_) / dx_), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>((p[1] - y0_) / dy_), 0, ny_ - 1);
  int best = -1;
  Vec2 best_xi = {0.0, 0.0};
  double best_margin = -std::numeric_limits<double>::infinity();
  for (int e : bins_[static_cast<size_t>(j) * nx_ + i]) {
    Vec2 x;
    if (!invert(e, p, x)) continue;
    const double margin = margin_of(x);
    if (margin > best_margin) { best_margin = margin; best = e; best_xi = x; }
    if (margin >= 0.0) break;  // strictly inside, done
  }
  if (best >= 0 && best_margin >= -slack) {
    elem = best;
    xi = best_xi;
    return true;
  }
  // rare fallback: scan everything (probe may sit in a bin its element
  // bounding box missed)
  for (int e = 0; e < mesh_.num_elems(); ++e) {
    Vec2 x;
    if (!invert(e, p, x)) continue;
    if (margin_of(x) >= -slack) {
      elem = e;
      xi = x;
      return true;
    }
  }
  return false;
}

}  // namespace sbiwss
