#include "sbiwss/fem_space.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "sbiwss/basis.hpp"

namespace sbiwss {

FlowSpace make_flow_space(const Mesh& mesh) {
  if (mesh.p_geo != 3)
    throw std::invalid_argument("make_flow_space: needs a cubic-geometry mesh");
  FlowSpace sp;
  sp.mesh = &mesh;
  sp.n_vel = mesh.num_nodes();

  std::map<std::pair<int, int>, int> edge_dof;
  sp.pre_conn.reserve(static_cast<size_t>(mesh.num_elems()) * 6);
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* c = mesh.elem(e);
    for (int k = 0; k < 3; ++k) sp.pre_conn.push_back(c[k]);
    for (int k = 0; k < 3; ++k) {
      const int a = c[k], b = c[(k + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, fresh] = edge_dof.try_emplace({key.first, key.second},
                                              mesh.num_vertices + static_cast<int>(edge_dof.size()));
      sp.pre_conn.push_back(it->second);
    }
  }
  sp.n_pre = mesh.num_vertices + static_cast<int>(edge_dof.size());
  return sp;
}

FlowBC make_flow_bc(const Mesh& mesh) {
  std::set<int> wall, inflow;
  for (const BoundaryFace& f : mesh.boundary) {
    if (f.tag == BoundaryTag::Outflow) continue;
    std::set<int>& dst = (f.tag == BoundaryTag::Wall) ? wall : inflow;
    for (int l : mesh.edge_local_nodes(f.edge)) dst.insert(mesh.elem(f.elem)[l]);
  }
  FlowBC bc;
  bc.wall_nodes.assign(wall.begin(), wall.end());
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (int n : inflow) {
    const double y = mesh.nodes[n][1];
    lo = first ? y : std::min(lo, y);
    hi = first ? y : std::max(hi, y);
    first = false;
  }
  bc.y_lo = lo;
  bc.y_hi = hi;
  const double span = hi - lo;
  for (int n : inflow) {
    if (wall.count(n)) continue;  // corners stay no-slip
    bc.inflow_nodes.push_back(n);
    const double y = mesh.nodes[n][1];
    bc.inflow_shape.push_back(span > 0.0 ? 4.0 * (y - lo) * (hi - y) / (span * span) : 0.0);
  }
  return bc;
}

FlowQuadCache build_quad_cache(const Mesh& mesh, int order) {
  if (mesh.p_geo != 3)
    throw std::invalid_argument("build_quad_cache: needs a cubic-geometry mesh");
  FlowQuadCache cache;
  cache.rule = tri_quadrature(order);
  const int nq = cache.rule.size();
  const TriBasis& vb = tri_basis(3);
  const TriBasis& pb = tri_basis(2);
  const int nv = vb.size(), np = pb.size();

  cache.vel_val.resize(static_cast<size_t>(nq) * nv);
  cache.pre_val.resize(static_cast<size_t>(nq) * np);
  std::vector<double> dxi(static_cast<size_t>(nq) * nv), deta(static_cast<size_t>(nq) * nv);
  for (int q = 0; q < nq; ++q) {
    const Vec2 x = cache.rule.points[q];
    vb.eval(x[0], x[1], &cache.vel_val[static_cast<size_t>(q) * nv]);
    pb.eval(x[0], x[1], &cache.pre_val[static_cast<size_t>(q) * np]);
    vb.eval_grad(x[0], x[1], &dxi[static_cast<size_t>(q) * nv], &deta[static_cast<size_t>(q) * nv]);
  }

  cache.elems.resize(mesh.num_elems());
  for (int e = 0; e < mesh.num_elems(); ++e) {
    ElementQuad& eq = cache.elems[e];
    eq.wdet.resize(nq);
    eq.dvx.resize(static_cast<size_t>(nq) * nv);
    eq.dvy.resize(static_cast<size_t>(nq) * nv);
    const int* c = mesh.elem(e);
    for (int q = 0; q < nq; ++q) {
      const double* gx = &dxi[static_cast<size_t>(q) * nv];
      const double* gy = &deta[static_cast<size_t>(q) * nv];
      double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
      for (int a = 0; a < nv; ++a) {
        j00 += mesh.nodes[c[a]][0] * gx[a];
        j01 += mesh.nodes[c[a]][0] * gy[a];
        j10 += mesh.nodes[c[a]][1] * gx[a];
        j11 += mesh.nodes[c[a]][1] * gy[a];
      }
      const double det = j00 * j11 - j01 * j10;
      if (det <= 0.0)
        throw std::runtime_error("build_quad_cache: non-positive Jacobian");
      eq.wdet[q] = cache.rule.weights[q] * det;
      // J^{-T} grad_ref
      const double i00 = j11 / det, i01 = -j10 / det;
      const double i10 = -j01 / det, i11 = j00 / det;
      for (int a = 0; a < nv; ++a) {
        eq.dvx[static_cast<size_t>(q) * nv + a] = i00 * gx[a] + i01 * gy[a];
        eq.dvy[static_cast<size_t>(q) * nv + a] = i10 * gx[a] + i11 * gy[a];
      }
    }
  }
  return cache;
}

}  // namespace sbiwss
