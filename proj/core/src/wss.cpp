#include "sbiwss/wss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbiwss {

namespace {

// cubic Lagrange basis on [0,1] with nodes 0, 1/3, 2/3, 1, matching the node
// spacing along a curved mesh edge
void edge_basis(double t, double l[4], double dl[4], double ddl[4]) {
  // l_i(t) = prod_{j != i} (t - t_j) / (t_i - t_j), expanded
  const double t2 = t * t, t3 = t2 * t;
  l[0] = -4.5 * t3 + 9.0 * t2 - 5.5 * t + 1.0;
  l[1] = 13.5 * t3 - 22.5 * t2 + 9.0 * t;
  l[2] = -13.5 * t3 + 18.0 * t2 - 4.5 * t;
  l[3] = 4.5 * t3 - 4.5 * t2 + t;
  dl[0] = -13.5 * t2 + 18.0 * t - 5.5;
  dl[1] = 40.5 * t2 - 45.0 * t + 9.0;
  dl[2] = -40.5 * t2 + 36.0 * t - 4.5;
  dl[3] = 13.5 * t2 - 9.0 * t + 1.0;
  ddl[0] = -27.0 * t + 18.0;
  ddl[1] = 81.0 * t - 45.0;
  ddl[2] = -81.0 * t + 36.0;
  ddl[3] = 27.0 * t - 9.0;
}

struct EdgeGeom {
  Vec2 p[4];  // physical edge nodes in traversal order
};

Vec2 edge_point(const EdgeGeom& g, double t) {
  double l[4], dl[4], ddl[4];
  edge_basis(t, l, dl, ddl);
  Vec2 x{0.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    x[0] += l[i] * g.p[i][0];
    x[1] += l[i] * g.p[i][1];
  }
  return x;
}

// closest parameter on the edge to p, clamped to [0,1]; returns squared
// distance
double project_to_edge(const EdgeGeom& g, const Vec2& p, double& t_out) {
  const double cx = g.p[3][0] - g.p[0][0], cy = g.p[3][1] - g.p[0][1];
  const double chord2 = cx * cx + cy * cy;
  double t = 0.5;
  if (chord2 > 0.0)
    t = ((p[0] - g.p[0][0]) * cx + (p[1] - g.p[0][1]) * cy) / chord2;
  t = std::clamp(t, 0.0, 1.0);

  for (int it = 0; it < 30; ++it) {
    double l[4], dl[4], ddl[4];
    edge_basis(t, l, dl, ddl);
    double x = 0, y = 0, xp = 0, yp = 0, xpp = 0, ypp = 0;
    for (int i = 0; i < 4; ++i) {
      x += l[i] * g.p[i][0];
      y += l[i] * g.p[i][1];
      xp += dl[i] * g.p[i][0];
      yp += dl[i] * g.p[i][1];
      xpp += ddl[i] * g.p[i][0];
      ypp += ddl[i] * g.p[i][1];
    }
    const double rx = x - p[0], ry = y - p[1];
    const double f = rx * xp + ry * yp;
    const double fp = xp * xp + yp * yp + rx * xpp + ry * ypp;
    if (fp <= 0.0) break;
    double step = f / fp;
    const double t_new = std::clamp(t - step, 0.0, 1.0);
    if (std::abs(t_new - t) < 1e-15) {
      t = t_new;
      break;
    }
    t = t_new;
  }
  t_out = t;
  const Vec2 x = edge_point(g, t);
  const double rx = x[0] - p[0], ry = x[1] - p[1];
  return rx * rx + ry * ry;
}

// reference coordinate of edge parameter t (edges run CCW: 0->1, 1->2, 2->0)
Vec2 edge_xi(int edge, double t) {
  switch (edge) {
    case 0: return {t, 0.0};
    case 1: return {1.0 - t, t};
    default: return {0.0, 1.0 - t};
  }
}

}  // namespace

std::vector<WallSample> compute_wss(const FlowSolution& sol,
                                    const ChannelSpec& spec, WallSide side,
                                    const std::vector<double>& arcs) {
  const Mesh& mesh = sol.mesh;
  if (mesh.p_geo != 3)
    throw std::invalid_argument("compute_wss: needs a curved mesh");

  // wall faces on the requested side, with their edge node coordinates
  struct Face {
    int elem, edge;
    EdgeGeom geom;
  };
  std::vector<Face> faces;
  for (const BoundaryFace& bf : mesh.boundary) {
    if (bf.tag != BoundaryTag::Wall) continue;
    const std::vector<int> loc = mesh.edge_local_nodes(bf.edge);
    const int* c = mesh.elem(bf.elem);
    EdgeGeom g;
    double ymid = 0.0;
    for (int i = 0; i < 4; ++i) {
      g.p[i] = mesh.nodes[c[loc[i]]];
      ymid += g.p[i][1];
    }
    ymid *= 0.25;
    if ((side == WallSide::Top) != (ymid > 0.0)) continue;
    faces.push_back({bf.elem, bf.edge, g});
  }
  if (faces.empty())
    throw std::runtime_error("compute_wss: no wall faces on that side");

  const FlowSampler sampler(sol);
  const double mu = sol.props.dynamic_viscosity();

  std::vector<WallSample> out;
  out.reserve(arcs.size());
  for (double s : arcs) {
    const double x_station = station_at_arc_length(spec, s);
    const WallPoint wp = wall_point(spec, x_station, side);

    double best_d2 = std::numeric_limits<double>::infinity();
    int best_face = -1;
    double best_t = 0.0;
    for (size_t f = 0; f < faces.size(); ++f) {
      double t;
      const double d2 = project_to_edge(faces[f].geom, wp.point, t);
      if (d2 < best_d2) {
        best_d2 = d2;
        best_face = static_cast<int>(f);
        best_t = t;
      }
    }
    const Face& face = faces[best_face];

    // discrete tangent along the CCW traversal; outward normal to its right
    double l[4], dl[4], ddl[4];
    edge_basis(best_t, l, dl, ddl);
    Vec2 tau{0.0, 0.0};
    for (int i = 0; i < 4; ++i) {
      tau[0] += dl[i] * face.geom.p[i][0];
      tau[1] += dl[i] * face.geom.p[i][1];
    }
    const double tlen = std::hypot(tau[0], tau[1]);
    tau[0] /= tlen;
    tau[1] /= tlen;
    const Vec2 n{tau[1], -tau[0]};
    const Vec2 that = tau[0] >= 0.0 ? tau : Vec2{-tau[0], -tau[1]};

    const Vec2 xi = edge_xi(face.edge, best_t);
    const auto g = sampler.velocity_gradient_at(face.elem, xi);  // 1/s
    const double p_pa =
        kinematic_pressure_to_pa(sampler.pressure_at(face.elem, xi), sol.props);

    // traction the fluid exerts on the wall: -(2 mu eps - p I) n
    const double exx = g[0], eyy = g[3], exy = 0.5 * (g[1] + g[2]);
    const double tx = -(2.0 * mu * (exx * n[0] + exy * n[1]) - p_pa * n[0]);
    const double ty = -(2.0 * mu * (exy * n[0] + eyy * n[1]) - p_pa * n[1]);
    const double wss_full = that[0] * tx + that[1] * ty;

    // gradient shortcut with the inward normal m = -n:
    // mu * that . (I - m m^T) (grad u) m
    const Vec2 m{-n[0], -n[1]};
    const double gm0 = g[0] * m[0] + g[1] * m[1];
    const double gm1 = g[2] * m[0] + g[3] * m[1];
    const double mdot = gm0 * m[0] + gm1 * m[1];
    const double sx = mu * (gm0 - mdot * m[0]);
    const double sy = mu * (gm1 - mdot * m[1]);
    const double wss_short = that[0] * sx + that[1] * sy;

    WallSample ws;
    ws.s = s;
    ws.point = edge_point(face.geom, best_t);
    ws.normal = n;
    ws.tangent = that;
    ws.wss_full = wss_full;
    ws.wss_shortcut = wss_short;
    ws.pressure = p_pa;
    out.push_back(ws);
  }
  return out;
}

}  // namespace sbiwss
