#include "sbiwss/meshing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "sbiwss/basis.hpp"
#include "sbiwss/delaunay.hpp"
#include "sbiwss/quadrature.hpp"

namespace sbiwss {

namespace {

double arc_speed_at(const ChannelSpec& spec, double x) {
  const double d = half_width_deriv(spec, x);
  return std::sqrt(1.0 + d * d);
}

long long edge_key(int a, int b) {
  const int lo = std::min(a, b), hi = std::max(a, b);
  return (static_cast<long long>(lo) << 32) | static_cast<unsigned>(hi);
}

}  // namespace

ImplicitDomain make_domain(const ChannelSpec& spec) {
  spec.validate();
  ImplicitDomain dom;
  dom.sdf = [spec](const Vec2& p) { return signed_distance(spec, p); };
  dom.classify = [spec](const Vec2& p) {
    const double d_in = std::abs(p[0] - spec.x_min);
    const double d_out = std::abs(p[0] - spec.x_max);
    const double d_wall =
        std::abs(std::abs(p[1]) - half_width(spec, p[0])) / arc_speed_at(spec, p[0]);
    if (d_in <= d_out && d_in <= d_wall) return BoundaryTag::Inflow;
    if (d_out <= d_wall) return BoundaryTag::Outflow;
    return BoundaryTag::Wall;
  };
  dom.snap = [spec](const Vec2& p, BoundaryTag tag) -> Vec2 {
    if (tag == BoundaryTag::Inflow || tag == BoundaryTag::Outflow) {
      const double x = (tag == BoundaryTag::Inflow) ? spec.x_min : spec.x_max;
      const double y = half_width(spec, x);
      return {x, std::clamp(p[1], -y, y)};
    }
    return project_to_wall(spec, p).point;
  };
  dom.lo = {spec.x_min, -spec.half_width0};
  dom.hi = {spec.x_max, spec.half_width0};
  const double y_in = half_width(spec, spec.x_min);
  const double y_out = half_width(spec, spec.x_max);
  dom.fixed = {{spec.x_min, -y_in}, {spec.x_min, y_in}, {spec.x_max, -y_out}, {spec.x_max, y_out}};
  return dom;
}

ImplicitDomain make_domain(const PolylineGeometry& poly) {
  ImplicitDomain dom;
  dom.sdf = [poly](const Vec2& p) { return poly.signed_distance(p); };
  dom.classify = [poly](const Vec2& p) { return poly.project(p).tag; };
  dom.snap = [poly](const Vec2& p, BoundaryTag) { return poly.project(p).point; };
  poly.bounding_box(dom.lo, dom.hi);
  dom.fixed = poly.vertices();
  return dom;
}

Mesh generate_mesh(const ImplicitDomain& domain, const MeshingOptions& opt) {
  if (opt.h <= 0.0) throw std::invalid_argument("generate_mesh: h must be positive");
  const double h0 = opt.h;
  const double geps = 1e-3 * h0;
  const double deps = std::sqrt(1e-16) * h0;

  // hex lattice seed, rejected against the signed distance
  std::vector<Vec2> pts = domain.fixed;
  const int nfix = static_cast<int>(pts.size());
  {
    const double dy = h0 * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = domain.lo[1] - h0; y <= domain.hi[1] + h0; y += dy, ++row) {
      const double shift = (row % 2 == 1) ? h0 / 2.0 : 0.0;
      for (double x = domain.lo[0] - h0 + shift; x <= domain.hi[0] + h0; x += h0) {
        const Vec2 p = {x, y};
        if (domain.sdf(p) >= geps) continue;
        bool dupe = false;
        for (int f = 0; f < nfix; ++f)
          if (std::hypot(p[0] - pts[f][0], p[1] - pts[f][1]) < 1e-3 * h0) { dupe = true; break; }
        if (!dupe) pts.push_back(p);
      }
    }
  }
  if (static_cast<int>(pts.size()) < 3)
    throw std::runtime_error("generate_mesh: h too coarse for the domain");

  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<int, 2>> bars;
  std::vector<Vec2> last_tri_pos;
  const auto needs_retri = [&]() {
    if (last_tri_pos.empty()) return true;
    double worst = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
      worst = std::max(worst, std::hypot(pts[i][0] - last_tri_pos[i][0], pts[i][1] - last_tri_pos[i][1]));
    return worst / h0 > opt.ttol;
  };
  const auto retriangulate = [&]() {
    last_tri_pos = pts;
    tris = delaunay_triangulate(pts);
    std::vector<std::array<int, 3>> kept;
    kept.reserve(tris.size());
    for (const auto& t : tris) {
      const Vec2 c = {(pts[t[0]][0] + pts[t[1]][0] + pts[t[2]][0]) / 3.0,
                      (pts[t[0]][1] + pts[t[1]][1] + pts[t[2]][1]) / 3.0};
      if (domain.sdf(c) < -geps) kept.push_back(t);
    }
    tris.swap(kept);
    std::map<long long, std::array<int, 2>> uniq;
    for (const auto& t : tris)
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        uniq.emplace(edge_key(a, b), std::array<int, 2>{std::min(a, b), std::max(a, b)});
      }
    bars.clear();
    bars.reserve(uniq.size());
    for (const auto& kv : uniq) bars.push_back(kv.second);
  };

  std::vector<Vec2> force(pts.size());
  for (int it = 0; it < opt.max_iters; ++it) {
    if (needs_retri()) retriangulate();

    // bar forces with the uniform rest length scaled to current bar mass
    double sum_l2 = 0.0;
    std::vector<double> lens(bars.size());
    for (size_t b = 0; b < bars.size(); ++b) {
      const Vec2& pa = pts[bars[b][0]];
      const Vec2& pb = pts[bars[b][1]];
      lens[b] = std::hypot(pa[0] - pb[0], pa[1] - pb[1]);
      sum_l2 += lens[b] * lens[b];
    }
    const double l0 = opt.fscale * std::sqrt(sum_l2 / static_cast<double>(bars.size()));

    // density control: drop free points crowding a bar to below half the
    // target spacing (corner clustering would otherwise survive as cap
    // slivers once the boundary snap flattens them)
    if (it % 30 == 0) {
      std::vector<char> kill(pts.size(), 0);
      bool any = false;
      for (size_t b = 0; b < bars.size(); ++b)
        if (lens[b] < 0.5 * h0) {
          for (int end : {bars[b][0], bars[b][1]})
            if (end >= nfix && !kill[end]) { kill[end] = 1; any = true; break; }
        }
      if (any) {
        if (getenv("SBIWSS_MESH_DEBUG")) {
          int nk = 0; for (char c : kill) nk += c;
          fprintf(stderr, "[dc] it=%d bars=%zu l0=%g pts=%zu kill=%d\n", it, bars.size(), l0, pts.size(), nk);
        }
        std::vector<Vec2> packed;
        packed.reserve(pts.size());
        for (size_t i = 0; i < pts.size(); ++i)
          if (!kill[i]) packed.push_back(pts[i]);
        pts.swap(packed);
        last_tri_pos.clear();
        force.resize(pts.size());
        continue;
      }
    }
    force.assign(pts.size(), Vec2{0.0, 0.0});
    for (size_t b = 0; b < bars.size(); ++b) {
      const int a = bars[b][0], c = bars[b][1];
      const double f = std::max(l0 - lens[b], 0.0);
      if (f <= 0.0 || lens[b] <= 0.0) continue;
      const double fx = f * (pts[a][0] - pts[c][0]) / lens[b];
      const double fy = f * (pts[a][1] - pts[c][1]) / lens[b];
      force[a][0] += fx; force[a][1] += fy;
      force[c][0] -= fx; force[c][1] -= fy;
    }
    for (int f = 0; f < nfix; ++f) force[f] = {0.0, 0.0};

    for (size_t i = 0; i < pts.size(); ++i) {
      pts[i][0] += opt.dt * force[i][0];
      pts[i][1] += opt.dt * force[i][1];
    }

    // pull exterior points back to the boundary along the numeric gradient
    for (size_t i = nfix; i < pts.size(); ++i) {
      const double d = domain.sdf(pts[i]);
      if (d <= 0.0) continue;
      const double gx = (domain.sdf({pts[i][0] + deps, pts[i][1]}) - d) / deps;
      const double gy = (domain.sdf({pts[i][0], pts[i][1] + deps}) - d) / deps;
      const double g2 = gx * gx + gy * gy;
      if (g2 < 1e-12) continue;
      pts[i][0] -= d * gx / g2;
      pts[i][1] -= d * gy / g2;
    }

    double interior_move = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
      if (domain.sdf(pts[i]) < -geps)
        interior_move = std::max(
            interior_move, opt.dt * std::hypot(force[i][0], force[i][1]));
    if (interior_move / h0 < opt.dptol) break;
  }

  // final crowding sweep: equilibrium can still trap a free point against a
  // fixed corner where the in-loop cadence missed it
  for (int pass = 0; pass < 8; ++pass) {
    retriangulate();
    std::vector<char> kill(pts.size(), 0);
    bool any = false;
    for (const auto& bar : bars) {
      const Vec2& pa = pts[bar[0]];
      const Vec2& pb = pts[bar[1]];
      if (std::hypot(pa[0] - pb[0], pa[1] - pb[1]) >= 0.5 * h0) continue;
      for (int end : {bar[0], bar[1]})
        if (end >= nfix && !kill[end]) { kill[end] = 1; any = true; break; }
    }
    if (!any) break;
    std::vector<Vec2> packed;
    packed.reserve(pts.size());
    for (size_t i = 0; i < pts.size(); ++i)
      if (!kill[i]) packed.push_back(pts[i]);
    pts.swap(packed);
    last_tri_pos.clear();
  }

  // the exact boundary snap can flatten wall triangles whose third vertex
  // hovers close by; smooth interior points until the snapped mesh clears
  // the quality floor
  const auto radius_ratio = [](const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    const double a = std::hypot(p2[0] - p1[0], p2[1] - p1[1]);
    const double b = std::hypot(p0[0] - p2[0], p0[1] - p2[1]);
    const double c = std::hypot(p1[0] - p0[0], p1[1] - p0[1]);
    const double denom = a * b * c;
    if (denom <= 0.0) return 0.0;
    return (b + c - a) * (c + a - b) * (a + b - c) / denom;
  };
  for (int pass = 0; pass < 6; ++pass) {
    if (needs_retri()) retriangulate();
    std::vector<char> on_bd(pts.size(), 0);
    {
      std::unordered_map<long long, int> ec;
      for (const auto& t : tris)
        for (int k = 0; k < 3; ++k) ++ec[edge_key(t[k], t[(k + 1) % 3])];
      for (const auto& t : tris)
        for (int k = 0; k < 3; ++k)
          if (ec[edge_key(t[k], t[(k + 1) % 3])] == 1) on_bd[t[k]] = on_bd[t[(k + 1) % 3]] = 1;
    }
    std::vector<Vec2> snapped = pts;
    for (size_t i = nfix; i < pts.size(); ++i)
      if (on_bd[i]) snapped[i] = domain.snap(pts[i], domain.classify(pts[i]));
    double q = 2.0;
    for (const auto& t : tris)
      q = std::min(q, radius_ratio(snapped[t[0]], snapped[t[1]], snapped[t[2]]));
    if (q >= opt.quality_floor || pass == 5) {
      pts.swap(snapped);
      break;
    }
    pts.swap(snapped);
    std::vector<Vec2> sum(pts.size(), Vec2{0.0, 0.0});
    std::vector<int> deg(pts.size(), 0);
    for (const auto& bar : bars)
      for (int side = 0; side < 2; ++side) {
        const int i = bar[side], j = bar[1 - side];
        sum[i][0] += pts[j][0]; sum[i][1] += pts[j][1]; ++deg[i];
      }
    for (size_t i = nfix; i < pts.size(); ++i) {
      if (on_bd[i] || deg[i] == 0) continue;
      const Vec2 cand = {sum[i][0] / deg[i], sum[i][1] / deg[i]};
      if (domain.sdf(cand) < -geps) pts[i] = cand;
    }
    last_tri_pos.clear();
  }

  // drop orphaned points, reindex
  std::vector<int> remap(pts.size(), -1);
  {
    std::vector<char> used(pts.size(), 0);
    for (const auto& t : tris) used[t[0]] = used[t[1]] = used[t[2]] = 1;
    std::vector<Vec2> packed;
    packed.reserve(pts.size());
    for (size_t i = 0; i < pts.size(); ++i)
      if (used[i]) { remap[i] = static_cast<int>(packed.size()); packed.push_back(pts[i]); }
    pts.swap(packed);
    for (auto& t : tris) { t[0] = remap[t[0]]; t[1] = remap[t[1]]; t[2] = remap[t[2]]; }
  }
  std::vector<char> fixed_flag(pts.size(), 0);
  for (int f = 0; f < nfix; ++f)
    if (remap[f] >= 0) fixed_flag[remap[f]] = 1;

  // boundary edges appear in exactly one triangle
  std::unordered_map<long long, int> edge_count;
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) ++edge_count[edge_key(t[k], t[(k + 1) % 3])];
  std::vector<char> on_boundary(pts.size(), 0);
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k)
      if (edge_count[edge_key(t[k], t[(k + 1) % 3])] == 1)
        on_boundary[t[k]] = on_boundary[t[(k + 1) % 3]] = 1;

  // snap free boundary points exactly onto their nearest boundary part
  for (size_t i = 0; i < pts.size(); ++i) {
    if (!on_boundary[i] || fixed_flag[i]) continue;
    pts[i] = domain.snap(pts[i], domain.classify(pts[i]));
  }

  Mesh mesh;
  mesh.p_geo = 1;
  mesh.nodes = pts;
  mesh.num_vertices = static_cast<int>(pts.size());
  mesh.conn.reserve(tris.size() * 3);
  for (const auto& t : tris) {
    const double twice = (pts[t[1]][0] - pts[t[0]][0]) * (pts[t[2]][1] - pts[t[0]][1]) -
                         (pts[t[2]][0] - pts[t[0]][0]) * (pts[t[1]][1] - pts[t[0]][1]);
    if (twice >= 0.0) {
      mesh.conn.insert(mesh.conn.end(), {t[0], t[1], t[2]});
    } else {
      mesh.conn.insert(mesh.conn.end(), {t[0], t[2], t[1]});
    }
  }
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* n = mesh.elem(e);
    for (int k = 0; k < 3; ++k) {
      if (edge_count[edge_key(n[k], n[(k + 1) % 3])] != 1) continue;
      const Vec2 mid = {(pts[n[k]][0] + pts[n[(k + 1) % 3]][0]) / 2.0,
                        (pts[n[k]][1] + pts[n[(k + 1) % 3]][1]) / 2.0};
      mesh.boundary.push_back({e, k, domain.classify(mid)});
    }
  }

  mesh.validate();
  const double q = mesh.min_quality();
  if (q < opt.quality_floor)
    throw std::runtime_error("generate_mesh: quality floor not reached (achieved " +
                             std::to_string(q) + ")");
  return mesh;
}

Mesh generate_mesh(const ChannelSpec& spec, const MeshingOptions& opt) {
  return generate_mesh(make_domain(spec), opt);
}

Mesh elevate_order(const Mesh& mesh, int p_geo, const ImplicitDomain& domain) {
  if (mesh.p_geo != 1) throw std::invalid_argument("elevate_order: input must be straight (p_geo = 1)");
  if (p_geo != 2 && p_geo != 3) throw std::invalid_argument("elevate_order: p_geo must be 2 or 3");

  const int nv = mesh.num_vertices;
  const int ne = mesh.num_elems();
  const int per_edge = p_geo - 1;

  // global edges, keyed by ascending vertex pair
  std::map<long long, int> edge_ids;
  for (int e = 0; e < ne; ++e) {
    const int* n = mesh.elem(e);
    for (int k = 0; k < 3; ++k) {
      const long long key = edge_key(n[k], n[(k + 1) % 3]);
      edge_ids.emplace(key, 0);
    }
  }
  int next = 0;
  for (auto& kv : edge_ids) kv.second = next++;
  const int nedge = next;

  Mesh out;
  out.p_geo = p_geo;
  out.num_vertices = nv;
  out.nodes = mesh.nodes;
  out.nodes.resize(nv + static_cast<size_t>(nedge) * per_edge + (p_geo == 3 ? ne : 0));

  // edge nodes at affine fractions along the ascending-id direction
  for (const auto& kv : edge_ids) {
    const int lo = static_cast<int>(kv.first >> 32);
    const int hi = static_cast<int>(kv.first & 0xffffffff);
    for (int k = 1; k <= per_edge; ++k) {
      const double t = static_cast<double>(k) / p_geo;
      out.nodes[nv + static_cast<size_t>(kv.second) * per_edge + (k - 1)] = {
          mesh.nodes[lo][0] + t * (mesh.nodes[hi][0] - mesh.nodes[lo][0]),
          mesh.nodes[lo][1] + t * (mesh.nodes[hi][1] - mesh.nodes[lo][1])};
    }
  }

  const int npe = out.nodes_per_elem();
  out.conn.assign(static_cast<size_t>(ne) * npe, -1);
  for (int e = 0; e < ne; ++e) {
    const int* n = mesh.elem(e);
    int* c = out.conn.data() + static_cast<size_t>(e) * npe;
    c[0] = n[0]; c[1] = n[1]; c[2] = n[2];
    for (int k = 0; k < 3; ++k) {
      const int a = n[k], b = n[(k + 1) % 3];
      const int eid = edge_ids.at(edge_key(a, b));
      for (int j = 0; j < per_edge; ++j) {
        const int along = (a < b) ? j : (per_edge - 1 - j);
        c[3 + k * per_edge + j] = nv + eid * per_edge + along;
      }
    }
    if (p_geo == 3) {
      const int bid = nv + nedge * per_edge + e;
      out.nodes[bid] = {(mesh.nodes[n[0]][0] + mesh.nodes[n[1]][0] + mesh.nodes[n[2]][0]) / 3.0,
                        (mesh.nodes[n[0]][1] + mesh.nodes[n[1]][1] + mesh.nodes[n[2]][1]) / 3.0};
      c[9] = bid;
    }
  }
  out.boundary = mesh.boundary;

  // snap boundary-edge interior nodes onto the exact boundary
  for (const BoundaryFace& f : out.boundary) {
    const int* c = out.elem(f.elem);
    for (int j = 0; j < per_edge; ++j) {
      const int id = c[3 + f.edge * per_edge + j];
      out.nodes[id] = domain.snap(out.nodes[id], f.tag);
    }
  }

  // re-center interior nodes of curved elements: affine-consistent blend that
  // carries a quarter of each edge-node displacement into the bubble
  if (p_geo == 3) {
    for (int e = 0; e < ne; ++e) {
      const int* c = out.elem(e);
      Vec2 edge_sum = {0.0, 0.0}, vert_sum = {0.0, 0.0};
      for (int k = 3; k < 9; ++k) {
        edge_sum[0] += out.nodes[c[k]][0];
        edge_sum[1] += out.nodes[c[k]][1];
      }
      for (int k = 0; k < 3; ++k) {
        vert_sum[0] += out.nodes[c[k]][0];
        vert_sum[1] += out.nodes[c[k]][1];
      }
      out.nodes[c[9]] = {edge_sum[0] / 4.0 - vert_sum[0] / 6.0,
                         edge_sum[1] / 4.0 - vert_sum[1] / 6.0};
    }
  }

  // curved elements must keep positive Jacobians
  const TriBasis& basis = tri_basis(p_geo);
  const TriQuadRule rule = tri_quadrature(6);
  std::vector<double> dxi(basis.size()), deta(basis.size());
  for (int e = 0; e < ne; ++e) {
    const int* c = out.elem(e);
    for (int q = 0; q < rule.size(); ++q) {
      basis.eval_grad(rule.points[q][0], rule.points[q][1], dxi.data(), deta.data());
      double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
      for (int k = 0; k < basis.size(); ++k) {
        j00 += out.nodes[c[k]][0] * dxi[k];
        j01 += out.nodes[c[k]][0] * deta[k];
        j10 += out.nodes[c[k]][1] * dxi[k];
        j11 += out.nodes[c[k]][1] * deta[k];
      }
      if (j00 * j11 - j01 * j10 <= 0.0)
        throw std::runtime_error("elevate_order: non-positive Jacobian in element " +
                                 std::to_string(e));
    }
  }

  out.validate();
  return out;
}

Mesh elevate_order(const Mesh& mesh, int p_geo, const ChannelSpec& spec) {
  return elevate_order(mesh, p_geo, make_domain(spec));
}

double mesh_area(const Mesh& mesh) {
  const TriBasis& basis = tri_basis(mesh.p_geo);
  const TriQuadRule rule = tri_quadrature(8);
  std::vector<double> dxi(basis.size()), deta(basis.size());
  double area = 0.0;
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* c = mesh.elem(e);
    for (int q = 0; q < rule.size(); ++q) {
      basis.eval_grad(rule.points[q][0], rule.points[q][1], dxi.data(), deta.data());
      double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
      for (int k = 0; k < basis.size(); ++k) {
        j00 += mesh.nodes[c[k]][0] * dxi[k];
        j01 += mesh.nodes[c[k]][0] * deta[k];
        j10 += mesh.nodes[c[k]][1] * dxi[k];
        j11 += mesh.nodes[c[k]][1] * deta[k];
      }
      area += rule.weights[q] * (j00 * j11 - j01 * j10);
    }
  }
  return area;
}

double calibrated_h(MeshResolution r) {
  // tuned so the vessel geometry lands near 368 / 766 / 1590 elements
  switch (r) {
    case MeshResolution::Coarse: return 0.12183;
    case MeshResolution::Medium: return 0.08834;
    case MeshResolution::Fine: return 0.06400;
  }
  return 0.06400;
}

const char* resolution_name(MeshResolution r) {
  switch (r) {
    case MeshResolution::Coarse: return "coarse";
    case MeshResolution::Medium: return "medium";
    case MeshResolution::Fine: return "fine";
  }
  return "fine";
}

}  // namespace sbiwss
