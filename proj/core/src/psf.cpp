#include "sbiwss/psf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "sbiwss/basis.hpp"
#include "sbiwss/locate.hpp"
#include "sbiwss/quadrature.hpp"

namespace sbiwss {

double psf_sinc(double z) {
  const double t = M_PI * z;
  if (std::abs(z) < 1e-4) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

double smoothed_box(double s, double s0, double omega, double gamma) {
  auto logistic = [](double t) {
    t = std::clamp(t, -500.0, 500.0);
    return 1.0 / (1.0 + std::exp(-t));
  };
  return logistic((s - (s0 - 0.5 * omega)) / gamma) -
         logistic((s - (s0 + 0.5 * omega)) / gamma);
}

double psf_smoothness(const VoxelGrid& grid) {
  return 0.1 * std::min(grid.dx, grid.dy);
}

namespace {

double psi(double s, double c, double ds, double gamma) {
  if (std::abs(s - c) >= 2.0 * ds) return 0.0;  // box edge = sinc zero
  return psf_sinc((s - c) / ds) * smoothed_box(s, c, 4.0 * ds, gamma);
}

// cubic Lagrange on t in {0, 1/3, 2/3, 1}
void edge_basis(double t, double l[4], double dl[4]) {
  l[0] = -4.5 * t * t * t + 9.0 * t * t - 5.5 * t + 1.0;
  l[1] = 13.5 * t * t * t - 22.5 * t * t + 9.0 * t;
  l[2] = -13.5 * t * t * t + 18.0 * t * t - 4.5 * t;
  l[3] = 4.5 * t * t * t - 4.5 * t * t + t;
  dl[0] = -13.5 * t * t + 18.0 * t - 5.5;
  dl[1] = 40.5 * t * t - 45.0 * t + 9.0;
  dl[2] = -40.5 * t * t + 36.0 * t - 4.5;
  dl[3] = 13.5 * t * t - 9.0 * t + 1.0;
}

// One element edge as a graph y(x).  Interior edges are straight by mesh
// construction; only snapped boundary edges actually curve.
struct EdgeCurve {
  Vec2 p[4];
  bool straight = true;

  void init(const Mesh& mesh, const int* c, int k) {
    p[0] = mesh.nodes[c[k]];
    p[1] = mesh.nodes[c[3 + 2 * k]];
    p[2] = mesh.nodes[c[3 + 2 * k + 1]];
    p[3] = mesh.nodes[c[(k + 1) % 3]];
    const double tol = 1e-12;
    straight =
        std::abs(p[1][0] - (p[0][0] + (p[3][0] - p[0][0]) / 3.0)) < tol &&
        std::abs(p[1][1] - (p[0][1] + (p[3][1] - p[0][1]) / 3.0)) < tol &&
        std::abs(p[2][0] - (p[0][0] + 2.0 * (p[3][0] - p[0][0]) / 3.0)) < tol &&
        std::abs(p[2][1] - (p[0][1] + 2.0 * (p[3][1] - p[0][1]) / 3.0)) < tol;
  }

  double y_at(double x) const {
    const double span = p[3][0] - p[0][0];
    if (straight) {
      if (std::abs(span) < 1e-300) return 0.5 * (p[0][1] + p[3][1]);
      const double t = (x - p[0][0]) / span;
      return p[0][1] + t * (p[3][1] - p[0][1]);
    }
    double t = std::abs(span) < 1e-300 ? 0.5 : (x - p[0][0]) / span;
    t = std::clamp(t, -0.05, 1.05);
    double l[4], dl[4];
    for (int it = 0; it < 40; ++it) {
      edge_basis(t, l, dl);
      double xt = 0.0, dxt = 0.0;
      for (int a = 0; a < 4; ++a) { xt += p[a][0] * l[a]; dxt += p[a][0] * dl[a]; }
      if (std::abs(dxt) < 1e-300) break;
      const double step = (xt - x) / dxt;
      t = std::clamp(t - step, -0.05, 1.05);
      if (std::abs(step) < 1e-15) break;
    }
    edge_basis(t, l, dl);
    double y = 0.0;
    for (int a = 0; a < 4; ++a) y += p[a][1] * l[a];
    return y;
  }

  // x stations in (lo, hi) where the curve meets the horizontal line y = cy
  void crossings(double cy, double lo, double hi, std::vector<double>& out) const {
    if (straight) {
      const double dy = p[3][1] - p[0][1];
      if (std::abs(dy) < 1e-300) return;
      const double t = (cy - p[0][1]) / dy;
      const double x = p[0][0] + t * (p[3][0] - p[0][0]);
      if (x > lo + 1e-13 && x < hi - 1e-13) out.push_back(x);
      return;
    }
    const int ns = 8;
    double fa = y_at(lo) - cy;
    for (int s = 1; s <= ns; ++s) {
      const double xb = lo + (hi - lo) * s / ns;
      const double fb = y_at(xb) - cy;
      if ((fa < 0.0) != (fb < 0.0)) {
        double a = lo + (hi - lo) * (s - 1) / ns, b = xb, va = fa;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (a + b);
          const double vm = y_at(m) - cy;
          if ((va < 0.0) != (vm < 0.0)) b = m; else { a = m; va = vm; }
          if (b - a < 1e-14) break;
        }
        const double x = 0.5 * (a + b);
        if (x > lo + 1e-13 && x < hi - 1e-13) out.push_back(x);
      }
      fa = fb;
    }
  }
};

}  // namespace

double psf_weight_raw(const VoxelGrid& grid, int voxel, const Vec2& p) {
  const double gamma = psf_smoothness(grid);
  const Vec2 c = grid.centroid(voxel);
  return psi(p[0], c[0], grid.dx, gamma) * psi(p[1], c[1], grid.dy, gamma);
}

PsfOperator::PsfOperator(const Mesh& mesh, const VoxelGrid& grid,
                         int quad_order, int quad_subdiv)
    : grid_(grid), n_nodes_(mesh.num_nodes()) {
  if (mesh.p_geo != 3)
    throw std::invalid_argument("PsfOperator: needs a cubic-geometry mesh");
  if (quad_order < 2 || quad_order > 60 || quad_subdiv < 1 || quad_subdiv > 16)
    throw std::invalid_argument("PsfOperator: bad quadrature parameters");
  const double gamma = psf_smoothness(grid_);
  const QuadRule1D line = gauss_legendre(quad_order);
  const TriBasis& basis = tri_basis(3);
  const int nv = basis.size();
  const ScanRegion& rg = grid_.region;
  // supports reach two voxels past the scan region; elements beyond that
  // cannot touch any weight
  const double sx0 = rg.x0 - 2.0 * grid_.dx, sx1 = rg.x1 + 2.0 * grid_.dx;
  const double sy0 = rg.y0 - 2.0 * grid_.dy, sy1 = rg.y1 + 2.0 * grid_.dy;

  z_.assign(grid_.count(), 0.0);
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> xsplit;
  double val[10], psix[5], psiy[5];
  int ixs[5], iys[5];

  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* c = mesh.elem(e);
    Vec2 lo = mesh.nodes[c[0]], hi = lo;
    for (int a = 1; a < mesh.nodes_per_elem(); ++a) {
      lo[0] = std::min(lo[0], mesh.nodes[c[a]][0]); lo[1] = std::min(lo[1], mesh.nodes[c[a]][1]);
      hi[0] = std::max(hi[0], mesh.nodes[c[a]][0]); hi[1] = std::max(hi[1], mesh.nodes[c[a]][1]);
    }
    if (hi[0] <= sx0 || lo[0] >= sx1 || hi[1] <= sy0 || lo[1] >= sy1) continue;

    EdgeCurve edges[3];
    for (int k = 0; k < 3; ++k) edges[k].init(mesh, c, k);
    int ord[3] = {0, 1, 2};
    std::sort(ord, ord + 3, [&](int a, int b) {
      const double xa = mesh.nodes[c[a]][0], xb = mesh.nodes[c[b]][0];
      return xa != xb ? xa < xb : a < b;
    });
    // the edge joining two corners: edge k runs corner k -> corner (k+1)%3
    auto edge_of = [](int i, int j) { return (i + 1) % 3 == j ? i : j; };
    const EdgeCurve& longc = edges[edge_of(ord[0], ord[2])];

    std::map<int, std::array<double, 10>> acc;  // voxel -> per-node weight
    Vec2 xi = {1.0 / 3.0, 1.0 / 3.0};
    bool xi_fresh = false;

    for (int strip = 0; strip < 2; ++strip) {
      const double xa = mesh.nodes[c[ord[strip]]][0];
      const double xb = mesh.nodes[c[ord[strip + 1]]][0];
      if (xb - xa < 1e-13) continue;
      const EdgeCurve& shortc = edges[edge_of(ord[strip], ord[strip + 1])];
      const bool long_up = longc.y_at(0.5 * (xa + xb)) > shortc.y_at(0.5 * (xa + xb));
      const EdgeCurve& up = long_up ? longc : shortc;
      const EdgeCurve& dn = long_up ? shortc : longc;

      xsplit.clear();
      xsplit.push_back(xa);
      xsplit.push_back(xb);
      {
        const int jlo = static_cast<int>(std::ceil((xa - rg.x0) / grid_.dx - 0.5 + 1e-12));
        const int jhi = static_cast<int>(std::floor((xb - rg.x0) / grid_.dx - 0.5 - 1e-12));
        for (int j = std::max(jlo, -2); j <= std::min(jhi, grid_.nx + 1); ++j)
          xsplit.push_back(rg.x0 + (j + 0.5) * grid_.dx);
      }
      {
        // horizontal center lines crossed by either chain break the
        // y-panel pattern; panels must end there
        double ymin = std::min({up.y_at(xa), up.y_at(xb), dn.y_at(xa), dn.y_at(xb),
                                up.y_at(0.5 * (xa + xb)), dn.y_at(0.5 * (xa + xb))});
        double ymax = std::max({up.y_at(xa), up.y_at(xb), dn.y_at(xa), dn.y_at(xb),
                                up.y_at(0.5 * (xa + xb)), dn.y_at(0.5 * (xa + xb))});
        const double pad = 0.01 * (ymax - ymin) + 1e-12;
        const int jlo = std::max(-2, static_cast<int>(std::ceil((ymin - pad - rg.y0) / grid_.dy - 0.5)));
        const int jhi = std::min(grid_.ny + 1, static_cast<int>(std::floor((ymax + pad - rg.y0) / grid_.dy - 0.5)));
        for (int j = jlo; j <= jhi; ++j) {
          const double cy = rg.y0 + (j + 0.5) * grid_.dy;
          up.crossings(cy, xa, xb, xsplit);
          dn.crossings(cy, xa, xb, xsplit);
        }
      }
      std::sort(xsplit.begin(), xsplit.end());

      for (size_t px = 0; px + 1 < xsplit.size(); ++px) {
        const double panel = (xsplit[px + 1] - xsplit[px]) / quad_subdiv;
        if (panel < 1e-14) continue;
        for (int sub = 0; sub < quad_subdiv; ++sub) {
          const double x0p = xsplit[px] + sub * panel;
          for (int qx = 0; qx < quad_order; ++qx) {
            const double x = x0p + line.points[qx] * panel;
            const double wx = line.weights[qx] * panel;
            const double yl = dn.y_at(x), yu = up.y_at(x);
            if (yu - yl < 1e-15) continue;

            // weights of the voxel columns reaching this station
            const double qxv = (x - rg.x0) / grid_.dx - 0.5;
            int nxs = 0;
            for (int ix = std::max(0, static_cast<int>(std::ceil(qxv - 2.0)));
                 ix <= std::min(grid_.nx - 1, static_cast<int>(std::floor(qxv + 2.0))); ++ix) {
              const double w = psi(x, grid_.cx(ix), grid_.dx, gamma);
              if (w != 0.0) { psix[nxs] = w; ixs[nxs++] = ix; }
            }
            if (nxs == 0) continue;

            const int jlo = static_cast<int>(std::ceil((yl - rg.y0) / grid_.dy - 0.5 + 1e-12));
            const int jhi = static_cast<int>(std::floor((yu - rg.y0) / grid_.dy - 0.5 - 1e-12));
            double yedge0 = yl;
            for (int j = std::max(jlo, -2), stop = std::min(jhi, grid_.ny + 1); ; ++j) {
              const double yedge1 = j <= stop ? rg.y0 + (j + 0.5) * grid_.dy : yu;
              const double ypanel = (yedge1 - yedge0) / quad_subdiv;
              if (ypanel > 1e-15) {
                for (int suby = 0; suby < quad_subdiv; ++suby) {
                  const double y0p = yedge0 + suby * ypanel;
                  for (int qy = 0; qy < quad_order; ++qy) {
                    const double y = y0p + line.points[qy] * ypanel;
                    const double qyv = (y - rg.y0) / grid_.dy - 0.5;
                    int nys = 0;
                    for (int iy = std::max(0, static_cast<int>(std::ceil(qyv - 2.0)));
                         iy <= std::min(grid_.ny - 1, static_cast<int>(std::floor(qyv + 2.0))); ++iy) {
                      const double w = psi(y, grid_.cy(iy), grid_.dy, gamma);
                      if (w != 0.0) { psiy[nys] = w; iys[nys++] = iy; }
                    }
                    if (nys == 0) continue;

                    const Vec2 start = xi;
                    if (!invert_element_map(mesh, e, {x, y}, xi, xi_fresh ? &start : nullptr))
                      throw std::runtime_error("PsfOperator: map inversion failed in element " +
                                               std::to_string(e));
                    xi_fresh = true;
                    basis.eval(xi[0], xi[1], val);
                    const double wq = wx * line.weights[qy] * ypanel;

                    for (int b = 0; b < nys; ++b)
                      for (int a2 = 0; a2 < nxs; ++a2) {
                        const int vox = iys[b] * grid_.nx + ixs[a2];
                        if (!grid_.alpha[vox]) continue;
                        const double w = wq * psix[a2] * psiy[b];
                        z_[vox] += w;
                        auto& slot = acc[vox];
                        for (int a = 0; a < nv; ++a) slot[a] += w * val[a];
                      }
                  }
                }
              }
              yedge0 = yedge1;
              if (j > stop) break;
            }
          }
        }
      }
    }
    for (const auto& [vox, slot] : acc)
      for (int a = 0; a < nv; ++a)
        if (slot[a] != 0.0) trips.emplace_back(vox, c[a], slot[a]);
  }

  // drop voxels whose support barely overlaps the mesh, normalize the rest
  const double floor_z = 1e-6 * grid_.dx * grid_.dy;
  for (int i = 0; i < grid_.count(); ++i)
    if (grid_.alpha[i] && z_[i] < floor_z) grid_.alpha[i] = 0;

  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(trips.size());
  for (const auto& t : trips)
    if (grid_.alpha[t.row()])
      kept.emplace_back(t.row(), t.col(), t.value() / z_[t.row()]);
  w_.resize(grid_.count(), n_nodes_);
  w_.setFromTriplets(kept.begin(), kept.end());
}

VoxelData PsfOperator::apply(const FlowSolution& sol) const {
  if (sol.mesh.num_nodes() != n_nodes_ || sol.n_vel != n_nodes_)
    throw std::invalid_argument("PsfOperator: flow state is on a different mesh");
  const Eigen::Map<const Eigen::VectorXd> ux(sol.u.data(), n_nodes_);
  const Eigen::Map<const Eigen::VectorXd> uy(sol.u.data() + n_nodes_, n_nodes_);
  const Eigen::VectorXd vx = w_ * ux;
  const Eigen::VectorXd vy = w_ * uy;
  VoxelData out;
  out.grid = grid_;
  out.values.assign(2 * static_cast<size_t>(grid_.count()), 0.0);
  for (int i = 0; i < grid_.count(); ++i)
    if (grid_.alpha[i]) {
      out.values[2 * static_cast<size_t>(i)] = vx[i];
      out.values[2 * static_cast<size_t>(i) + 1] = vy[i];
    }
  return out;
}

}  // namespace sbiwss
