#include "sbiwss/flow_solution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "sbiwss/basis.hpp"
#include "sbiwss/quadrature.hpp"

namespace sbiwss {

double FlowSolution::node_speed(int n) const {
  return std::hypot(node_ux(n), node_uy(n));
}

double peak_speed(const FlowSolution& sol) {
  double best = 0.0;
  for (int n = 0; n < sol.n_vel; ++n) best = std::max(best, sol.node_speed(n));
  return best;
}

double boundary_flux(const FlowSolution& sol, BoundaryTag tag) {
  const Mesh& mesh = sol.mesh;
  const TriBasis& vb = tri_basis(mesh.p_geo);
  const int nv = vb.size();
  const QuadRule1D rule = gauss_legendre(6);
  std::vector<double> val(nv), dxi(nv), deta(nv);

  double flux = 0.0;
  for (const BoundaryFace& f : mesh.boundary) {
    if (f.tag != tag) continue;
    const int* c = mesh.elem(f.elem);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      // reference edge parametrizations, CCW traversal
      Vec2 xi, dxidt;
      switch (f.edge) {
        case 0: xi = {t, 0.0}; dxidt = {1.0, 0.0}; break;
        case 1: xi = {1.0 - t, t}; dxidt = {-1.0, 1.0}; break;
        default: xi = {0.0, 1.0 - t}; dxidt = {0.0, -1.0}; break;
      }
      vb.eval(xi[0], xi[1], val.data());
      vb.eval_grad(xi[0], xi[1], dxi.data(), deta.data());
      double tx = 0.0, ty = 0.0, ux = 0.0, uy = 0.0;
      for (int a = 0; a < nv; ++a) {
        const double d = dxi[a] * dxidt[0] + deta[a] * dxidt[1];
        tx += mesh.nodes[c[a]][0] * d;
        ty += mesh.nodes[c[a]][1] * d;
        ux += sol.u[c[a]] * val[a];
        uy += sol.u[sol.n_vel + c[a]] * val[a];
      }
      // interior is left of CCW traversal, outward normal right of it
      flux += rule.weights[q] * (ux * ty - uy * tx);
    }
  }
  return flux;
}

void write_solution(std::ostream& out, const FlowSolution& sol) {
  write_mesh(out, sol.mesh);
  out << "flow " << sol.n_vel << ' ' << sol.n_pre << '\n';
  out << std::setprecision(17) << "theta " << sol.theta << '\n';
  out << "fluid " << sol.props.rho0 << ' ' << sol.props.nu << '\n';
  out << "dofs\n";
  for (double v : sol.u) out << v << '\n';
}

void save_solution(const std::string& path, const FlowSolution& sol) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_solution: cannot open " + path);
  write_solution(out, sol);
}

FlowSolution read_solution(std::istream& in) {
  FlowSolution sol;
  sol.mesh = read_mesh(in);
  std::string word;
  if (!(in >> word) || word != "flow")
    throw std::runtime_error("read_solution: missing flow header");
  if (!(in >> sol.n_vel >> sol.n_pre))
    throw std::runtime_error("read_solution: bad dof counts");
  if (!(in >> word) || word != "theta" || !(in >> sol.theta))
    throw std::runtime_error("read_solution: bad theta");
  if (!(in >> word) || word != "fluid" || !(in >> sol.props.rho0 >> sol.props.nu))
    throw std::runtime_error("read_solution: bad fluid line");
  if (!(in >> word) || word != "dofs")
    throw std::runtime_error("read_solution: missing dofs");
  sol.u.resize(static_cast<size_t>(2) * sol.n_vel + sol.n_pre);
  for (double& v : sol.u)
    if (!(in >> v)) throw std::runtime_error("read_solution: truncated dofs");
  if (sol.n_vel != sol.mesh.num_nodes())
    throw std::runtime_error("read_solution: dof count does not match mesh");
  return sol;
}

FlowSolution load_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_solution: cannot open " + path);
  return read_solution(in);
}

FlowSampler::FlowSampler(const FlowSolution& sol)
    : sol_(sol), space_(make_flow_space(sol.mesh)), locator_(sol.mesh) {}

bool FlowSampler::locate(const Vec2& p, int& elem, Vec2& xi) const {
  return locator_.locate(p, elem, xi);
}

Vec2 FlowSampler::velocity_at(int elem, const Vec2& xi) const {
  const TriBasis& vb = tri_basis(3);
  double val[10];
  vb.eval(xi[0], xi[1], val);
  const int* c = sol_.mesh.elem(elem);
  Vec2 v = {0.0, 0.0};
  for (int a = 0; a < 10; ++a) {
    v[0] += sol_.u[c[a]] * val[a];
    v[1] += sol_.u[sol_.n_vel + c[a]] * val[a];
  }
  return v;
}

std::array<double, 4> FlowSampler::velocity_gradient_at(int elem, const Vec2& xi) const {
  const Mesh& mesh = sol_.mesh;
  const TriBasis& vb = tri_basis(3);
  double gx[10], gy[10];
  vb.eval_grad(xi[0], xi[1], gx, gy);
  const int* c = mesh.elem(elem);
  double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
  for (int a = 0; a < 10; ++a) {
    j00 += mesh.nodes[c[a]][0] * gx[a];
    j01 += mesh.nodes[c[a]][0] * gy[a];
    j10 += mesh.nodes[c[a]][1] * gx[a];
    j11 += mesh.nodes[c[a]][1] * gy[a];
  }
  const double det = j00 * j11 - j01 * j10;
  std::array<double, 4> g = {0.0, 0.0, 0.0, 0.0};  // dux/dx dux/dy duy/dx duy/dy
  for (int a = 0; a < 10; ++a) {
    const double px = (j11 * gx[a] - j10 * gy[a]) / det;
    const double py = (-j01 * gx[a] + j00 * gy[a]) / det;
    const double ux = sol_.u[c[a]], uy = sol_.u[sol_.n_vel + c[a]];
    g[0] += ux * px; g[1] += ux * py;
    g[2] += uy * px; g[3] += uy * py;
  }
  return g;
}

double FlowSampler::pressure_at(int elem, const Vec2& xi) const {
  const TriBasis& pb = tri_basis(2);
  double val[6];
  pb.eval(xi[0], xi[1], val);
  double p = 0.0;
  for (int a = 0; a < 6; ++a)
    p += sol_.u[static_cast<size_t>(2) * sol_.n_vel + space_.pre_conn[static_cast<size_t>(elem) * 6 + a]] * val[a];
  return p;
}

Vec2 FlowSampler::velocity(const Vec2& p) const {
  int e; Vec2 xi;
  if (!locate(p, e, xi)) return {0.0, 0.0};
  return velocity_at(e, xi);
}

std::array<double, 4> FlowSampler::velocity_gradient(const Vec2& p) const {
  int e; Vec2 xi;
  if (!locate(p, e, xi)) return {0.0, 0.0, 0.0, 0.0};
  return velocity_gradient_at(e, xi);
}

double FlowSampler::pressure(const Vec2& p) const {
  int e; Vec2 xi;
  if (!locate(p, e, xi)) return 0.0;
  return pressure_at(e, xi);
}

}  // namespace sbiwss
