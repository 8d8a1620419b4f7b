#include "sbiwss/flow_solver.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sbiwss {

FlowSystem::FlowSystem(const Mesh& mesh, const FluidProps& props,
                       int quad_order)
    : mesh_(std::make_shared<Mesh>(mesh)),
      props_(props),
      space_(make_flow_space(*mesh_)),
      bc_(make_flow_bc(*mesh_)),
      cache_(build_quad_cache(*mesh_, quad_order)) {
  const int n = space_.n_total();
  fixed_.assign(n, 0);
  bc_value_.assign(n, 0.0);
  for (int node : bc_.wall_nodes) {
    fixed_[space_.ux(node)] = 1;
    fixed_[space_.uy(node)] = 1;
  }
  for (size_t i = 0; i < bc_.inflow_nodes.size(); ++i) {
    const int node = bc_.inflow_nodes[i];
    fixed_[space_.ux(node)] = 1;
    fixed_[space_.uy(node)] = 1;
    bc_value_[space_.ux(node)] = bc_.inflow_shape[i];
  }
}

void FlowSystem::apply_dirichlet(Eigen::VectorXd& u, double theta) const {
  for (int d = 0; d < space_.n_total(); ++d)
    if (fixed_[d]) u[d] = theta * bc_value_[d];
}

void FlowSystem::assemble(const Eigen::VectorXd& u, double theta,
                          Eigen::VectorXd* r,
                          Eigen::SparseMatrix<double>* jac) const {
  const int n = space_.n_total();
  if (u.size() != n) throw std::invalid_argument("assemble: bad state size");
  const double nu = props_.nu_cm2_s();
  const int nq = static_cast<int>(cache_.rule.points.size());
  const int nv = 10, np = 6, nl = 2 * nv + np;  // local dof count

  if (r) r->setZero(n);
  std::vector<Eigen::Triplet<double>> trips;
  if (jac) trips.reserve(static_cast<size_t>(mesh_->num_elems()) * nl * nl);

  // local dof order: u1 (10), u2 (10), p (6)
  double rl[26], kl[26 * 26];
  int gdof[26];

  for (int e = 0; e < mesh_->num_elems(); ++e) {
    const int* c = mesh_->elem(e);
    const int* pc = space_.pre_conn.data() + static_cast<size_t>(e) * np;
    const ElementQuad& eq = cache_.elems[e];

    double u1[10], u2[10], pl[6];
    for (int a = 0; a < nv; ++a) {
      u1[a] = u[space_.ux(c[a])];
      u2[a] = u[space_.uy(c[a])];
      gdof[a] = space_.ux(c[a]);
      gdof[nv + a] = space_.uy(c[a]);
    }
    for (int b = 0; b < np; ++b) {
      pl[b] = u[space_.pr(pc[b])];
      gdof[2 * nv + b] = space_.pr(pc[b]);
    }

    for (int i = 0; i < nl; ++i) rl[i] = 0.0;
    if (jac)
      for (int i = 0; i < nl * nl; ++i) kl[i] = 0.0;

    for (int q = 0; q < nq; ++q) {
      const double w = eq.wdet[q];
      const double* val = cache_.vel_val.data() + static_cast<size_t>(q) * nv;
      const double* gx = eq.dvx.data() + static_cast<size_t>(q) * nv;
      const double* gy = eq.dvy.data() + static_cast<size_t>(q) * nv;
      const double* psi = cache_.pre_val.data() + static_cast<size_t>(q) * np;

      double uh1 = 0, uh2 = 0, g00 = 0, g01 = 0, g10 = 0, g11 = 0, ph = 0;
      for (int a = 0; a < nv; ++a) {
        uh1 += u1[a] * val[a];
        uh2 += u2[a] * val[a];
        g00 += u1[a] * gx[a];
        g01 += u1[a] * gy[a];
        g10 += u2[a] * gx[a];
        g11 += u2[a] * gy[a];
      }
      for (int b = 0; b < np; ++b) ph += pl[b] * psi[b];

      const double conv1 = uh1 * g00 + uh2 * g01;  // (u.grad)u, x
      const double conv2 = uh1 * g10 + uh2 * g11;

      for (int a = 0; a < nv; ++a) {
        rl[a] += w * (nu * (gx[a] * g00 + gy[a] * g01) - ph * gx[a] +
                      val[a] * conv1);
        rl[nv + a] += w * (nu * (gx[a] * g10 + gy[a] * g11) - ph * gy[a] +
                           val[a] * conv2);
      }
      for (int b = 0; b < np; ++b)
        rl[2 * nv + b] += w * psi[b] * (g00 + g11);

      if (jac) {
        for (int a = 0; a < nv; ++a) {
          double* row1 = kl + a * nl;
          double* row2 = kl + (nv + a) * nl;
          for (int cc = 0; cc < nv; ++cc) {
            const double visc = nu * (gx[a] * gx[cc] + gy[a] * gy[cc]);
            const double adv = val[a] * (uh1 * gx[cc] + uh2 * gy[cc]);
            const double vv = val[a] * val[cc];
            row1[cc] += w * (visc + adv + vv * g00);
            row1[nv + cc] += w * vv * g01;
            row2[cc] += w * vv * g10;
            row2[nv + cc] += w * (visc + adv + vv * g11);
          }
          for (int b = 0; b < np; ++b) {
            row1[2 * nv + b] += -w * gx[a] * psi[b];
            row2[2 * nv + b] += -w * gy[a] * psi[b];
          }
        }
        for (int b = 0; b < np; ++b) {
          double* rowp = kl + (2 * nv + b) * nl;
          for (int cc = 0; cc < nv; ++cc) {
            rowp[cc] += w * psi[b] * gx[cc];
            rowp[nv + cc] += w * psi[b] * gy[cc];
          }
        }
      }
    }

    for (int i = 0; i < nl; ++i) {
      const int gi = gdof[i];
      if (fixed_[gi]) continue;  // replaced by an identity row below
      if (r) (*r)[gi] += rl[i];
      if (jac) {
        const double* row = kl + i * nl;
        for (int j = 0; j < nl; ++j)
          if (row[j] != 0.0) trips.emplace_back(gi, gdof[j], row[j]);
      }
    }
  }

  for (int d = 0; d < n; ++d)
    if (fixed_[d]) {
      if (r) (*r)[d] = u[d] - theta * bc_value_[d];
      if (jac) trips.emplace_back(d, d, 1.0);
    }

  if (jac) {
    jac->resize(n, n);
    jac->setFromTriplets(trips.begin(), trips.end());
  }
}

bool FlowSystem::solve_at(double theta, Eigen::VectorXd& u, NewtonTrace* trace,
                          const SolveOptions& opt) {
  const int n = space_.n_total();
  if (u.size() != n) u = Eigen::VectorXd::Zero(n);
  apply_dirichlet(u, theta);

  if (trace) trace->stage_residuals.emplace_back();
  Eigen::VectorXd r(n);
  double ref = 1.0;

  for (int it = 0; it <= opt.max_newton; ++it) {
    assemble(u, theta, &r, &jac_);
    const double rnorm = r.norm();
    if (trace) {
      trace->stage_residuals.back().push_back(rnorm);
      ++trace->total_iterations;
    }
    if (it == 0) ref = std::max(rnorm, 1.0);
    if (rnorm <= opt.tol * ref) return true;
    if (!std::isfinite(rnorm) || rnorm > 1e4 * ref) return false;
    if (it == opt.max_newton) return false;

    if (!pattern_ready_) {
      lu_.analyzePattern(jac_);
      pattern_ready_ = true;
    }
    lu_.factorize(jac_);
    if (lu_.info() != Eigen::Success) return false;
    u -= lu_.solve(r);
  }
  return false;
}

bool FlowSystem::solve(double theta, Eigen::VectorXd& u, NewtonTrace* trace,
                       const SolveOptions& opt) {
  if (u.size() == space_.n_total()) {
    Eigen::VectorXd warm = u;
    if (solve_at(theta, warm, trace, opt)) {
      u = warm;
      return true;
    }
  }
  u.resize(0);
  int n_stages = 1;
  if (opt.use_continuation)
    n_stages = std::max(1, static_cast<int>(
                               std::ceil(reynolds_estimate(theta) / 400.0)));
  for (int s = 1; s <= n_stages; ++s) {
    const double theta_s = theta * s / n_stages;
    if (!solve_at(theta_s, u, trace, opt)) return false;
  }
  return true;
}

Eigen::VectorXd FlowSystem::adjoint_solve(const Eigen::VectorXd& u,
                                          double theta,
                                          const Eigen::VectorXd& rhs) {
  assemble(u, theta, nullptr, &jac_);
  if (!pattern_ready_) {
    lu_.analyzePattern(jac_);
    pattern_ready_ = true;
  }
  lu_.factorize(jac_);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error("adjoint_solve: factorization failed");
  return lu_.transpose().solve(rhs);
}

Eigen::VectorXd FlowSystem::dresidual_dtheta() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(space_.n_total());
  for (int d = 0; d < space_.n_total(); ++d)
    if (fixed_[d]) v[d] = -bc_value_[d];
  return v;
}

double FlowSystem::reynolds_estimate(double theta) const {
  const double d = bc_.y_hi - bc_.y_lo;
  return theta_to_reynolds(std::abs(theta), d, props_);
}

FlowSolution FlowSystem::make_solution(const Eigen::VectorXd& u,
                                       double theta) const {
  FlowSolution sol;
  sol.mesh = *mesh_;
  sol.props = props_;
  sol.theta = theta;
  sol.n_vel = space_.n_vel;
  sol.n_pre = space_.n_pre;
  sol.u.assign(u.data(), u.data() + u.size());
  return sol;
}

FlowSolution solve_flow(const Mesh& mesh, const FluidProps& props,
                        double theta, NewtonTrace* trace,
                        const SolveOptions& opt) {
  FlowSystem sys(mesh, props);
  Eigen::VectorXd u;
  if (!sys.solve(theta, u, trace, opt))
    throw std::runtime_error("flow solve did not converge");
  return sys.make_solution(u, theta);
}

}  // namespace sbiwss
