#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>
#include <vector>

#include "sbiwss/fem_space.hpp"
#include "sbiwss/flow_solution.hpp"
#include "sbiwss/mesh.hpp"
#include "sbiwss/units.hpp"

namespace sbiwss {

struct NewtonTrace {
  // residual 2-norms per iteration, one inner vector per continuation stage
  std::vector<std::vector<double>> stage_residuals;
  int total_iterations = 0;
};

struct SolveOptions {
  double tol = 1e-10;   // relative to the first residual of each stage
  int max_newton = 30;
  bool use_continuation = true;  // ramp theta in stages for high Reynolds
};

// Steady Navier-Stokes system on a fixed mesh. Holds the function space,
// boundary sets and quadrature cache so that repeated solves (and the
// adjoint solves built on top of them) reuse the sparsity analysis.
//
// Unknown layout follows FlowSpace: [ux | uy | p], kinematic pressure.
// Weak form (gradient form):
//   nu (grad u, grad w) - (p, div w) + ((u.grad)u, w) = 0
//   (div u, q) = 0
// with u = (theta * inflow_shape, 0) on the inflow, u = 0 on walls and a
// natural (do-nothing) outflow. Dirichlet rows are replaced by identity
// rows U_d - g_d so the Jacobian stays square and the adjoint sees the
// same constraint structure.
class FlowSystem {
 public:
  FlowSystem(const Mesh& mesh, const FluidProps& props, int quad_order = 6);

  const Mesh& mesh() const { return *mesh_; }
  const FlowSpace& space() const { return space_; }
  const FlowBC& bc() const { return bc_; }
  const FluidProps& props() const { return props_; }
  int n_total() const { return space_.n_total(); }

  // Residual and/or Jacobian at state u for inflow scale theta. Either
  // output may be null. u must have size n_total().
  void assemble(const Eigen::VectorXd& u, double theta, Eigen::VectorXd* r,
                Eigen::SparseMatrix<double>* jac) const;

  // Newton iteration at fixed theta. If u is empty it is initialised to
  // zero plus boundary values; otherwise it is used as the starting guess
  // (boundary values are re-imposed for the new theta). Returns false on
  // failure, leaving u at the last iterate.
  bool solve_at(double theta, Eigen::VectorXd& u, NewtonTrace* trace,
                const SolveOptions& opt = {});

  // Full solve: cold starts ramp theta over max(1, ceil(Re/400)) stages,
  // warm starts (non-empty u) try a direct Newton first and fall back to
  // the cold ramp if it diverges.
  bool solve(double theta, Eigen::VectorXd& u, NewtonTrace* trace = nullptr,
             const SolveOptions& opt = {});

  // Solve J(u,theta)^T lambda = rhs with the Jacobian at the given state.
  // Refactorises; call after solve() when the gradient is needed.
  Eigen::VectorXd adjoint_solve(const Eigen::VectorXd& u, double theta,
                                const Eigen::VectorXd& rhs);

  // d(residual)/d(theta): nonzero only on inflow ux rows, where the
  // identity row U_d - theta*shape_d contributes -shape_d.
  Eigen::VectorXd dresidual_dtheta() const;

  // Estimated Reynolds number for an inflow centreline speed theta,
  // using the inflow span as the diameter.
  double reynolds_estimate(double theta) const;

  FlowSolution make_solution(const Eigen::VectorXd& u, double theta) const;

 private:
  void apply_dirichlet(Eigen::VectorXd& u, double theta) const;

  std::shared_ptr<const Mesh> mesh_;
  FluidProps props_;
  FlowSpace space_;
  FlowBC bc_;
  FlowQuadCache cache_;
  std::vector<char> fixed_;        // per dof: 1 if Dirichlet-constrained
  std::vector<double> bc_value_;   // Dirichlet value per unit theta
  Eigen::SparseMatrix<double> jac_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool pattern_ready_ = false;
};

// One-shot convenience: build a FlowSystem, solve for the inflow
// centreline speed theta and package the result. Throws on failure.
FlowSolution solve_flow(const Mesh& mesh, const FluidProps& props,
                        double theta, NewtonTrace* trace = nullptr,
                        const SolveOptions& opt = {});

}  // namespace sbiwss
