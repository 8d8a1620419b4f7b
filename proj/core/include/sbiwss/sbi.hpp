#ifndef SBIWSS_SBI_HPP
#define SBIWSS_SBI_HPP

//! Inflow fitting: recovers the inflow centerline speed from voxel data by
//! minimizing the masked least-squares misfit between the sampled simulation
//! and the data.  The optimizer is BFGS (an exact secant in one dimension)
//! with Armijo backtracking, the parameter kept inside an admissible box by
//! projection.  Gradients come from the discrete adjoint of the converged
//! Navier-Stokes residual, so they agree with finite differences of the cost
//! to solver precision.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbiwss/flow_solver.hpp"
#include "sbiwss/psf.hpp"
#include "sbiwss/voxels.hpp"
#include "sbiwss/wss_profile.hpp"

namespace sbiwss {

// Admissible interval for the inflow parameter.
struct ParamBox {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double t) const { return t >= lo && t <= hi; }
  double project(double t) const;
};

struct SbiSettings {
  double grad_tol = 1e-8;   // scaled by max(1, |initial cost|)
  int max_iterations = 100;
  double armijo_c1 = 1e-4;  // sufficient-decrease constant
  double backtrack = 0.5;   // trial step shrink factor
  int max_backtracks = 30;
  double first_step = 0.1;  // first trial step cap, times max(1, |theta0|)
  SolveOptions solve;       // forward Newton options
};

// Everything one reconstruction needs.  The sampling operator must be built
// on (mesh, grid of the observed data); operator and data are referenced,
// not owned, so a sweep can share one operator across runs.
struct SbiProblem {
  const Mesh* mesh = nullptr;  // reconstruction mesh, may differ from truth
  FluidProps props;
  const PsfOperator* psf = nullptr;
  const VoxelData* observed = nullptr;
  ParamBox box;
  double theta0 = 0.0;
  SbiSettings settings;
};

// Crude inflow estimate from the leftmost masked voxel column: mean speed
// scaled by 3/2, the centerline-to-mean ratio of a parabolic profile.
double plugin_theta(const VoxelData& observed);

// Default admissible interval, [0, 4 * plugin estimate].
ParamBox default_param_box(double theta_plugin);

// Problem with plug-in initialization and the default box.
SbiProblem make_sbi_problem(const Mesh& mesh, const FluidProps& props,
                            const PsfOperator& psf, const VoxelData& observed,
                            const SbiSettings& settings = {});

enum class SbiStatus { Converged, MaxIterations, LineSearchFailed };

const char* sbi_status_name(SbiStatus status);

struct SbiIterate {
  int iter = 0;
  double theta = 0.0;
  double cost = 0.0;
  double grad = 0.0;
  double step = 0.0;   // accepted line-search step length, 0 at the start
  int backtracks = 0;  // rejected trials before this step was accepted
};

struct SbiResult {
  double theta_star = 0.0;
  double cost = 0.0;
  double grad_norm = 0.0;
  SbiStatus status = SbiStatus::Converged;
  std::vector<SbiIterate> trace;  // accepted iterates, initial point first
  FlowSolution flow;              // converged state at theta_star
  WssProfile wss;                 // filled by sbi_wss
  int n_forward = 0;              // forward solves, rejected trials included
  int n_adjoint = 0;
  double seconds = 0.0;

  bool converged() const { return status == SbiStatus::Converged; }
};

// One reconstruction run.  Owns the Newton workspace and keeps the last
// converged state as the warm start for the next evaluation, so repeated
// calls at nearby theta are much cheaper than cold solves.
class SbiSolver {
 public:
  explicit SbiSolver(const SbiProblem& problem);

  // Misfit at theta: forward solve, sample, sum masked squared residuals.
  // Throws when the forward solve fails.
  double cost(double theta);

  // dI/dtheta by the discrete adjoint at the converged state for theta
  // (reuses the state when theta matches the last evaluation).
  double gradient(double theta);

  SbiResult optimize();

  FlowSystem& system() { return sys_; }

 private:
  std::optional<double> try_cost(double theta);
  void promote();  // adopt the last trial state as the warm start
  double misfit(const Eigen::VectorXd& u, Eigen::VectorXd* rx,
                Eigen::VectorXd* ry) const;
  double gradient_at_state(double theta);

  const SbiProblem& prob_;
  FlowSystem sys_;
  Eigen::VectorXd drdtheta_;
  Eigen::VectorXd state_;  // last accepted converged state
  double state_theta_ = 0.0;
  Eigen::VectorXd trial_;  // last successful trial state
  double trial_theta_ = 0.0;
  int n_forward_ = 0;
  int n_adjoint_ = 0;
};

// One-shot forms of the three stages; each builds a fresh solver.
double sbi_cost(double theta, const SbiProblem& problem);
double sbi_gradient(double theta, const SbiProblem& problem);
SbiResult optimize(const SbiProblem& problem);

// Wall shear profile of the reconstruction at the given stations.
WssProfile sbi_wss(const SbiResult& result, const ChannelSpec& spec,
                   const GammaSamples& gamma);

// JSON dump of scalars and the iteration trace (flow and profile are not
// included; they have their own serializations).
void write_sbi_result(std::ostream& out, const SbiResult& result);
std::string sbi_result_json(const SbiResult& result);

}  // namespace sbiwss

#endif
