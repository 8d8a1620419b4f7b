#include "sbiwss/sbi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sbiwss/wss.hpp"

namespace sbiwss {

double ParamBox::project(double t) const {
  return std::min(std::max(t, lo), hi);
}

double plugin_theta(const VoxelData& observed) {
  const VoxelGrid& g = observed.grid;
  for (int ix = 0; ix < g.nx; ++ix) {
    double sum = 0.0;
    int n = 0;
    for (int iy = 0; iy < g.ny; ++iy) {
      const int i = iy * g.nx + ix;
      if (!g.alpha[i]) continue;
      sum += std::hypot(observed.u(i), observed.v(i));
      ++n;
    }
    if (n > 0) return 1.5 * sum / n;
  }
  throw std::invalid_argument("plugin_theta: data has no masked voxels");
}

ParamBox default_param_box(double theta_plugin) {
  if (!(theta_plugin >= 0.0))
    throw std::invalid_argument("default_param_box: negative estimate");
  return {0.0, 4.0 * theta_plugin};
}

SbiProblem make_sbi_problem(const Mesh& mesh, const FluidProps& props,
                            const PsfOperator& psf, const VoxelData& observed,
                            const SbiSettings& settings) {
  SbiProblem p;
  p.mesh = &mesh;
  p.props = props;
  p.psf = &psf;
  p.observed = &observed;
  p.theta0 = plugin_theta(observed);
  p.box = default_param_box(p.theta0);
  p.settings = settings;
  return p;
}

const char* sbi_status_name(SbiStatus status) {
  switch (status) {
    case SbiStatus::Converged:
      return "converged";
    case SbiStatus::MaxIterations:
      return "max_iterations";
    case SbiStatus::LineSearchFailed:
      return "line_search_failed";
  }
  return "unknown";
}

namespace {

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

void validate(const SbiProblem& p) {
  if (!p.mesh || !p.psf || !p.observed)
    throw std::invalid_argument("sbi: problem is missing mesh, psf or data");
  const VoxelGrid& og = p.observed->grid;
  const VoxelGrid& pg = p.psf->grid();
  if (og.nx != pg.nx || og.ny != pg.ny ||
      !close(og.region.x0, pg.region.x0) || !close(og.region.x1, pg.region.x1) ||
      !close(og.region.y0, pg.region.y0) || !close(og.region.y1, pg.region.y1))
    throw std::invalid_argument("sbi: observed grid does not match operator");
  if (static_cast<int>(p.observed->values.size()) != 2 * og.count())
    throw std::invalid_argument("sbi: observed data has wrong value count");
  if (p.psf->weights().cols() != p.mesh->num_nodes())
    throw std::invalid_argument("sbi: operator was built for another mesh");
  if (!p.box.contains(p.theta0))
    throw std::invalid_argument("sbi: initial theta outside the box");
  const SbiSettings& s = p.settings;
  if (!(s.grad_tol > 0.0) || s.max_iterations < 0 || s.max_backtracks < 0 ||
      !(s.armijo_c1 > 0.0 && s.armijo_c1 < 1.0) ||
      !(s.backtrack > 0.0 && s.backtrack < 1.0) || !(s.first_step > 0.0))
    throw std::invalid_argument("sbi: bad optimizer settings");
}

const SbiProblem& checked(const SbiProblem& p) {
  validate(p);
  return p;
}

}  // namespace

SbiSolver::SbiSolver(const SbiProblem& problem)
    : prob_(checked(problem)),
      sys_(*problem.mesh, problem.props),
      drdtheta_(sys_.dresidual_dtheta()) {
  if (sys_.space().n_vel != static_cast<int>(prob_.psf->weights().cols()))
    throw std::invalid_argument("sbi: velocity space does not match operator");
}

double SbiSolver::misfit(const Eigen::VectorXd& u, Eigen::VectorXd* rx,
                         Eigen::VectorXd* ry) const {
  const int nv = sys_.space().n_vel;
  const VoxelData& obs = *prob_.observed;
  const int count = obs.grid.count();
  Eigen::Map<const Eigen::VectorXd> ux(u.data(), nv);
  Eigen::Map<const Eigen::VectorXd> uy(u.data() + nv, nv);
  Eigen::VectorXd px = prob_.psf->weights() * ux;
  Eigen::VectorXd py = prob_.psf->weights() * uy;
  if (rx) rx->setZero(count);
  if (ry) ry->setZero(count);
  double acc = 0.0;
  for (int i = 0; i < count; ++i) {
    if (!obs.grid.alpha[i]) continue;
    const double du = px[i] - obs.u(i);
    const double dv = py[i] - obs.v(i);
    acc += du * du + dv * dv;
    if (rx) (*rx)[i] = du;
    if (ry) (*ry)[i] = dv;
  }
  return 0.5 * acc;
}

std::optional<double> SbiSolver::try_cost(double theta) {
  Eigen::VectorXd u = state_;
  if (!sys_.solve(theta, u, nullptr, prob_.settings.solve)) return std::nullopt;
  ++n_forward_;
  trial_.swap(u);
  trial_theta_ = theta;
  const double c = misfit(trial_, nullptr, nullptr);
  if (!std::isfinite(c)) return std::nullopt;
  return c;
}

void SbiSolver::promote() {
  state_ = trial_;
  state_theta_ = trial_theta_;
}

double SbiSolver::cost(double theta) {
  const auto c = try_cost(theta);
  if (!c) throw std::runtime_error("sbi: forward solve failed");
  promote();
  return *c;
}

double SbiSolver::gradient_at_state(double theta) {
  const int nv = sys_.space().n_vel;
  Eigen::VectorXd rx, ry;
  misfit(state_, &rx, &ry);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys_.n_total());
  rhs.segment(0, nv) = -(prob_.psf->weights().transpose() * rx);
  rhs.segment(nv, nv) = -(prob_.psf->weights().transpose() * ry);
  const Eigen::VectorXd lambda = sys_.adjoint_solve(state_, theta, rhs);
  ++n_adjoint_;
  return lambda.dot(drdtheta_);
}

double SbiSolver::gradient(double theta) {
  if (state_.size() == 0 || state_theta_ != theta) cost(theta);
  return gradient_at_state(theta);
}

SbiResult SbiSolver::optimize() {
  const auto t_begin = std::chrono::steady_clock::now();
  const SbiSettings& set = prob_.settings;
  SbiResult res;

  double theta = prob_.theta0;
  double I = cost(theta);
  double g = gradient_at_state(theta);
  const double gtol = set.grad_tol * std::max(1.0, std::abs(I));
  res.trace.push_back({0, theta, I, g, 0.0, 0});

  double H = 0.0;  // inverse curvature estimate, 0 until the first secant
  int steps = 0;
  SbiStatus status;
  while (true) {
    if (std::abs(g) <= gtol) {
      status = SbiStatus::Converged;
      break;
    }
    if (steps >= set.max_iterations) {
      status = SbiStatus::MaxIterations;
      break;
    }

    double d = H > 0.0 ? -H * g : -g;
    if (H <= 0.0) {
      // no curvature yet: cap the gradient step at a fraction of scale
      const double cap = set.first_step * std::max(1.0, std::abs(theta));
      if (std::abs(d) > cap) d = d > 0.0 ? cap : -cap;
    }

    // Armijo backtracking along the projection arc
    double a = 1.0, t = theta, It = I;
    bool accepted = false;
    int bt = 0;
    while (true) {
      t = prob_.box.project(theta + a * d);
      if (t != theta) {
        const auto ct = try_cost(t);  // failure rejects the trial
        if (ct && *ct <= I + set.armijo_c1 * g * (t - theta)) {
          It = *ct;
          accepted = true;
          break;
        }
      }
      if (++bt > set.max_backtracks) break;
      a *= set.backtrack;
    }
    if (!accepted) {
      status = SbiStatus::LineSearchFailed;
      break;
    }

    promote();
    const double gnew = gradient_at_state(t);
    const double s = t - theta, y = gnew - g;
    if (s * y > 0.0) H = s / y;  // exact secant in one dimension
    theta = t;
    I = It;
    g = gnew;
    ++steps;
    res.trace.push_back({steps, theta, I, g, a, bt});
  }

  res.theta_star = theta;
  res.cost = I;
  res.grad_norm = std::abs(g);
  res.status = status;
  res.flow = sys_.make_solution(state_, theta);
  res.n_forward = n_forward_;
  res.n_adjoint = n_adjoint_;
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
          .count();
  return res;
}

double sbi_cost(double theta, const SbiProblem& problem) {
  SbiSolver solver(problem);
  return solver.cost(theta);
}

double sbi_gradient(double theta, const SbiProblem& problem) {
  SbiSolver solver(problem);
  return solver.gradient(theta);
}

SbiResult optimize(const SbiProblem& problem) {
  SbiSolver solver(problem);
  return solver.optimize();
}

WssProfile sbi_wss(const SbiResult& result, const ChannelSpec& spec,
                   const GammaSamples& gamma) {
  const std::vector<WallSample> samples =
      compute_wss(result.flow, spec, gamma.side, gamma.s);
  return profile_from_wall_samples(samples, gamma.side, WssMethod::Sbi);
}

void write_sbi_result(std::ostream& out, const SbiResult& r) {
  out << std::setprecision(17);
  out << "{\n";
  out << "  \"theta_star\": " << r.theta_star << ",\n";
  out << "  \"cost\": " << r.cost << ",\n";
  out << "  \"grad_norm\": " << r.grad_norm << ",\n";
  out << "  \"status\": \"" << sbi_status_name(r.status) << "\",\n";
  out << "  \"iterations\": " << r.trace.size() - 1 << ",\n";
  out << "  \"n_forward\": " << r.n_forward << ",\n";
  out << "  \"n_adjoint\": " << r.n_adjoint << ",\n";
  out << "  \"seconds\": " << r.seconds << ",\n";
  out << "  \"trace\": [\n";
  for (size_t k = 0; k < r.trace.size(); ++k) {
    const SbiIterate& it = r.trace[k];
    out << "    {\"iter\": " << it.iter << ", \"theta\": " << it.theta
        << ", \"cost\": " << it.cost << ", \"grad\": " << it.grad
        << ", \"step\": " << it.step << ", \"backtracks\": " << it.backtracks
        << "}" << (k + 1 < r.trace.size() ? "," : "") << "\n";
  }
  out << "  ]\n";
  out << "}\n";
}

std::string sbi_result_json(const SbiResult& r) {
  std::ostringstream out;
  write_sbi_result(out, r);
  return out.str();
}

}  // namespace sbiwss
