#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sbiwss/flow_solver.hpp"
#include "sbiwss/geometry.hpp"
#include "sbiwss/meshing.hpp"
#include "sbiwss/metrics.hpp"
#include "sbiwss/psf.hpp"
#include "sbiwss/sbi.hpp"
#include "sbiwss/units.hpp"
#include "sbiwss/voxels.hpp"
#include "sbiwss/wss.hpp"
#include "sbiwss/wss_profile.hpp"

using namespace sbiwss;

namespace {

ChannelSpec vessel_spec() {
  ChannelSpec spec;
  spec.validate();
  return spec;
}

Mesh build_mesh(const ChannelSpec& spec, MeshResolution res) {
  MeshingOptions opt;
  opt.h = calibrated_h(res);
  return elevate_order(generate_mesh(spec, opt), 3, spec);
}

const Mesh& vessel_coarse() {
  static Mesh m = build_mesh(vessel_spec(), MeshResolution::Coarse);
  return m;
}

const Mesh& vessel_medium() {
  static Mesh m = build_mesh(vessel_spec(), MeshResolution::Medium);
  return m;
}

const PsfOperator& coarse_psf_vpd9() {
  static PsfOperator op(vessel_coarse(),
                        make_vpd_grid(vessel_spec(), ScanRegion{}, 9));
  return op;
}

double theta_for(double re) {
  return reynolds_to_theta(re, vessel_spec().diameter(), FluidProps{});
}

// clean coarse-mesh data at Re = 100, shared across cases
struct Re100Data {
  double theta_true;
  FlowSolution truth;
  VoxelData clean;
};

const Re100Data& re100() {
  static Re100Data d = [] {
    Re100Data r;
    r.theta_true = theta_for(100.0);
    r.truth = solve_flow(vessel_coarse(), FluidProps{}, r.theta_true);
    r.clean = coarse_psf_vpd9().apply(r.truth);
    return r;
  }();
  return d;
}

double masked_half_sum(const VoxelData& d) {
  double acc = 0.0;
  for (int i = 0; i < d.grid.count(); ++i)
    if (d.grid.alpha[i]) acc += d.u(i) * d.u(i) + d.v(i) * d.v(i);
  return 0.5 * acc;
}

int masked_count(const VoxelData& d) {
  int n = 0;
  for (int i = 0; i < d.grid.count(); ++i)
    if (d.grid.alpha[i]) ++n;
  return n;
}

}  // namespace

TEST_CASE("plug-in estimate reads the leftmost masked column") {
  VoxelData d;
  d.grid.region = {0.0, 4.0, 0.0, 2.0};
  d.grid.nx = 4;
  d.grid.ny = 2;
  d.grid.dx = 1.0;
  d.grid.dy = 1.0;
  d.grid.alpha.assign(8, 0);
  d.values.assign(16, 0.0);
  auto set = [&](int ix, int iy, double u, double v) {
    const int i = iy * 4 + ix;
    d.grid.alpha[i] = 1;
    d.values[2 * i] = u;
    d.values[2 * i + 1] = v;
  };
  set(1, 0, 3.0, 0.0);
  set(1, 1, 0.0, -4.0);
  set(2, 0, 100.0, 100.0);  // not the leftmost column, must be ignored
  CHECK(plugin_theta(d) == doctest::Approx(1.5 * 3.5).epsilon(1e-15));

  const ParamBox box = default_param_box(5.25);
  CHECK(box.lo == 0.0);
  CHECK(box.hi == doctest::Approx(21.0));
  CHECK(box.contains(0.0));
  CHECK(!box.contains(-1e-12));
  CHECK(box.project(30.0) == doctest::Approx(21.0));
  CHECK(box.project(-3.0) == 0.0);

  VoxelData empty = d;
  empty.grid.alpha.assign(8, 0);
  CHECK_THROWS_AS(plugin_theta(empty), std::invalid_argument);
  CHECK_THROWS_AS(default_param_box(-1.0), std::invalid_argument);
}

TEST_CASE("plug-in estimate lands near the generating inflow speed") {
  const auto& d = re100();
  const double est = plugin_theta(d.clean);
  // parabola ratio is exact only for an ideal profile; the sampled channel
  // inflow sits within a few percent
  CHECK(est / d.theta_true == doctest::Approx(1.0).epsilon(0.05));

  const SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                        coarse_psf_vpd9(), d.clean);
  CHECK(p.theta0 == est);
  CHECK(p.box.hi == doctest::Approx(4.0 * est));
  CHECK(p.box.contains(p.theta0));
  CHECK(p.mesh == &vessel_coarse());
  CHECK(p.observed == &d.clean);
}

TEST_CASE("cost vanishes at the generating parameter and matches the data "
          "norm at zero inflow") {
  const auto& d = re100();
  const SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                        coarse_psf_vpd9(), d.clean);
  SbiSolver solver(p);

  const double data_norm2 = 2.0 * masked_half_sum(d.clean);
  const double c_true = solver.cost(d.theta_true);
  CHECK(c_true <= 1e-16 * data_norm2);

  // an immediate repeat reuses the converged state and reproduces the
  // value exactly
  CHECK(solver.cost(d.theta_true) == c_true);

  const double c_zero = solver.cost(0.0);
  CHECK(c_zero ==
        doctest::Approx(masked_half_sum(d.clean)).epsilon(1e-12));
}

TEST_CASE("noisy cost at the generating parameter matches the chi-square "
          "expectation") {
  const auto& d = re100();
  const double peak = peak_speed(d.truth);
  const double kappa = 0.2;
  const int n = masked_count(d.clean);
  const double expected = n * (kappa * peak) * (kappa * peak);

  double mean = 0.0;
  const int n_seeds = 8;
  for (int s = 0; s < n_seeds; ++s) {
    const VoxelData noisy = add_noise(d.clean, kappa, 1000 + s, peak);
    const SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                          coarse_psf_vpd9(), noisy);
    SbiSolver solver(p);
    mean += solver.cost(d.theta_true);
  }
  mean /= n_seeds;
  // relative std of one draw is 1/sqrt(n); 8 seeds bring it near 1.8%
  CHECK(mean == doctest::Approx(expected).epsilon(0.06));
}

TEST_CASE("adjoint gradient matches central finite differences") {
  const auto& d = re100();
  const SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                        coarse_psf_vpd9(), d.clean);
  SbiSolver solver(p);

  for (double frac : {0.5, 0.9, 1.3}) {
    const double th = frac * d.theta_true;
    const double h = 1e-4 * th;
    const double g = solver.gradient(th);
    const double fd =
        (solver.cost(th + h) - solver.cost(th - h)) / (2.0 * h);
    CHECK(std::abs(g - fd) <= 1e-6 * std::abs(fd));
  }

  // misfit slope changes sign across the generating parameter
  CHECK(solver.gradient(0.5 * d.theta_true) < 0.0);
  CHECK(solver.gradient(1.05 * d.theta_true) > 0.0);
}

TEST_CASE("noise-free optimization recovers the generating parameter") {
  const auto& d = re100();
  SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                  coarse_psf_vpd9(), d.clean);
  p.theta0 = 0.5 * d.theta_true;
  const SbiResult r = optimize(p);

  CHECK(r.status == SbiStatus::Converged);
  CHECK(r.converged());
  CHECK(std::abs(r.theta_star - d.theta_true) <= 1e-6 * d.theta_true);
  CHECK(r.grad_norm <= p.settings.grad_tol * std::max(1.0, r.trace[0].cost));
  CHECK(r.flow.theta == r.theta_star);
  CHECK(r.trace.size() >= 2);
  CHECK(r.n_forward >= static_cast<int>(r.trace.size()));

  // accepted steps decrease the cost and satisfy the sufficient-decrease rule
  for (size_t k = 0; k + 1 < r.trace.size(); ++k) {
    const SbiIterate& a = r.trace[k];
    const SbiIterate& b = r.trace[k + 1];
    CHECK(b.cost <= a.cost);
    const double bound = a.cost + p.settings.armijo_c1 * a.grad *
                                      (b.theta - a.theta) +
                         1e-12 * (1.0 + std::abs(a.cost));
    CHECK(b.cost <= bound);
    CHECK(b.step > 0.0);
  }

  // reconstruction reproduces the truth profile pointwise
  const GammaSamples gamma = build_gamma(vessel_spec(), ScanRegion{}, 200);
  const WssProfile t = profile_from_wall_samples(
      compute_wss(d.truth, vessel_spec(), gamma.side, gamma.s), gamma.side,
      WssMethod::Truth);
  const WssProfile s = sbi_wss(r, vessel_spec(), gamma);
  CHECK(s.method == WssMethod::Sbi);
  REQUIRE(s.size() == t.size());
  for (int i = 0; i < t.size(); ++i)
    CHECK(std::abs(s.wss[i] - t.wss[i]) <= 1e-6 * std::abs(t.wss[i]));
}

TEST_CASE("starting at the optimum returns immediately") {
  const auto& d = re100();
  SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                  coarse_psf_vpd9(), d.clean);
  p.theta0 = d.theta_true;
  const SbiResult r = optimize(p);
  CHECK(r.status == SbiStatus::Converged);
  CHECK(r.trace.size() <= 3);  // at most two corrective steps
  CHECK(std::abs(r.theta_star - d.theta_true) <= 1e-8 * d.theta_true);
}

TEST_CASE("noisy optimization stays near the generating parameter and is "
          "deterministic") {
  const auto& d = re100();
  const VoxelData noisy =
      add_noise(d.clean, 0.2, 42, peak_speed(d.truth));
  const SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                        coarse_psf_vpd9(), noisy);

  const SbiResult r1 = optimize(p);
  CHECK(r1.status == SbiStatus::Converged);
  // 20% voxel noise moves the fitted inflow by far less than its own scale
  CHECK(std::abs(r1.theta_star - d.theta_true) <= 0.05 * d.theta_true);
  for (size_t k = 0; k + 1 < r1.trace.size(); ++k)
    CHECK(r1.trace[k + 1].cost <= r1.trace[k].cost);

  const SbiResult r2 = optimize(p);
  CHECK(r1.theta_star == r2.theta_star);
  CHECK(r1.cost == r2.cost);
  CHECK(r1.grad_norm == r2.grad_norm);
  REQUIRE(r1.trace.size() == r2.trace.size());
  for (size_t k = 0; k < r1.trace.size(); ++k) {
    CHECK(r1.trace[k].theta == r2.trace[k].theta);
    CHECK(r1.trace[k].cost == r2.trace[k].cost);
    CHECK(r1.trace[k].grad == r2.trace[k].grad);
    CHECK(r1.trace[k].step == r2.trace[k].step);
    CHECK(r1.trace[k].backtracks == r2.trace[k].backtracks);
  }
}

TEST_CASE("reconstruction on a different mesh than the data still recovers "
          "the inflow") {
  const double theta_true = theta_for(100.0);
  const FlowSolution truth =
      solve_flow(vessel_medium(), FluidProps{}, theta_true);
  const VoxelGrid grid = make_vpd_grid(vessel_spec(), ScanRegion{}, 9);
  const PsfOperator psf_medium(vessel_medium(), grid);
  const VoxelData data = psf_medium.apply(truth);

  const SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                        coarse_psf_vpd9(), data);
  const SbiResult r = optimize(p);
  CHECK(r.status == SbiStatus::Converged);
  // discretization mismatch shifts the fit slightly, not structurally
  CHECK(std::abs(r.theta_star - theta_true) <= 0.05 * theta_true);
  CHECK(r.cost > 0.0);
}

TEST_CASE("a pinned box flags line-search failure with the trace attached") {
  const auto& d = re100();
  SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                  coarse_psf_vpd9(), d.clean);
  const double pin = 0.5 * d.theta_true;
  p.theta0 = pin;
  p.box = {pin, pin};
  const SbiResult r = optimize(p);
  CHECK(r.status == SbiStatus::LineSearchFailed);
  CHECK(!r.converged());
  CHECK(r.theta_star == pin);
  CHECK(r.trace.size() == 1);
  CHECK(r.flow.theta == pin);
  CHECK(r.n_forward == 1);
}

TEST_CASE("problem validation rejects inconsistent inputs") {
  const auto& d = re100();
  const SbiProblem good = make_sbi_problem(vessel_coarse(), FluidProps{},
                                           coarse_psf_vpd9(), d.clean);

  SbiProblem p = good;
  p.theta0 = good.box.hi * 2.0;
  CHECK_THROWS_AS(SbiSolver{p}, std::invalid_argument);

  p = good;
  p.mesh = &vessel_medium();  // operator was built on the coarse mesh
  CHECK_THROWS_AS(SbiSolver{p}, std::invalid_argument);

  p = good;
  static VoxelData shrunk;
  shrunk = d.clean;
  shrunk.grid.ny -= 1;
  shrunk.grid.alpha.resize(shrunk.grid.nx * shrunk.grid.ny);
  shrunk.values.resize(2 * shrunk.grid.alpha.size());
  p.observed = &shrunk;
  CHECK_THROWS_AS(SbiSolver{p}, std::invalid_argument);

  p = good;
  p.settings.armijo_c1 = 0.0;
  CHECK_THROWS_AS(SbiSolver{p}, std::invalid_argument);

  p = good;
  p.settings.backtrack = 1.0;
  CHECK_THROWS_AS(SbiSolver{p}, std::invalid_argument);
}

TEST_CASE("result serialization carries the scalars and the trace") {
  const auto& d = re100();
  SbiProblem p = make_sbi_problem(vessel_coarse(), FluidProps{},
                                  coarse_psf_vpd9(), d.clean);
  p.theta0 = 0.5 * d.theta_true;
  const SbiResult r = optimize(p);
  const std::string js = sbi_result_json(r);

  CHECK(js.find("\"theta_star\"") != std::string::npos);
  CHECK(js.find("\"status\": \"converged\"") != std::string::npos);
  CHECK(js.find("\"trace\"") != std::string::npos);
  CHECK(js.find("\"backtracks\"") != std::string::npos);

  size_t rows = 0, pos = 0;
  while ((pos = js.find("\"iter\":", pos)) != std::string::npos) {
    ++rows;
    pos += 7;
  }
  CHECK(rows == r.trace.size());

  long depth = 0;
  for (char c : js) {
    if (c == '{') ++depth;
    if (c == '}') --depth;
  }
  CHECK(depth == 0);
}
