#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "sbiwss/fem_space.hpp"
#include "sbiwss/flow_solution.hpp"
#include "sbiwss/flow_solver.hpp"
#include "sbiwss/geometry.hpp"
#include "sbiwss/meshing.hpp"
#include "sbiwss/wss.hpp"

using namespace sbiwss;

namespace {

ChannelSpec vessel_spec() {
  ChannelSpec spec;
  spec.validate();
  return spec;
}

ChannelSpec straight_spec() {
  ChannelSpec spec;
  spec.bump_area = 0.0;
  return spec;
}

const Mesh& vessel_mesh() {
  static const Mesh mesh = [] {
    MeshingOptions opt;
    opt.h = calibrated_h(MeshResolution::Coarse);
    return elevate_order(generate_mesh(vessel_spec(), opt), 3, vessel_spec());
  }();
  return mesh;
}

const Mesh& straight_mesh() {
  static const Mesh mesh = [] {
    MeshingOptions opt;
    opt.h = 0.15;
    return elevate_order(generate_mesh(straight_spec(), opt), 3, straight_spec());
  }();
  return mesh;
}

const FluidProps props{};

double theta_for(double re, const ChannelSpec& spec) {
  return reynolds_to_theta(re, spec.diameter(), props);
}

const FlowSolution& vessel_solution(double re) {
  static std::map<double, FlowSolution> cache;
  auto it = cache.find(re);
  if (it == cache.end())
    it = cache.emplace(re, solve_flow(vessel_mesh(), props,
                                      theta_for(re, vessel_spec())))
             .first;
  return it->second;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("taylor-hood space: velocity per node, pressure on vertices plus edges") {
  const Mesh& mesh = vessel_mesh();
  const FlowSpace sp = make_flow_space(mesh);
  CHECK(sp.n_vel == mesh.num_nodes());
  CHECK(static_cast<int>(sp.pre_conn.size()) == mesh.num_elems() * 6);

  // independent unique-edge count from the vertex connectivity
  std::set<std::pair<int, int>> edges;
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* c = mesh.elem(e);
    for (int k = 0; k < 3; ++k) {
      const auto mm = std::minmax(c[k], c[(k + 1) % 3]);
      edges.insert({mm.first, mm.second});
    }
  }
  CHECK(sp.n_pre == mesh.num_vertices + static_cast<int>(edges.size()));

  // each geometric edge carries exactly one pressure dof, shared by both
  // incident elements
  std::map<std::pair<int, int>, int> seen;
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* c = mesh.elem(e);
    for (int k = 0; k < 3; ++k) {
      const auto mm = std::minmax(c[k], c[(k + 1) % 3]);
      const int dof = sp.pre_conn[static_cast<size_t>(e) * 6 + 3 + k];
      CHECK(dof >= mesh.num_vertices);
      CHECK(dof < sp.n_pre);
      auto [it, fresh] = seen.try_emplace({mm.first, mm.second}, dof);
      if (!fresh) CHECK(it->second == dof);
    }
  }
  // vertex dofs reuse vertex ids
  for (int e = 0; e < mesh.num_elems(); ++e)
    for (int k = 0; k < 3; ++k)
      CHECK(sp.pre_conn[static_cast<size_t>(e) * 6 + k] == mesh.elem(e)[k]);
}

TEST_CASE("boundary sets: parabolic inflow vanishing at no-slip corners") {
  const Mesh& mesh = vessel_mesh();
  const FlowBC bc = make_flow_bc(mesh);
  CHECK(bc.y_hi > 0.29);
  CHECK(bc.y_lo == doctest::Approx(-bc.y_hi).epsilon(1e-12));

  std::set<int> wall(bc.wall_nodes.begin(), bc.wall_nodes.end());
  const double span = bc.y_hi - bc.y_lo;
  for (size_t i = 0; i < bc.inflow_nodes.size(); ++i) {
    const int n = bc.inflow_nodes[i];
    CHECK(wall.count(n) == 0);  // corners must not appear here
    const double y = mesh.nodes[n][1];
    const double want = 4.0 * (y - bc.y_lo) * (bc.y_hi - y) / (span * span);
    CHECK(bc.inflow_shape[i] == doctest::Approx(want).epsilon(1e-14));
    CHECK(bc.inflow_shape[i] > 0.0);
    CHECK(bc.inflow_shape[i] <= 1.0 + 1e-12);
  }
}

TEST_CASE("poiseuille flow in a straight channel is exact") {
  const ChannelSpec spec = straight_spec();
  const double b = spec.half_width0;
  const double theta = theta_for(1000.0, spec);
  CHECK(theta == doctest::Approx(47.166666666666667).epsilon(1e-15));

  const FlowSolution sol = solve_flow(straight_mesh(), props, theta);

  double err_u = 0.0;
  for (int n = 0; n < sol.mesh.num_nodes(); ++n) {
    const double y = sol.mesh.nodes[n][1];
    const double exact = theta * (1.0 - (y / b) * (y / b));
    err_u = std::max(err_u, std::abs(sol.node_ux(n) - exact));
    err_u = std::max(err_u, std::abs(sol.node_uy(n)));
  }
  CHECK(err_u <= 1e-9 * theta);

  // kinematic pressure drops linearly to zero at the do-nothing outflow
  const double nu = props.nu_cm2_s();
  const double slope = 2.0 * nu * theta / (b * b);
  double err_p = 0.0;
  for (int v = 0; v < sol.mesh.num_vertices; ++v) {
    const double x = sol.mesh.nodes[v][0];
    const double exact = slope * (spec.x_max - x);
    err_p = std::max(err_p, std::abs(sol.u[2 * sol.n_vel + v] - exact));
  }
  CHECK(err_p <= 1e-8 * slope * (spec.x_max - spec.x_min));

  // wall shear stress oracle 2 mu theta / b on both walls, signed positive
  for (WallSide side : {WallSide::Top, WallSide::Bottom}) {
    const auto samples =
        compute_wss(sol, spec, side, linspace(0.4, 5.6, 7));
    for (const WallSample& ws : samples) {
      CHECK(ws.wss_full == doctest::Approx(0.94327044444444444).epsilon(1e-8));
      CHECK(std::abs(ws.wss_shortcut - ws.wss_full) <= 5e-13);
      CHECK(std::abs(ws.tangent[0] - 1.0) <= 1e-12);
    }
  }

  // interior point samples hit the same parabola
  const FlowSampler sampler(sol);
  for (const Vec2 p : {Vec2{0.73, 0.11}, Vec2{2.91, -0.22}, Vec2{5.13, 0.04}}) {
    const Vec2 u = sampler.velocity(p);
    CHECK(std::abs(u[0] - theta * (1.0 - (p[1] / b) * (p[1] / b))) <=
          1e-9 * theta);
    CHECK(std::abs(u[1]) <= 1e-9 * theta);
    const auto g = sampler.velocity_gradient(p);
    CHECK(std::abs(g[1] + 2.0 * theta * p[1] / (b * b)) <= 1e-7 * theta / b);
    CHECK(std::abs(g[0]) <= 1e-7 * theta / b);
  }
}

TEST_CASE("inflow flux matches the prescribed parabola and mass is conserved") {
  const ChannelSpec vspec = vessel_spec();

  const FlowSolution& sol = vessel_solution(500.0);
  const double a_in = half_width(vspec, vspec.x_min);
  const double want_in = -(4.0 / 3.0) * sol.theta * a_in;
  const double got_in = boundary_flux(sol, BoundaryTag::Inflow);
  CHECK(got_in == doctest::Approx(want_in).epsilon(1e-12));

  const double got_out = boundary_flux(sol, BoundaryTag::Outflow);
  CHECK(std::abs(got_in + got_out) <= 1e-10 * std::abs(got_in));
  CHECK(std::abs(boundary_flux(sol, BoundaryTag::Wall)) <=
        1e-10 * std::abs(got_in));

  const ChannelSpec sspec = straight_spec();
  const double theta = theta_for(1000.0, sspec);
  const FlowSolution ssol = solve_flow(straight_mesh(), props, theta);
  const double want_s = -(4.0 / 3.0) * theta * sspec.half_width0;
  CHECK(boundary_flux(ssol, BoundaryTag::Inflow) ==
        doctest::Approx(want_s).epsilon(1e-12));
}

TEST_CASE("full traction and gradient shortcut coincide on the discrete wall") {
  const ChannelSpec spec = vessel_spec();
  const FlowSolution& sol = vessel_solution(500.0);
  const double len = wall_arc_length(spec, spec.x_min, spec.x_max);
  const auto samples =
      compute_wss(sol, spec, WallSide::Top, linspace(0.02 * len, 0.98 * len, 60));
  for (const WallSample& ws : samples) {
    CHECK(std::abs(ws.wss_full - ws.wss_shortcut) <=
          1e-10 * std::max(1.0, std::abs(ws.wss_full)));
    const double nlen = std::hypot(ws.normal[0], ws.normal[1]);
    CHECK(nlen == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ws.normal[1] > 0.0);  // outward on the top wall points up
  }
}

TEST_CASE("newton with continuation converges at the highest inflow rate") {
  const ChannelSpec spec = vessel_spec();
  NewtonTrace trace;
  FlowSystem sys(vessel_mesh(), props);
  Eigen::VectorXd u;
  REQUIRE(sys.solve(theta_for(1000.0, spec), u, &trace));

  CHECK(trace.stage_residuals.size() == 3);  // ceil(1000 / 400)
  for (const auto& stage : trace.stage_residuals) {
    REQUIRE(stage.size() >= 2);
    CHECK(stage.size() <= 12);
    CHECK(stage.back() <= 1e-10 * std::max(stage.front(), 1.0));
  }

  const FlowSolution sol = sys.make_solution(u, theta_for(1000.0, spec));
  const double peak = peak_speed(sol);
  CHECK(peak > 1.2 * sol.theta);  // the throat accelerates the jet
  CHECK(peak < 4.0 * sol.theta);
}

TEST_CASE("warm restart converges directly without the continuation ladder") {
  const ChannelSpec spec = vessel_spec();
  FlowSystem sys(vessel_mesh(), props);
  Eigen::VectorXd u;
  NewtonTrace t1;
  REQUIRE(sys.solve(theta_for(500.0, spec), u, &t1));
  CHECK(t1.stage_residuals.size() == 2);

  NewtonTrace t2;
  REQUIRE(sys.solve(1.02 * theta_for(500.0, spec), u, &t2));
  CHECK(t2.stage_residuals.size() == 1);
  CHECK(t2.total_iterations <= 6);
}

TEST_CASE("assembled jacobian matches directional finite differences") {
  const ChannelSpec spec = vessel_spec();
  FlowSystem sys(vessel_mesh(), props);
  const double theta = theta_for(100.0, spec);
  Eigen::VectorXd u;
  REQUIRE(sys.solve(theta, u));

  unsigned long long s = 0x2545f4914f6cdd1dULL;
  auto next = [&s]() {
    s ^= s << 13; s ^= s >> 7; s ^= s << 17;
    return static_cast<double>(s % 1000000007ull) / 1000000007.0 - 0.5;
  };
  Eigen::VectorXd v(sys.n_total());
  for (int i = 0; i < sys.n_total(); ++i) v[i] = next();

  Eigen::SparseMatrix<double> jac;
  sys.assemble(u, theta, nullptr, &jac);
  const Eigen::VectorXd jv = jac * v;

  const double eps = 1e-5;
  Eigen::VectorXd rp(sys.n_total()), rm(sys.n_total());
  sys.assemble(u + eps * v, theta, &rp, nullptr);
  sys.assemble(u - eps * v, theta, &rm, nullptr);
  const Eigen::VectorXd fd = (rp - rm) / (2.0 * eps);

  CHECK((jv - fd).norm() <= 1e-8 * jv.norm());
}

TEST_CASE("adjoint solve inverts the transposed jacobian") {
  const ChannelSpec spec = vessel_spec();
  FlowSystem sys(vessel_mesh(), props);
  const double theta = theta_for(500.0, spec);
  Eigen::VectorXd u;
  REQUIRE(sys.solve(theta, u));

  unsigned long long s = 0x9e3779b97f4a7c15ULL;
  auto next = [&s]() {
    s ^= s << 13; s ^= s >> 7; s ^= s << 17;
    return static_cast<double>(s % 1000000007ull) / 1000000007.0 - 0.5;
  };
  Eigen::VectorXd rhs(sys.n_total());
  for (int i = 0; i < sys.n_total(); ++i) rhs[i] = next();

  const Eigen::VectorXd lambda = sys.adjoint_solve(u, theta, rhs);
  Eigen::SparseMatrix<double> jac;
  sys.assemble(u, theta, nullptr, &jac);
  CHECK((jac.transpose() * lambda - rhs).norm() <= 1e-9 * rhs.norm());

  // residual is affine in theta on the boundary rows and nowhere else
  const Eigen::VectorXd dth = sys.dresidual_dtheta();
  Eigen::VectorXd ra(sys.n_total()), rb(sys.n_total());
  sys.assemble(u, theta + 0.5, &ra, nullptr);
  sys.assemble(u, theta - 0.5, &rb, nullptr);
  CHECK((ra - rb - dth).norm() <= 1e-12 * std::max(1.0, dth.norm()));
}

TEST_CASE("repeated solves are bitwise deterministic") {
  const ChannelSpec spec = vessel_spec();
  const double theta = theta_for(500.0, spec);
  const FlowSolution a = solve_flow(vessel_mesh(), props, theta);
  const FlowSolution b = solve_flow(vessel_mesh(), props, theta);
  REQUIRE(a.u.size() == b.u.size());
  for (size_t i = 0; i < a.u.size(); ++i) CHECK(a.u[i] == b.u[i]);
}

TEST_CASE("wall shear does not scale linearly with the inflow rate") {
  const ChannelSpec spec = vessel_spec();
  const auto arcs = linspace(1.5, 4.5, 40);
  const auto w100 = compute_wss(vessel_solution(100.0), spec, WallSide::Top, arcs);
  const auto w500 = compute_wss(vessel_solution(500.0), spec, WallSide::Top, arcs);

  double scale = 0.0, dev = 0.0;
  for (size_t i = 0; i < arcs.size(); ++i) {
    scale = std::max(scale, std::abs(w500[i].wss_full));
    dev = std::max(dev, std::abs(w500[i].wss_full - 5.0 * w100[i].wss_full));
  }
  CHECK(dev >= 0.01 * scale);
}

TEST_CASE("flow state serialization round-trips bitwise") {
  const FlowSolution& sol = vessel_solution(500.0);
  std::stringstream ss;
  write_solution(ss, sol);
  const FlowSolution back = read_solution(ss);

  CHECK(back.theta == sol.theta);
  CHECK(back.n_vel == sol.n_vel);
  CHECK(back.n_pre == sol.n_pre);
  REQUIRE(back.u.size() == sol.u.size());
  for (size_t i = 0; i < sol.u.size(); ++i) CHECK(back.u[i] == sol.u[i]);
  REQUIRE(back.mesh.num_nodes() == sol.mesh.num_nodes());
  for (int n = 0; n < sol.mesh.num_nodes(); ++n) {
    CHECK(back.mesh.nodes[n][0] == sol.mesh.nodes[n][0]);
    CHECK(back.mesh.nodes[n][1] == sol.mesh.nodes[n][1]);
  }
}

TEST_CASE("sampler finds interior points and rejects exterior ones") {
  const FlowSolution& sol = vessel_solution(500.0);
  const FlowSampler sampler(sol);

  // element vertex centroids are always interior
  for (int e = 0; e < sol.mesh.num_elems(); e += 7) {
    const int* c = sol.mesh.elem(e);
    Vec2 p{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
      p[0] += sol.mesh.nodes[c[k]][0] / 3.0;
      p[1] += sol.mesh.nodes[c[k]][1] / 3.0;
    }
    int elem;
    Vec2 xi;
    CHECK(sampler.locate(p, elem, xi));
  }

  int elem;
  Vec2 xi;
  CHECK_FALSE(sampler.locate({-1.0, 0.0}, elem, xi));
  CHECK_FALSE(sampler.locate({3.0, 0.29}, elem, xi));  // inside the bump notch
  const Vec2 u = sampler.velocity({-1.0, 0.0});
  CHECK(u[0] == 0.0);
  CHECK(u[1] == 0.0);

  // nodal interpolation recovers nodal values
  for (int n = 0; n < sol.mesh.num_nodes(); n += 97) {
    const Vec2 un = sampler.velocity(sol.mesh.nodes[n]);
    CHECK(std::abs(un[0] - sol.node_ux(n)) <= 1e-9 * std::max(1.0, sol.theta));
    CHECK(std::abs(un[1] - sol.node_uy(n)) <= 1e-9 * std::max(1.0, sol.theta));
  }
}
