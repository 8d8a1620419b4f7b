#ifndef SBIWSS_FLOW_SOLUTION_HPP
#define SBIWSS_FLOW_SOLUTION_HPP

//! A converged flow state: the mesh it lives on, the fluid, the inflow
//! centerline speed, and the dof vector in [u_x | u_y | p] layout (see
//! FlowSpace).  Plain data plus lossless text serialization; evaluation at
//! arbitrary points goes through FlowSampler.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbiwss/fem_space.hpp"
#include "sbiwss/locate.hpp"
#include "sbiwss/mesh.hpp"
#include "sbiwss/units.hpp"

namespace sbiwss {

struct FlowSolution {
  Mesh mesh;
  FluidProps props;
  double theta = 0.0;  // inflow centerline speed, cm/s
  int n_vel = 0;
  int n_pre = 0;
  std::vector<double> u;  // 2 * n_vel + n_pre

  double node_ux(int n) const { return u[n]; }
  double node_uy(int n) const { return u[n_vel + n]; }
  double node_speed(int n) const;
};

// Largest nodal speed, the velocity scale used for noise calibration.
double peak_speed(const FlowSolution& sol);

// Net outward volume flux through all faces carrying the tag, evaluated with
// a 6-point Gauss rule along each curved face.
double boundary_flux(const FlowSolution& sol, BoundaryTag tag);

void write_solution(std::ostream& out, const FlowSolution& sol);
void save_solution(const std::string& path, const FlowSolution& sol);
FlowSolution read_solution(std::istream& in);
FlowSolution load_solution(const std::string& path);

// Point evaluation by inverse isoparametric mapping with a uniform bin grid
// accelerating element lookup.  Keeps a reference to the solution.
class FlowSampler {
 public:
  explicit FlowSampler(const FlowSolution& sol);

  // locate returns false when p is outside every element (up to a 1e-9
  // barycentric slack); xi is the reference coordinate in elem.
  bool locate(const Vec2& p, int& elem, Vec2& xi) const;

  Vec2 velocity(const Vec2& p) const;                         // 0 outside
  std::array<double, 4> velocity_gradient(const Vec2& p) const;  // row-major dv_i/dx_j
  double pressure(const Vec2& p) const;                       // kinematic

  Vec2 velocity_at(int elem, const Vec2& xi) const;
  std::array<double, 4> velocity_gradient_at(int elem, const Vec2& xi) const;
  double pressure_at(int elem, const Vec2& xi) const;

 private:
  const FlowSolution& sol_;
  FlowSpace space_;
  MeshLocator locator_;
};

}  // namespace sbiwss

#endif
