#ifndef SBIWSS_UNITS_HPP
#define SBIWSS_UNITS_HPP

//! Unit conventions used throughout the library:
//!   lengths        cm
//!   velocities     cm/s
//!   kinematic visc cm^2/s internally (stored in SI, converted once here)
//!   pressures      kinematic, cm^2/s^2 (physical pressure = rho0 * p * 1e-4 Pa)
//!   wall shear     Pa
//! All conversions live in this header so no other file hard-codes factors.

#include <stdexcept>

namespace sbiwss {

struct FluidProps {
  double rho0 = 1060.0;   // density, kg/m^3
  double nu = 2.83e-6;    // kinematic viscosity, m^2/s

  double nu_cm2_s() const { return nu * 1.0e4; }
  double dynamic_viscosity() const { return rho0 * nu; }  // Pa s
};

// Physical pressure in Pa from the kinematic pressure (cm^2/s^2) the solver
// carries.  1 cm^2/s^2 = 1e-4 m^2/s^2.
inline double kinematic_pressure_to_pa(double p_kin_cm2_s2, const FluidProps& props) {
  return props.rho0 * p_kin_cm2_s2 * 1.0e-4;
}

// Re = D * theta / nu with D and theta in cm units.
inline double reynolds_to_theta(double re, double diameter_cm, const FluidProps& props) {
  if (diameter_cm <= 0.0) throw std::invalid_argument("reynolds_to_theta: diameter must be positive");
  return re * props.nu_cm2_s() / diameter_cm;
}

inline double theta_to_reynolds(double theta_cm_s, double diameter_cm, const FluidProps& props) {
  return diameter_cm * theta_cm_s / props.nu_cm2_s();
}

}  // namespace sbiwss

#endif
