#ifndef SBIWSS_BASIS_HPP
#define SBIWSS_BASIS_HPP

//! Nodal Lagrange bases on the reference triangle
//!   T = { (xi, eta) : xi >= 0, eta >= 0, xi + eta <= 1 }
//! with nodes on the equispaced lattice ordered exactly like Mesh elements
//! (vertices, then edge nodes per edge in edge direction, then interior).

#include <vector>

#include "sbiwss/geometry.hpp"

namespace sbiwss {

class TriBasis {
 public:
  explicit TriBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec2>& nodes() const { return nodes_; }

  // values[size()], and d/dxi, d/deta of every shape function at (xi, eta)
  void eval(double xi, double eta, double* values) const;
  void eval_grad(double xi, double eta, double* dxi, double* deta) const;

  static std::vector<Vec2> lattice(int degree);  // reference node positions

 private:
  int degree_;
  std::vector<Vec2> nodes_;
  std::vector<double> coef_;  // column k = monomial coefficients of shape k
  void mono(double xi, double eta, double* out) const;
  void mono_grad(double xi, double eta, double* dxi, double* deta) const;
};

// Shared immutable instances (degrees 1..3).
const TriBasis& tri_basis(int degree);

}  // namespace sbiwss

#endif
