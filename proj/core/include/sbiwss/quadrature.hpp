#ifndef SBIWSS_QUADRATURE_HPP
#define SBIWSS_QUADRATURE_HPP

//! Gauss-Legendre rules on [0, 1] and collapsed (Duffy) tensor rules on the
//! reference triangle.  The Duffy map xi = u, eta = v (1 - u) carries an
//! n x n tensor rule to the triangle; after the transform a bivariate
//! polynomial of total degree d is integrated exactly whenever 2n - 1 >= d + 1.

#include <vector>

#include "sbiwss/geometry.hpp"

namespace sbiwss {

struct QuadRule1D {
  std::vector<double> points;   // in (0, 1)
  std::vector<double> weights;  // sum to 1
};

// n-point Gauss-Legendre on [0, 1].
QuadRule1D gauss_legendre(int n);

struct TriQuadRule {
  std::vector<Vec2> points;     // inside the reference triangle
  std::vector<double> weights;  // sum to 1/2
  int size() const { return static_cast<int>(points.size()); }
};

// Collapsed n x n tensor rule on the reference triangle.
TriQuadRule tri_quadrature(int n);

// Composite version: the reference triangle split into levels^2 congruent
// subtriangles, the n x n rule mapped into each.  levels = 1 is tri_quadrature.
TriQuadRule tri_quadrature_composite(int n, int levels);

}  // namespace sbiwss

#endif
