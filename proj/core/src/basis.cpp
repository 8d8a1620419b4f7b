#include "sbiwss/basis.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace sbiwss {

std::vector<Vec2> TriBasis::lattice(int degree) {
  const double p = degree;
  const Vec2 v0 = {0.0, 0.0}, v1 = {1.0, 0.0}, v2 = {0.0, 1.0};
  std::vector<Vec2> nodes = {v0, v1, v2};
  const Vec2 verts[3] = {v0, v1, v2};
  for (int e = 0; e < 3; ++e) {
    const Vec2& a = verts[e];
    const Vec2& b = verts[(e + 1) % 3];
    for (int k = 1; k < degree; ++k) {
      const double t = k / p;
      nodes.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
  }
  // interior lattice (row by row); degree 3 has the single barycentric center
  for (int i = 1; i < degree; ++i)
    for (int j = 1; i + j < degree; ++j)
      nodes.push_back({i / p, j / p});
  return nodes;
}

TriBasis::TriBasis(int degree) : degree_(degree), nodes_(lattice(degree)) {
  if (degree < 1 || degree > 6) throw std::invalid_argument("TriBasis: unsupported degree");
  const int n = size();
  Eigen::MatrixXd vand(n, n);
  std::vector<double> m(n);
  for (int r = 0; r < n; ++r) {
    mono(nodes_[r][0], nodes_[r][1], m.data());
    for (int c = 0; c < n; ++c) vand(r, c) = m[c];
  }
  const Eigen::MatrixXd inv = vand.inverse();  // column k: coefficients of shape k
  coef_.resize(static_cast<size_t>(n) * n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) coef_[static_cast<size_t>(c) * n + r] = inv(r, c);
}

void TriBasis::mono(double xi, double eta, double* out) const {
  int idx = 0;
  for (int d = 0; d <= degree_; ++d)
    for (int j = 0; j <= d; ++j) {  // xi^(d-j) eta^j
      double v = 1.0;
      for (int k = 0; k < d - j; ++k) v *= xi;
      for (int k = 0; k < j; ++k) v *= eta;
      out[idx++] = v;
    }
}

void TriBasis::mono_grad(double xi, double eta, double* dxi, double* deta) const {
  int idx = 0;
  for (int d = 0; d <= degree_; ++d)
    for (int j = 0; j <= d; ++j) {
      const int a = d - j, b = j;
      double xa = 1.0, eb = 1.0, xam = (a > 0) ? 1.0 : 0.0, ebm = (b > 0) ? 1.0 : 0.0;
      for (int k = 0; k < a; ++k) xa *= xi;
      for (int k = 0; k + 1 < a; ++k) xam *= xi;
      for (int k = 0; k < b; ++k) eb *= eta;
      for (int k = 0; k + 1 < b; ++k) ebm *= eta;
      dxi[idx] = a * xam * eb;
      deta[idx] = b * xa * ebm;
      ++idx;
    }
}

void TriBasis::eval(double xi, double eta, double* values) const {
  const int n = size();
  std::vector<double> m(n);
  mono(xi, eta, m.data());
  for (int k = 0; k < n; ++k) {
    const double* c = coef_.data() + static_cast<size_t>(k) * n;
    double v = 0.0;
    for (int r = 0; r < n; ++r) v += c[r] * m[r];
    values[k] = v;
  }
}

void TriBasis::eval_grad(double xi, double eta, double* dxi, double* deta) const {
  const int n = size();
  std::vector<double> mx(n), me(n);
  mono_grad(xi, eta, mx.data(), me.data());
  for (int k = 0; k < n; ++k) {
    const double* c = coef_.data() + static_cast<size_t>(k) * n;
    double vx = 0.0, ve = 0.0;
    for (int r = 0; r < n; ++r) {
      vx += c[r] * mx[r];
      ve += c[r] * me[r];
    }
    dxi[k] = vx;
    deta[k] = ve;
  }
}

const TriBasis& tri_basis(int degree) {
  static const TriBasis p1(1), p2(2), p3(3);
  switch (degree) {
    case 1: return p1;
    case 2: return p2;
    case 3: return p3;
    default: throw std::invalid_argument("tri_basis: degree must be 1..3");
  }
}

}  // namespace sbiwss
