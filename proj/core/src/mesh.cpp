#include "sbiwss/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sbiwss {

std::vector<int> Mesh::edge_local_nodes(int edge) const {
  const int a = edge, b = (edge + 1) % 3;
  std::vector<int> idx;
  idx.push_back(a);
  for (int k = 0; k < p_geo - 1; ++k) idx.push_back(3 + edge * (p_geo - 1) + k);
  idx.push_back(b);
  return idx;
}

double Mesh::vertex_area(int e) const {
  const int* n = elem(e);
  const Vec2& a = nodes[n[0]];
  const Vec2& b = nodes[n[1]];
  const Vec2& c = nodes[n[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double Mesh::quality(int e) const {
  const int* n = elem(e);
  const Vec2& p0 = nodes[n[0]];
  const Vec2& p1 = nodes[n[1]];
  const Vec2& p2 = nodes[n[2]];
  const double a = std::hypot(p1[0] - p0[0], p1[1] - p0[1]);
  const double b = std::hypot(p2[0] - p1[0], p2[1] - p1[1]);
  const double c = std::hypot(p0[0] - p2[0], p0[1] - p2[1]);
  // 2 r_in / r_circ
  return (b + c - a) * (c + a - b) * (a + b - c) / (a * b * c);
}

double Mesh::min_quality() const {
  double q = 1.0;
  for (int e = 0; e < num_elems(); ++e) q = std::min(q, quality(e));
  return q;
}

void Mesh::validate() const {
  if (p_geo != 1 && p_geo != 2 && p_geo != 3)
    throw std::runtime_error("mesh: unsupported geometric order");
  if (static_cast<int>(conn.size()) % nodes_per_elem() != 0)
    throw std::runtime_error("mesh: connectivity size not a multiple of nodes per element");
  for (int id : conn)
    if (id < 0 || id >= num_nodes()) throw std::runtime_error("mesh: node id out of range");
  for (int e = 0; e < num_elems(); ++e) {
    for (int k = 0; k < 3; ++k)
      if (elem(e)[k] >= num_vertices)
        throw std::runtime_error("mesh: element vertex refers to a non-vertex node");
    if (vertex_area(e) <= 0.0) throw std::runtime_error("mesh: non-positive element area");
  }
  for (const BoundaryFace& f : boundary)
    if (f.elem < 0 || f.elem >= num_elems() || f.edge < 0 || f.edge > 2)
      throw std::runtime_error("mesh: invalid boundary face");
}

std::string tag_name(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Wall: return "wall";
    case BoundaryTag::Inflow: return "inflow";
    case BoundaryTag::Outflow: return "outflow";
  }
  return "wall";
}

BoundaryTag tag_from_name(const std::string& name) {
  if (name == "wall") return BoundaryTag::Wall;
  if (name == "inflow") return BoundaryTag::Inflow;
  if (name == "outflow") return BoundaryTag::Outflow;
  throw std::runtime_error("mesh: unknown boundary tag '" + name + "'");
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  char buf[64];
  out << "sbiwss-mesh 1\n";
  out << "p_geo " << mesh.p_geo << "\n";
  out << "nodes " << mesh.num_nodes() << " vertices " << mesh.num_vertices << "\n";
  for (const Vec2& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p[0], p[1]);
    out << buf;
  }
  out << "elements " << mesh.num_elems() << "\n";
  const int npe = mesh.nodes_per_elem();
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* n = mesh.elem(e);
    for (int k = 0; k < npe; ++k) out << n[k] << (k + 1 == npe ? '\n' : ' ');
  }
  out << "boundary " << mesh.boundary.size() << "\n";
  for (const BoundaryFace& f : mesh.boundary)
    out << f.elem << ' ' << f.edge << ' ' << tag_name(f.tag) << '\n';
}

void save_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("mesh: cannot open '" + path + "' for writing");
  write_mesh(out, mesh);
}

Mesh read_mesh(std::istream& in) {
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "sbiwss-mesh" || version != 1)
    throw std::runtime_error("mesh: bad header");
  Mesh mesh;
  int n_nodes = 0, n_elems = 0, n_faces = 0;
  if (!(in >> word >> mesh.p_geo) || word != "p_geo") throw std::runtime_error("mesh: bad p_geo line");
  if (!(in >> word >> n_nodes) || word != "nodes") throw std::runtime_error("mesh: bad nodes line");
  if (!(in >> word >> mesh.num_vertices) || word != "vertices")
    throw std::runtime_error("mesh: bad vertices field");
  mesh.nodes.resize(n_nodes);
  for (Vec2& p : mesh.nodes)
    if (!(in >> p[0] >> p[1])) throw std::runtime_error("mesh: truncated node block");
  if (!(in >> word >> n_elems) || word != "elements")
    throw std::runtime_error("mesh: bad elements line");
  mesh.conn.resize(static_cast<size_t>(n_elems) * mesh.nodes_per_elem());
  for (int& id : mesh.conn)
    if (!(in >> id)) throw std::runtime_error("mesh: truncated element block");
  if (!(in >> word >> n_faces) || word != "boundary")
    throw std::runtime_error("mesh: bad boundary line");
  mesh.boundary.resize(n_faces);
  for (BoundaryFace& f : mesh.boundary) {
    std::string tag;
    if (!(in >> f.elem >> f.edge >> tag)) throw std::runtime_error("mesh: truncated boundary block");
    f.tag = tag_from_name(tag);
  }
  mesh.validate();
  return mesh;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mesh: cannot open '" + path + "'");
  return read_mesh(in);
}

}  // namespace sbiwss
