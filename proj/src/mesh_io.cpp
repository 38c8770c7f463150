#include "mpetdg/mesh_io.hpp"

#include <fstream>
#include <stdexcept>

namespace mpetdg {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

} // namespace

PolyMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open mesh file");
  PolyMesh mesh;
  int nv = 0, ne = 0;
  if (!(in >> mesh.dim >> nv >> ne)) fail(path, "malformed header");
  if (mesh.dim != 2 && mesh.dim != 3) fail(path, "dim must be 2 or 3");
  if (nv < mesh.dim + 1 || ne < 1) fail(path, "implausible vertex/element counts");
  mesh.vertices.resize(nv, Vec::Zero());
  for (int i = 0; i < nv; ++i)
    for (int a = 0; a < mesh.dim; ++a)
      if (!(in >> mesh.vertices[i][a])) fail(path, "truncated vertex list");
  mesh.elements.resize(ne);
  for (int e = 0; e < ne; ++e) {
    int k = 0;
    if (!(in >> k) || k < mesh.dim + 1) fail(path, "bad element vertex count");
    mesh.elements[e].vertices.resize(k);
    for (int i = 0; i < k; ++i) {
      int v;
      if (!(in >> v) || v < 0 || v >= nv) fail(path, "element vertex id out of range");
      mesh.elements[e].vertices[i] = v;
    }
    int m = 0;
    if (!(in >> m) || m < 1) fail(path, "bad sub-simplex count");
    mesh.elements[e].sub_simplices.resize(m);
    for (int s = 0; s < m; ++s) {
      mesh.elements[e].sub_simplices[s].resize(mesh.dim + 1);
      for (int i = 0; i < mesh.dim + 1; ++i) {
        int v;
        if (!(in >> v) || v < 0 || v >= nv) fail(path, "sub-simplex vertex id out of range");
        mesh.elements[e].sub_simplices[s][i] = v;
      }
    }
  }
  finalize_mesh(mesh);
  mesh.validate();
  return mesh;
}

void write_mesh(const PolyMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out.precision(17);
  out << mesh.dim << " " << mesh.n_vertices() << " " << mesh.n_elements() << "\n";
  for (const auto& v : mesh.vertices) {
    out << v[0] << " " << v[1];
    if (mesh.dim == 3) out << " " << v[2];
    out << "\n";
  }
  for (const auto& e : mesh.elements) {
    out << e.vertices.size();
    for (int v : e.vertices) out << " " << v;
    out << "\n" << e.sub_simplices.size() << "\n";
    for (const auto& s : e.sub_simplices) {
      for (size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
      out << "\n";
    }
  }
  if (!out) fail(path, "write failure");
}

void write_fields(const PolyMesh& mesh, const DgSpace& space_u, const DgSpace& space_q,
                  const Eigen::VectorXd& U, const Eigen::VectorXd& P, const std::string& path) {
  const int d = mesh.dim;
  const int J = P.size() == 0 ? 0 : static_cast<int>(P.size() / space_q.n_dofs());
  int n_cells = 0;
  for (const auto& e : mesh.elements) n_cells += static_cast<int>(e.sub_simplices.size());
  const int verts_per_cell = d + 1;
  const int n_points = n_cells * verts_per_cell;

  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out.precision(12);
  out << "# vtk DataFile Version 3.0\n";
  out << "mpetdg fields\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n_points << " double\n";
  for (const auto& e : mesh.elements)
    for (const auto& s : e.sub_simplices)
      for (int v : s)
        out << mesh.vertices[v][0] << " " << mesh.vertices[v][1] << " "
            << (d == 3 ? mesh.vertices[v][2] : 0.0) << "\n";

  out << "CELLS " << n_cells << " " << n_cells * (verts_per_cell + 1) << "\n";
  int pid = 0;
  for (const auto& e : mesh.elements)
    for (size_t s = 0; s < e.sub_simplices.size(); ++s) {
      out << verts_per_cell;
      for (int i = 0; i < verts_per_cell; ++i) out << " " << pid++;
      out << "\n";
    }
  out << "CELL_TYPES " << n_cells << "\n";
  const int cell_type = (d == 3) ? 10 : 5; // tetra / triangle
  for (int c = 0; c < n_cells; ++c) out << cell_type << "\n";

  out << "POINT_DATA " << n_points << "\n";
  out << "SCALARS displacement_magnitude double 1\n";
  out << "LOOKUP_TABLE default\n";
  Eigen::VectorXd uval;
  Eigen::MatrixXd ugrad;
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (const auto& s : mesh.elements[e].sub_simplices)
      for (int v : s) {
        space_u.eval_vector(e, U, mesh.vertices[v], uval, ugrad);
        out << uval.head(d).norm() << "\n";
      }
  for (int j = 0; j < J; ++j) {
    out << "SCALARS pressure_" << (j + 1) << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    Eigen::VectorXd pj = P.segment(j * space_q.n_dofs(), space_q.n_dofs());
    for (int e = 0; e < mesh.n_elements(); ++e)
      for (const auto& s : mesh.elements[e].sub_simplices)
        for (int v : s) out << space_q.eval_scalar(e, pj, mesh.vertices[v]) << "\n";
  }
  if (!out) fail(path, "write failure");
}

} // namespace mpetdg
