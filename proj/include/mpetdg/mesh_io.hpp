#ifndef MPETDG_MESH_IO_HPP
#define MPETDG_MESH_IO_HPP

#include <string>

#include "mpetdg/dg_space.hpp"
#include "mpetdg/mesh.hpp"

namespace mpetdg {

/// Text mesh format:
///   dim n_vertices n_elements
///   x y [z]                      (n_vertices lines)
///   per element:
///     k v_1 ... v_k              (vertex ids of the polytope)
///     m
///     s_1 ... s_{dim+1}          (m sub-simplex lines, global vertex ids)
PolyMesh read_mesh(const std::string& path);
void write_mesh(const PolyMesh& mesh, const std::string& path);

/// Legacy ASCII unstructured-grid file with one cell per sub-simplex and
/// per-vertex point data (vertices duplicated per cell so that discontinuous
/// fields are rendered faithfully): displacement magnitude and one scalar per
/// network pressure.
void write_fields(const PolyMesh& mesh, const DgSpace& space_u, const DgSpace& space_q,
                  const Eigen::VectorXd& U, const Eigen::VectorXd& P, const std::string& path);

} // namespace mpetdg

#endif
