#ifndef MPETDG_MESH_HPP
#define MPETDG_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mpetdg {

using Vec = Eigen::Vector3d; // z component unused when dim == 2

/// Boundary condition kind attached to a face, per field.
enum class FaceKind : std::uint8_t { Interior, Dirichlet, Neumann };

/// A polytopic element: union of sub-simplices sharing one cell id.
struct Element {
  std::vector<int> vertices;               // all vertex ids of the element
  std::vector<std::vector<int>> sub_simplices; // each has dim+1 vertex ids
  double h = 0.0;                          // diameter (max pairwise vertex distance)
  Vec bbox_min = Vec::Zero();
  Vec bbox_max = Vec::Zero();
  double measure = 0.0;
};

/// A single (d-1)-simplex piece of an element interface or of the boundary.
/// Polygonal interfaces in 3D appear as several triangular faces.
struct Face {
  std::vector<int> vertices;  // dim vertex ids (segment in 2D, triangle in 3D)
  Vec normal = Vec::Zero();   // unit, outward from elem_plus
  double measure = 0.0;
  int elem_plus = -1;
  int elem_minus = -1;        // -1 on boundary faces
  FaceKind disp_kind = FaceKind::Interior;
  std::vector<FaceKind> pressure_kind; // one entry per network, set by classify()

  bool interior() const { return elem_minus >= 0; }
};

class PolyMesh {
public:
  int dim = 0;
  std::vector<Vec> vertices;
  std::vector<Element> elements;
  std::vector<Face> faces;

  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }

  double max_h() const;
  double total_measure() const;
  double domain_measure_from_simplices() const;

  /// Max over interior faces of h_{K+}/h_{K-} (local bounded variation proxy).
  double max_neighbor_h_ratio() const;

  /// Tag every boundary face Dirichlet for displacement and all n_networks
  /// pressure fields.
  void classify_all_dirichlet(int n_networks);

  /// Checks measures, face neighbor counts, sub-simplex partition and normal
  /// closure; throws std::runtime_error on violation.
  void validate() const;
};

double simplex_measure(const PolyMesh& mesh, const std::vector<int>& simplex, int dim);

/// Structured simplicial mesh of an axis-aligned box. 2D cells split into two
/// triangles, 3D cells into six tetrahedra (Kuhn subdivision, conforming).
PolyMesh build_structured_mesh(const Vec& box_min, const Vec& box_max,
                               const std::array<int, 3>& divisions, int dim);

/// Convenience: unit square / unit cube with equal divisions per axis.
PolyMesh build_unit_mesh(int divisions, int dim);

/// Greedy BFS agglomeration of a simplicial mesh into n_parts face-connected
/// polytopic elements. The input simplices become the sub-simplex tessellation.
PolyMesh agglomerate_mesh(const PolyMesh& mesh, int n_parts, unsigned seed);

/// Recomputes element metadata (h, bbox, measure) and the face list from
/// vertices and per-element sub-simplices; used after reading a mesh file.
void finalize_mesh(PolyMesh& mesh);

/// Harmonic average of the neighboring element diameters; element diameter on
/// boundary faces.
double face_harmonic_h(const Face& face, const PolyMesh& mesh);

} // namespace mpetdg

#endif
