#ifndef MPETDG_QUADRATURE_HPP
#define MPETDG_QUADRATURE_HPP

#include <vector>

#include "mpetdg/mesh.hpp"

namespace mpetdg {

/// Quadrature points in physical coordinates with positive weights summing to
/// the measure of the integration domain.
struct QuadRule {
  std::vector<Vec> points;
  std::vector<double> weights;

  double sum_weights() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

constexpr int kMaxQuadOrder = 40;

/// Gauss-Legendre nodes/weights on [0,1], exact for degree 2n-1.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

/// Rule over the sub-simplex tessellation of an element, exact for polynomials
/// of total degree <= order. Built by collapsed (Duffy) tensor Gauss rules.
QuadRule element_quadrature(const PolyMesh& mesh, int element, int order);

/// Rule on a face (segment in 2D, triangle in 3D), exact for degree <= order.
QuadRule face_quadrature(const PolyMesh& mesh, const Face& face, int order);

/// Rule on an arbitrary simplex given by vertex coordinates (d+1 vertices for
/// a volume simplex of dimension d).
QuadRule simplex_quadrature(const std::vector<Vec>& verts, int dim, int order);

} // namespace mpetdg

#endif
