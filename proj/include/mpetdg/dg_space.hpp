#ifndef MPETDG_DG_SPACE_HPP
#define MPETDG_DG_SPACE_HPP

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mpetdg/mesh.hpp"
#include "mpetdg/quadrature.hpp"

namespace mpetdg {

constexpr int kMaxDegree = 6;

/// Element-wise modal basis: bounding-box scaled monomials orthonormalized
/// against the element volume quadrature. Scalar bases are shared across the
/// components of a vector space.
///
/// Global dof layout: element-major, component-major within the element:
///   global = offset(e) + comp * local_dim + mode.
class DgSpace {
public:
  DgSpace(const PolyMesh& mesh, int degree, int n_components);

  const PolyMesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int n_components() const { return n_components_; }
  int local_dim() const { return local_dim_; }
  int block_size() const { return local_dim_ * n_components_; }
  int n_dofs() const { return n_dofs_; }
  int offset(int element) const { return element * block_size(); }
  int dim() const { return mesh_->dim; }

  /// Values of all scalar modes at the given physical points: (local_dim x npts).
  Eigen::MatrixXd values(int element, const std::vector<Vec>& points) const;

  /// Gradients: grads[a] is (local_dim x npts) holding d(phi)/dx_a.
  std::vector<Eigen::MatrixXd> gradients(int element, const std::vector<Vec>& points) const;

  /// Evaluates a scalar coefficient field (n_components == 1) at a point
  /// inside `element`.
  double eval_scalar(int element, const Eigen::VectorXd& coeffs, const Vec& p) const;

  /// Evaluates a vector field and its gradient at a point inside `element`.
  void eval_vector(int element, const Eigen::VectorXd& coeffs, const Vec& p,
                   Eigen::VectorXd& value, Eigen::MatrixXd& grad) const;

  /// L2 projection of a callable field onto the space; exact on polynomials of
  /// degree <= space degree.
  Eigen::VectorXd project(const std::function<Eigen::VectorXd(const Vec&)>& field) const;

  static int local_dimension(int degree, int dim);

private:
  const PolyMesh* mesh_;
  int degree_;
  int n_components_;
  int local_dim_;
  int n_dofs_;
  std::vector<std::array<int, 3>> exponents_;   // monomial multi-indices
  std::vector<Eigen::MatrixXd> ortho_;          // per-element C: phi = C * m(x)

  void monomials(int element, const std::vector<Vec>& points, Eigen::MatrixXd& vals,
                 std::vector<Eigen::MatrixXd>* grads) const;
};

} // namespace mpetdg

#endif
