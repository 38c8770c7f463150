#include "mpetdg/dg_space.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace mpetdg {

int DgSpace::local_dimension(int degree, int dim) {
  // C(degree + dim, dim)
  long num = 1, den = 1;
  for (int k = 1; k <= dim; ++k) {
    num *= degree + k;
    den *= k;
  }
  return static_cast<int>(num / den);
}

DgSpace::DgSpace(const PolyMesh& mesh, int degree, int n_components)
    : mesh_(&mesh), degree_(degree), n_components_(n_components) {
  if (degree < 1) throw std::invalid_argument("dg_space: degree must be >= 1");
  if (degree > kMaxDegree) throw std::invalid_argument("dg_space: degree above supported maximum");
  if (n_components != 1 && n_components != mesh.dim)
    throw std::invalid_argument("dg_space: n_components must be 1 or dim");

  const int d = mesh.dim;
  for (int total = 0; total <= degree; ++total) {
    if (d == 2) {
      for (int i = total; i >= 0; --i) exponents_.push_back({i, total - i, 0});
    } else {
      for (int i = total; i >= 0; --i)
        for (int j = total - i; j >= 0; --j) exponents_.push_back({i, j, total - i - j});
    }
  }
  local_dim_ = local_dimension(degree, d);
  if (static_cast<int>(exponents_.size()) != local_dim_)
    throw std::logic_error("dg_space: exponent enumeration mismatch");
  n_dofs_ = mesh.n_elements() * local_dim_ * n_components_;

  // Orthonormalize per element: Gram matrix Cholesky of scaled monomials.
  ortho_.resize(mesh.n_elements());
  const int qorder = 2 * degree + 2;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    QuadRule rule = element_quadrature(mesh, e, qorder);
    ortho_[e] = Eigen::MatrixXd::Identity(local_dim_, local_dim_); // monomial pass
    Eigen::MatrixXd m;
    monomials(e, rule.points, m, nullptr);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(local_dim_, local_dim_);
    for (size_t q = 0; q < rule.points.size(); ++q)
      gram += rule.weights[q] * m.col(q) * m.col(q).transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("dg_space: Gram matrix not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    ortho_[e] = L.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(local_dim_, local_dim_));
    // second pass: the start-basis Gram can be ill-conditioned on awkward
    // agglomerated elements and one Cholesky sweep leaves O(1e-9) residuals.
    // Re-measure the Gram of the computed basis the same way assembly sees it
    // (values first, then accumulation) and correct once more; this lands the
    // local mass matrix on the identity at round-off level.
    Eigen::MatrixXd phi = ortho_[e] * m;
    Eigen::MatrixXd g2 = Eigen::MatrixXd::Zero(local_dim_, local_dim_);
    for (size_t q = 0; q < rule.points.size(); ++q)
      g2 += rule.weights[q] * phi.col(q) * phi.col(q).transpose();
    Eigen::LLT<Eigen::MatrixXd> llt2(g2);
    if (llt2.info() == Eigen::Success) {
      Eigen::MatrixXd L2 = llt2.matrixL();
      ortho_[e] = L2.triangularView<Eigen::Lower>().solve(ortho_[e]).eval();
    }
  }
}

void DgSpace::monomials(int element, const std::vector<Vec>& points, Eigen::MatrixXd& vals,
                        std::vector<Eigen::MatrixXd>* grads) const {
  const int d = mesh_->dim;
  const auto& el = mesh_->elements[element];
  Vec center = 0.5 * (el.bbox_min + el.bbox_max);
  Vec half = 0.5 * (el.bbox_max - el.bbox_min);
  for (int a = 0; a < d; ++a)
    if (half[a] <= 0) throw std::runtime_error("dg_space: degenerate bounding box");
  const int npts = static_cast<int>(points.size());
  vals.resize(local_dim_, npts);
  if (grads) {
    grads->assign(d, Eigen::MatrixXd::Zero(local_dim_, npts));
  }
  // tensor Legendre polynomials in bounding-box coordinates; much better
  // conditioned than raw monomials on awkward agglomerated elements, and the
  // Cholesky sweep yields the same orthonormal basis either way
  for (int q = 0; q < npts; ++q) {
    double P[3][kMaxDegree + 1];
    double dP[3][kMaxDegree + 1];
    for (int a = 0; a < d; ++a) {
      double xi = (points[q][a] - center[a]) / half[a];
      P[a][0] = 1.0;
      dP[a][0] = 0.0;
      if (degree_ >= 1) {
        P[a][1] = xi;
        dP[a][1] = 1.0;
      }
      for (int n = 1; n < degree_; ++n) {
        P[a][n + 1] = ((2 * n + 1) * xi * P[a][n] - n * P[a][n - 1]) / (n + 1);
        dP[a][n + 1] = dP[a][n - 1] + (2 * n + 1) * P[a][n];
      }
    }
    for (int i = 0; i < local_dim_; ++i) {
      const auto& ex = exponents_[i];
      double v = 1.0;
      for (int a = 0; a < d; ++a) v *= P[a][ex[a]];
      vals(i, q) = v;
      if (grads) {
        for (int a = 0; a < d; ++a) {
          if (ex[a] == 0) continue;
          double g = dP[a][ex[a]] / half[a];
          for (int b = 0; b < d; ++b)
            if (b != a) g *= P[b][ex[b]];
          (*grads)[a](i, q) = g;
        }
      }
    }
  }
}

Eigen::MatrixXd DgSpace::values(int element, const std::vector<Vec>& points) const {
  Eigen::MatrixXd m;
  monomials(element, points, m, nullptr);
  return ortho_[element] * m;
}

std::vector<Eigen::MatrixXd> DgSpace::gradients(int element, const std::vector<Vec>& points) const {
  Eigen::MatrixXd m;
  std::vector<Eigen::MatrixXd> g;
  monomials(element, points, m, &g);
  for (auto& ga : g) ga = (ortho_[element] * ga).eval();
  return g;
}

double DgSpace::eval_scalar(int element, const Eigen::VectorXd& coeffs, const Vec& p) const {
  Eigen::MatrixXd v = values(element, {p});
  double out = 0.0;
  const int off = offset(element);
  for (int i = 0; i < local_dim_; ++i) out += coeffs[off + i] * v(i, 0);
  return out;
}

void DgSpace::eval_vector(int element, const Eigen::VectorXd& coeffs, const Vec& p,
                          Eigen::VectorXd& value, Eigen::MatrixXd& grad) const {
  const int d = mesh_->dim;
  Eigen::MatrixXd m;
  std::vector<Eigen::MatrixXd> g;
  monomials(element, {p}, m, &g);
  Eigen::VectorXd phi = ortho_[element] * m.col(0);
  value = Eigen::VectorXd::Zero(n_components_);
  grad = Eigen::MatrixXd::Zero(n_components_, d);
  const int off = offset(element);
  for (int c = 0; c < n_components_; ++c)
    for (int i = 0; i < local_dim_; ++i) {
      double coef = coeffs[off + c * local_dim_ + i];
      value[c] += coef * phi[i];
      for (int a = 0; a < d; ++a) grad(c, a) += coef * (ortho_[element].row(i) * g[a].col(0))(0);
    }
}

Eigen::VectorXd DgSpace::project(const std::function<Eigen::VectorXd(const Vec&)>& field) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_dofs_);
  const int qorder = 2 * degree_ + 4;
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    QuadRule rule = element_quadrature(*mesh_, e, qorder);
    Eigen::MatrixXd phi = values(e, rule.points);
    const int off = offset(e);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Eigen::VectorXd f = field(rule.points[q]);
      for (int c = 0; c < n_components_; ++c)
        for (int i = 0; i < local_dim_; ++i)
          out[off + c * local_dim_ + i] += rule.weights[q] * f[c] * phi(i, q);
    }
  }
  return out;
}

} // namespace mpetdg
