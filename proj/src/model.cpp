#include "mpetdg/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mpetdg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double MpetParameters::permeability_bound(int j) const {
  Eigen::MatrixXd K = networks[j].permeability.topLeftCorner(dim, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  return es.eigenvalues().maxCoeff();
}

bool MpetParameters::permeability_isotropic(int j, double* k) const {
  const Eigen::Matrix3d& K = networks[j].permeability;
  double d0 = K(0, 0);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      double expect = (a == b) ? d0 : 0.0;
      if (std::abs(K(a, b) - expect) > 1e-14 * std::max(1.0, std::abs(d0))) return false;
    }
  if (k) *k = d0;
  return true;
}

void validate_parameters(const MpetParameters& params) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("parameters: " + what); };
  if (params.dim != 2 && params.dim != 3) fail("dim must be 2 or 3");
  if (!(params.rho > 0.0)) fail("rho must be > 0");
  if (!(params.mu > 0.0)) fail("mu must be > 0");
  if (params.lambda < 0.0) fail("lambda must be >= 0");
  const int J = params.n_networks();
  if (J < 1) fail("at least one network required");
  for (int j = 0; j < J; ++j) {
    const auto& n = params.networks[j];
    std::string tag = "network " + std::to_string(j + 1) + ": ";
    if (!(n.storage > 0.0)) fail(tag + "storage coefficient c_j must be > 0");
    if (!(n.viscosity > 0.0)) fail(tag + "viscosity mu_j must be > 0");
    if (n.beta_external < 0.0) fail(tag + "beta_e_j must be >= 0");
    Eigen::MatrixXd K = n.permeability.topLeftCorner(params.dim, params.dim);
    if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, K.cwiseAbs().maxCoeff()))
      fail(tag + "permeability must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    if (!(es.eigenvalues().minCoeff() > 0.0)) fail(tag + "permeability must be positive definite");
  }
  if (params.beta.rows() != J || params.beta.cols() != J) fail("beta matrix must be |J| x |J|");
  for (int j = 0; j < J; ++j) {
    if (params.beta(j, j) != 0.0) fail("beta matrix diagonal must be zero");
    for (int k = 0; k < J; ++k) {
      if (params.beta(j, k) < 0.0) fail("beta matrix entries must be >= 0");
      if (std::abs(params.beta(j, k) - params.beta(k, j)) > 0.0)
        fail("beta matrix must be symmetric");
    }
  }
}

MpetParameters tc1_parameters() {
  MpetParameters p;
  p.dim = 3;
  p.rho = 1.0;
  p.lambda = 1.0;
  p.mu = 1.0;
  p.networks.resize(4);
  for (auto& n : p.networks) {
    n.alpha = 0.25;
    n.storage = 0.1;
    n.permeability = Eigen::Matrix3d::Identity();
    n.viscosity = 1.0;
    n.beta_external = 0.0;
  }
  p.beta = Eigen::MatrixXd::Zero(4, 4);
  p.beta(0, 1) = p.beta(1, 0) = 1.0;
  p.beta(2, 3) = p.beta(3, 2) = 1.0;
  return p;
}

MpetParameters tc2_parameters() {
  MpetParameters p;
  p.dim = 2;
  p.rho = 1000.0;
  p.lambda = 505.0;
  p.mu = 216.0;
  p.networks.resize(2);
  p.networks[0].alpha = 0.49;
  p.networks[1].alpha = 0.51;
  for (auto& n : p.networks) {
    n.storage = 1e-6;
    n.permeability = 3.5e-11 * Eigen::Matrix3d::Identity();
    n.viscosity = 3.5e-3;
    n.beta_external = 0.0;
  }
  p.beta = Eigen::MatrixXd::Zero(2, 2);
  p.beta(0, 1) = p.beta(1, 0) = 1e-7;
  return p;
}

Eigen::VectorXd ManufacturedCase::forcing_f(const Vec& x, double t) const {
  const double mu = params.mu, lam = params.lambda;
  Eigen::VectorXd f = params.rho * u_tt(x, t) - mu * laplacian_u(x, t) -
                      (mu + lam) * grad_div_u(x, t);
  for (int k = 0; k < params.n_networks(); ++k)
    f += params.networks[k].alpha * grad_p(x, t, k);
  return f;
}

double ManufacturedCase::forcing_g(int j, const Vec& x, double t) const {
  const auto& n = params.networks[j];
  Eigen::MatrixXd gu = grad_u_t(x, t);
  double div_ut = gu.trace();
  Eigen::MatrixXd H = hess_p(x, t, j);
  Eigen::MatrixXd K = n.permeability.topLeftCorner(dim, dim);
  double diff = (K.cwiseProduct(H)).sum() / n.viscosity; // div(K/mu grad p)
  double g = n.storage * p_t(j, x, t) + n.alpha * div_ut - diff;
  for (int k = 0; k < params.n_networks(); ++k)
    g += params.beta(j, k) * (p(j, x, t) - p(k, x, t));
  g += n.beta_external * p(j, x, t);
  return g;
}

namespace {

// Shared in-plane displacement profile of both test cases:
//   u_xy = sin(pi t) (-cos(pi x) cos(pi y), sin(pi x) sin(pi y)).
ManufacturedCase build_trig_case(const MpetParameters& params, int dim, double pressure_scale,
                                 bool pressure_z_factor) {
  ManufacturedCase mc;
  mc.params = params;
  mc.dim = dim;
  const int J = params.n_networks();
  const double C = pressure_scale;

  auto uvec = [dim](const Vec& x, double timef) {
    Eigen::VectorXd v(dim);
    v[0] = -std::cos(kPi * x.x()) * std::cos(kPi * x.y());
    v[1] = std::sin(kPi * x.x()) * std::sin(kPi * x.y());
    if (dim == 3) v[2] = x.z();
    return (timef * v).eval();
  };
  mc.u = [uvec](const Vec& x, double t) { return uvec(x, std::sin(kPi * t)); };
  mc.u_t = [uvec](const Vec& x, double t) { return uvec(x, kPi * std::cos(kPi * t)); };
  mc.u_tt = [uvec](const Vec& x, double t) { return uvec(x, -kPi * kPi * std::sin(kPi * t)); };

  auto gradmat = [dim](const Vec& x, double timef) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    double cx = std::cos(kPi * x.x()), sx = std::sin(kPi * x.x());
    double cy = std::cos(kPi * x.y()), sy = std::sin(kPi * x.y());
    g(0, 0) = kPi * sx * cy;
    g(0, 1) = kPi * cx * sy;
    g(1, 0) = kPi * cx * sy;
    g(1, 1) = kPi * sx * cy;
    if (dim == 3) g(2, 2) = 1.0;
    return (timef * g).eval();
  };
  mc.grad_u = [gradmat](const Vec& x, double t) { return gradmat(x, std::sin(kPi * t)); };
  mc.grad_u_t = [gradmat](const Vec& x, double t) { return gradmat(x, kPi * std::cos(kPi * t)); };

  mc.laplacian_u = [dim](const Vec& x, double t) {
    double s = std::sin(kPi * t);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[0] = 2.0 * kPi * kPi * std::cos(kPi * x.x()) * std::cos(kPi * x.y());
    v[1] = -2.0 * kPi * kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y());
    return (s * v).eval();
  };
  mc.grad_div_u = [dim](const Vec& x, double t) {
    double s = std::sin(kPi * t);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[0] = 2.0 * kPi * kPi * std::cos(kPi * x.x()) * std::cos(kPi * x.y());
    v[1] = -2.0 * kPi * kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y());
    return (s * v).eval();
  };

  // Pressures: even networks carry sin(pi(x+y)), odd ones sin(pi(x-y)); the
  // 3D case multiplies by z and a factor pi.
  auto sign_of = [](int j) { return (j % 2 == 0) ? 1.0 : -1.0; };
  auto zfac = [pressure_z_factor](const Vec& x) { return pressure_z_factor ? x.z() : 1.0; };
  mc.p = [C, sign_of, zfac](int j, const Vec& x, double t) {
    double arg = kPi * (x.x() + sign_of(j) * x.y());
    return C * std::sin(kPi * t) * std::sin(arg) * zfac(x);
  };
  mc.p_t = [C, sign_of, zfac](int j, const Vec& x, double t) {
    double arg = kPi * (x.x() + sign_of(j) * x.y());
    return C * kPi * std::cos(kPi * t) * std::sin(arg) * zfac(x);
  };
  mc.grad_p = [C, dim, sign_of, zfac, pressure_z_factor](const Vec& x, double t, int j) {
    double sgn = sign_of(j);
    double arg = kPi * (x.x() + sgn * x.y());
    double s = C * std::sin(kPi * t);
    Eigen::VectorXd g(dim);
    g[0] = s * kPi * std::cos(arg) * zfac(x);
    g[1] = s * kPi * sgn * std::cos(arg) * zfac(x);
    if (dim == 3) g[2] = pressure_z_factor ? s * std::sin(arg) : 0.0;
    return g;
  };
  mc.hess_p = [C, dim, sign_of, zfac, pressure_z_factor](const Vec& x, double t, int j) {
    double sgn = sign_of(j);
    double arg = kPi * (x.x() + sgn * x.y());
    double s = C * std::sin(kPi * t);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    double dxx = -s * kPi * kPi * std::sin(arg) * zfac(x);
    h(0, 0) = dxx;
    h(1, 1) = dxx; // sgn^2 = 1
    h(0, 1) = h(1, 0) = sgn * dxx;
    if (dim == 3 && pressure_z_factor) {
      h(0, 2) = h(2, 0) = s * kPi * std::cos(arg);
      h(1, 2) = h(2, 1) = s * kPi * sgn * std::cos(arg);
    }
    return h;
  };
  (void)J;
  return mc;
}

} // namespace

ManufacturedCase manufactured_case(CaseId which, const MpetParameters& params) {
  validate_parameters(params);
  if (which == CaseId::TC1_3D) {
    if (params.dim != 3 || params.n_networks() != 4)
      throw std::invalid_argument("manufactured_case: TC1 requires dim=3 and 4 networks");
    return build_trig_case(params, 3, kPi, /*pressure_z_factor=*/true);
  }
  if (params.dim != 2 || params.n_networks() != 2)
    throw std::invalid_argument("manufactured_case: TC2 requires dim=2 and 2 networks");
  return build_trig_case(params, 2, 1e4 * kPi, /*pressure_z_factor=*/false);
}

BoundaryData boundary_data_from_exact(const ManufacturedCase& mcase) {
  BoundaryData bd;
  bd.u_dirichlet = mcase.u;
  bd.u_dirichlet_t = mcase.u_t;
  bd.p_dirichlet = mcase.p;
  const int dim = mcase.dim;
  bd.traction = [dim](const Vec&, double) { return Eigen::VectorXd::Zero(dim); };
  bd.flux = [](int, const Vec&, double) { return 0.0; };
  return bd;
}

BoundaryData homogeneous_boundary_data(int dim) {
  BoundaryData bd;
  bd.u_dirichlet = [dim](const Vec&, double) { return Eigen::VectorXd::Zero(dim); };
  bd.u_dirichlet_t = [dim](const Vec&, double) { return Eigen::VectorXd::Zero(dim); };
  bd.p_dirichlet = [](int, const Vec&, double) { return 0.0; };
  bd.traction = [dim](const Vec&, double) { return Eigen::VectorXd::Zero(dim); };
  bd.flux = [](int, const Vec&, double) { return 0.0; };
  return bd;
}

} // namespace mpetdg
