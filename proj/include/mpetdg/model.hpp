#ifndef MPETDG_MODEL_HPP
#define MPETDG_MODEL_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mpetdg/mesh.hpp"

namespace mpetdg {

/// Per-network fluid coefficients.
struct NetworkParameters {
  double alpha = 0.0;   // Biot-Willis [-]
  double storage = 0.0; // c_j [m^2/N]
  Eigen::Matrix3d permeability = Eigen::Matrix3d::Identity(); // K_j [m^2]
  double viscosity = 0.0; // mu_j [Pa s]
  double beta_external = 0.0; // beta_j^e [m^2/(N s)]
};

struct MpetParameters {
  int dim = 3;
  double rho = 0.0;    // [kg/m^3]
  double lambda = 0.0; // [Pa]
  double mu = 0.0;     // [Pa]
  std::vector<NetworkParameters> networks;
  Eigen::MatrixXd beta; // |J| x |J| transfer matrix, zero diagonal

  int n_networks() const { return static_cast<int>(networks.size()); }

  /// Largest eigenvalue of the isotropic stiffness tensor: max(2 mu, d lambda + 2 mu).
  double elastic_tensor_bound() const { return std::max(2.0 * mu, dim * lambda + 2.0 * mu); }

  /// Largest eigenvalue of K_j (top-left dim x dim block).
  double permeability_bound(int j) const;

  bool permeability_isotropic(int j, double* k = nullptr) const;
};

/// Checks all parameter invariants; throws std::invalid_argument naming the
/// violated bound.
void validate_parameters(const MpetParameters& params);

/// Coefficients of the 3D four-network convergence case.
MpetParameters tc1_parameters();
/// Physiological-scale coefficients of the 2D two-network polygonal case.
MpetParameters tc2_parameters();

enum class CaseId { TC1_3D, TC2_2D };

/// Closed-form exact solution with analytically derived forcing terms.
/// All callables take physical point and time.
struct ManufacturedCase {
  MpetParameters params;
  int dim = 0;

  std::function<Eigen::VectorXd(const Vec&, double)> u;       // displacement
  std::function<Eigen::VectorXd(const Vec&, double)> u_t;     // velocity
  std::function<Eigen::VectorXd(const Vec&, double)> u_tt;    // acceleration
  std::function<Eigen::MatrixXd(const Vec&, double)> grad_u;  // (d x d), [i][a] = d u_i / d x_a
  std::function<Eigen::MatrixXd(const Vec&, double)> grad_u_t;
  std::function<Eigen::VectorXd(const Vec&, double)> laplacian_u;
  std::function<Eigen::VectorXd(const Vec&, double)> grad_div_u;

  std::function<double(int, const Vec&, double)> p;       // network pressure
  std::function<double(int, const Vec&, double)> p_t;
  std::function<Eigen::VectorXd(const Vec&, double, int)> grad_p;
  std::function<Eigen::MatrixXd(const Vec&, double, int)> hess_p;

  /// Momentum forcing f = rho u_tt - div sigma_E(u) + sum_k alpha_k grad p_k.
  Eigen::VectorXd forcing_f(const Vec& x, double t) const;
  /// Continuity forcing g_j per the strong form.
  double forcing_g(int j, const Vec& x, double t) const;
};

ManufacturedCase manufactured_case(CaseId which, const MpetParameters& params);

/// Boundary data sampled from an exact solution (full Dirichlet everywhere).
struct BoundaryData {
  std::function<Eigen::VectorXd(const Vec&, double)> u_dirichlet;
  std::function<Eigen::VectorXd(const Vec&, double)> u_dirichlet_t; // time derivative
  std::function<double(int, const Vec&, double)> p_dirichlet;
  std::function<Eigen::VectorXd(const Vec&, double)> traction;      // h_u on Neumann faces
  std::function<double(int, const Vec&, double)> flux;              // h_j on Neumann faces
};

BoundaryData boundary_data_from_exact(const ManufacturedCase& mcase);
BoundaryData homogeneous_boundary_data(int dim);

} // namespace mpetdg

#endif
