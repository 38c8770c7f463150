#ifndef MPETDG_ASSEMBLY_HPP
#define MPETDG_ASSEMBLY_HPP

#include <vector>

#include <Eigen/Sparse>

#include "mpetdg/dg_space.hpp"
#include "mpetdg/model.hpp"

namespace mpetdg {

using SpMat = Eigen::SparseMatrix<double>;

/// Interior-penalty scales eta0 (displacement) and z_j (pressures).
struct PenaltyConfig {
  double eta0 = 10.0;
  std::vector<double> z; // one per network; resized on demand

  double z_for(int j) const { return j < static_cast<int>(z.size()) ? z[j] : 10.0; }

  /// z_j floored at 10/sqrt(mu_j) so that zeta_j >= 10 q^2 (k_j/mu_j)/{h}_H
  /// even for tiny permeabilities.
  double effective_z(int j, const MpetParameters& params) const;
};

/// eta = eta0 * Ctilde_E * p^2 / {h}_H (interior) or p^2 / h (Dirichlet
/// boundary). With per-element coefficients the two sides combine by the
/// harmonic mean.
double penalty_eta(const Face& face, const PolyMesh& mesh, const MpetParameters& params,
                   const PenaltyConfig& pc, int degree_p);

/// zeta_j = z_j * (k_j / sqrt(mu_j)) * q^2 / {h}_H (interior) or q^2 / h.
double penalty_zeta(const Face& face, const PolyMesh& mesh, int network,
                    const MpetParameters& params, const PenaltyConfig& pc, int degree_q);

/// Block-diagonal weighted mass matrix (rho phi_j, phi_i) or (c psi_j, psi_i).
SpMat assemble_mass(const DgSpace& space, double weight);

/// SIPG elasticity stiffness (volume strain term + symmetric face terms).
SpMat assemble_elastic_stiffness(const DgSpace& space_u, const MpetParameters& params,
                                 const PenaltyConfig& pc);

/// SIPG diffusion for network j with tensor K_j/mu_j and zeta_j penalty.
SpMat assemble_pressure_stiffness(const DgSpace& space_q, int network,
                                  const MpetParameters& params, const PenaltyConfig& pc);

/// Pressure-displacement coupling, |Q_h| x |V_h|: B[r,c] = Bform_j(psi_r, phi_c).
SpMat assemble_coupling_B(const DgSpace& space_q, const DgSpace& space_u, int network,
                          const MpetParameters& params);

/// Network transfer + external coupling contribution to K_p, over the stacked
/// pressure vector (|J| |Q_h| square, PSD).
SpMat assemble_transfer_coupling(const DgSpace& space_q, const MpetParameters& params);

/// All assembled matrices of the semi-discrete system.
struct BlockSystem {
  SpMat M_u; // rho-weighted displacement mass
  SpMat K_u; // elasticity SIPG stiffness
  SpMat B;   // stacked coupling blocks, |J||Q| x |V|
  SpMat M_p; // block-diagonal c_j-weighted pressure mass
  SpMat K_p; // pressure stiffness + transfer coupling
  std::vector<SpMat> A_P; // per-network SIPG diffusion blocks
  int n_u = 0;
  int n_p = 0; // per network
  int n_networks = 0;
};

BlockSystem assemble_system(const DgSpace& space_u, const DgSpace& space_q,
                            const MpetParameters& params, const PenaltyConfig& pc);

/// Time-dependent right-hand sides including volume loads, Neumann terms and
/// Dirichlet lifts.
class RhsAssembler {
public:
  RhsAssembler(const DgSpace& space_u, const DgSpace& space_q, const MpetParameters& params,
               const PenaltyConfig& pc,
               std::function<Eigen::VectorXd(const Vec&, double)> volume_f,
               std::function<double(int, const Vec&, double)> volume_g, BoundaryData boundary);

  void assemble(double t, Eigen::VectorXd& F, Eigen::VectorXd& G) const;

private:
  const DgSpace* space_u_;
  const DgSpace* space_q_;
  MpetParameters params_;
  PenaltyConfig pc_;
  std::function<Eigen::VectorXd(const Vec&, double)> volume_f_;
  std::function<double(int, const Vec&, double)> volume_g_;
  BoundaryData boundary_;
};

/// Writes a sparse matrix as "row col value" lines (debug dump).
void dump_matrix(const SpMat& m, const std::string& path);

} // namespace mpetdg

#endif
