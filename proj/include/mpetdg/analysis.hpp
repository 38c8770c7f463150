#ifndef MPETDG_ANALYSIS_HPP
#define MPETDG_ANALYSIS_HPP

#include <string>
#include <vector>

#include "mpetdg/assembly.hpp"
#include "mpetdg/timestepper.hpp"

namespace mpetdg {

/// Broken energy norm: ||sqrt(C_E) eps_h(v)||_L2 + ||sqrt(eta) [[[v]]]||_F,
/// the two contributions added (not combined in quadrature).
double dg_norm_elastic(const DgSpace& space_u, const Eigen::VectorXd& coeffs,
                       const MpetParameters& params, const PenaltyConfig& pc);

/// ||sqrt(K_j/mu_j) grad_h p||_L2 + ||sqrt(zeta_j) [[p]]||_F for one network.
double dg_norm_pressure(const DgSpace& space_q, const Eigen::VectorXd& coeffs, int network,
                        const MpetParameters& params, const PenaltyConfig& pc);

struct ErrorReport {
  double t_eval = 0.0;
  double err_u_dg = 0.0;
  double err_u_l2 = 0.0;
  double err_p_dg = 0.0; // sum of the per-network DG norms
  double err_p_l2 = 0.0; // sum_k || sqrt(c_k) e_{p_k} ||_L2
  std::vector<double> err_p_dg_net;
};

/// Errors of the numerical state against the exact solution at state.t.
/// Interior jumps of the exact fields vanish; boundary jumps use the trace.
ErrorReport compute_errors(const DgSpace& space_u, const DgSpace& space_q,
                           const TransientState& state, const ManufacturedCase& mcase,
                           const PenaltyConfig& pc);

/// roc_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i); h must be strictly decreasing.
/// The first entry is NaN.
std::vector<double> convergence_rates(const std::vector<double>& h,
                                      const std::vector<double>& err);

struct ConvergenceRow {
  double h = 0.0;
  double err_u_dg = 0.0;
  double roc_u = 0.0;
  double err_p_l2 = 0.0;
  double roc_p = 0.0;
};

/// CSV with header h,err_u_dg,roc_u,err_p_l2,roc_p.
void write_rate_table(const std::string& path, const std::vector<ConvergenceRow>& rows);
std::string format_rate_table(const std::vector<ConvergenceRow>& rows);

/// Discrete energy Z'M_u Z + U'K_u U + P'M_p P together with the accumulated
/// trapezoidal dissipation integral of 2 P'K_p P; with homogeneous data the
/// sum energy + dissipated is non-increasing.
class EnergyTracker {
public:
  explicit EnergyTracker(const BlockSystem& sys);

  void record(const TransientState& state);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& energy() const { return energy_; }
  const std::vector<double>& dissipated() const { return dissipated_; }

private:
  const BlockSystem* sys_;
  std::vector<double> times_, energy_, dissipated_;
  double last_rate_ = 0.0;
};

} // namespace mpetdg

#endif
