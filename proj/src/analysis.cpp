#include "mpetdg/analysis.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mpetdg {

namespace {

// |sym(a (x) n)|_F^2 for a unit normal n
double jump_tensor_sq(const Eigen::VectorXd& a, const Vec& n, int d) {
  double a2 = 0.0, an = 0.0;
  for (int i = 0; i < d; ++i) {
    a2 += a[i] * a[i];
    an += a[i] * n[i];
  }
  return 0.5 * (a2 + an * an);
}

} // namespace

double dg_norm_elastic(const DgSpace& space_u, const Eigen::VectorXd& coeffs,
                       const MpetParameters& params, const PenaltyConfig& pc) {
  const auto& mesh = space_u.mesh();
  const int d = mesh.dim;
  const int ldim = space_u.local_dim();
  const int order = 2 * space_u.degree() + 2;
  double vol = 0.0, fac = 0.0;

  for (int e = 0; e < mesh.n_elements(); ++e) {
    QuadRule rule = element_quadrature(mesh, e, order);
    auto grads = space_u.gradients(e, rule.points);
    const int off = space_u.offset(e);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d); // g(i,a) = d u_i / d x_a
      for (int c = 0; c < d; ++c)
        for (int a = 0; a < d; ++a)
          for (int i = 0; i < ldim; ++i)
            g(c, a) += coeffs[off + c * ldim + i] * grads[a](i, q);
      Eigen::MatrixXd eps = 0.5 * (g + g.transpose());
      double div = g.trace();
      vol += rule.weights[q] * (2.0 * params.mu * eps.squaredNorm() +
                                params.lambda * div * div);
    }
  }

  for (const auto& face : mesh.faces) {
    if (!face.interior() && face.disp_kind != FaceKind::Dirichlet) continue;
    const double eta = penalty_eta(face, mesh, params, pc, space_u.degree());
    QuadRule rule = face_quadrature(mesh, face, order);
    Eigen::MatrixXd vp = space_u.values(face.elem_plus, rule.points);
    Eigen::MatrixXd vm;
    if (face.interior()) vm = space_u.values(face.elem_minus, rule.points);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Eigen::VectorXd jump = Eigen::VectorXd::Zero(d);
      for (int c = 0; c < d; ++c) {
        for (int i = 0; i < ldim; ++i) {
          jump[c] += coeffs[space_u.offset(face.elem_plus) + c * ldim + i] * vp(i, q);
          if (face.interior())
            jump[c] -= coeffs[space_u.offset(face.elem_minus) + c * ldim + i] * vm(i, q);
        }
      }
      fac += rule.weights[q] * eta * jump_tensor_sq(jump, face.normal, d);
    }
  }
  return std::sqrt(vol) + std::sqrt(fac);
}

double dg_norm_pressure(const DgSpace& space_q, const Eigen::VectorXd& coeffs, int network,
                        const MpetParameters& params, const PenaltyConfig& pc) {
  const auto& mesh = space_q.mesh();
  const int d = mesh.dim;
  const int ldim = space_q.local_dim();
  const int order = 2 * space_q.degree() + 2;
  const auto& net = params.networks[network];
  const Eigen::MatrixXd K = net.permeability.topLeftCorner(d, d) / net.viscosity;
  double vol = 0.0, fac = 0.0;

  for (int e = 0; e < mesh.n_elements(); ++e) {
    QuadRule rule = element_quadrature(mesh, e, order);
    auto grads = space_q.gradients(e, rule.points);
    const int off = space_q.offset(e);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
      for (int a = 0; a < d; ++a)
        for (int i = 0; i < ldim; ++i) g[a] += coeffs[off + i] * grads[a](i, q);
      vol += rule.weights[q] * g.dot(K * g);
    }
  }

  for (const auto& face : mesh.faces) {
    bool dirichlet = !face.interior() && face.pressure_kind[network] == FaceKind::Dirichlet;
    if (!face.interior() && !dirichlet) continue;
    const double zeta = penalty_zeta(face, mesh, network, params, pc, space_q.degree());
    QuadRule rule = face_quadrature(mesh, face, order);
    Eigen::MatrixXd vp = space_q.values(face.elem_plus, rule.points);
    Eigen::MatrixXd vm;
    if (face.interior()) vm = space_q.values(face.elem_minus, rule.points);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double jump = 0.0;
      for (int i = 0; i < ldim; ++i) {
        jump += coeffs[space_q.offset(face.elem_plus) + i] * vp(i, q);
        if (face.interior()) jump -= coeffs[space_q.offset(face.elem_minus) + i] * vm(i, q);
      }
      fac += rule.weights[q] * zeta * jump * jump;
    }
  }
  return std::sqrt(vol) + std::sqrt(fac);
}

ErrorReport compute_errors(const DgSpace& space_u, const DgSpace& space_q,
                           const TransientState& state, const ManufacturedCase& mcase,
                           const PenaltyConfig& pc) {
  const auto& mesh = space_u.mesh();
  const auto& params = mcase.params;
  const int d = mesh.dim;
  const int J = params.n_networks();
  const int lu = space_u.local_dim();
  const int lq = space_q.local_dim();
  const int np = space_q.n_dofs();
  const double t = state.t;
  const int order = 2 * std::max(space_u.degree(), space_q.degree()) + 4;

  double vol_u_energy = 0.0, vol_u_l2 = 0.0, fac_u = 0.0;
  std::vector<double> vol_p_energy(J, 0.0), vol_p_l2(J, 0.0), fac_p(J, 0.0);

  for (int e = 0; e < mesh.n_elements(); ++e) {
    QuadRule rule = element_quadrature(mesh, e, order);
    Eigen::MatrixXd phi = space_u.values(e, rule.points);
    auto gphi = space_u.gradients(e, rule.points);
    Eigen::MatrixXd psi = space_q.values(e, rule.points);
    auto gpsi = space_q.gradients(e, rule.points);
    const int offu = space_u.offset(e);
    const int offq = space_q.offset(e);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Vec& x = rule.points[q];
      Eigen::VectorXd uh = Eigen::VectorXd::Zero(d);
      Eigen::MatrixXd gh = Eigen::MatrixXd::Zero(d, d);
      for (int c = 0; c < d; ++c)
        for (int i = 0; i < lu; ++i) {
          double co = state.U[offu + c * lu + i];
          uh[c] += co * phi(i, q);
          for (int a = 0; a < d; ++a) gh(c, a) += co * gphi[a](i, q);
        }
      Eigen::VectorXd eu = uh - mcase.u(x, t);
      Eigen::MatrixXd eg = gh - mcase.grad_u(x, t);
      Eigen::MatrixXd eps = 0.5 * (eg + eg.transpose());
      double div = eg.trace();
      vol_u_l2 += rule.weights[q] * eu.squaredNorm();
      vol_u_energy += rule.weights[q] * (2.0 * params.mu * eps.squaredNorm() +
                                         params.lambda * div * div);
      for (int j = 0; j < J; ++j) {
        double ph = 0.0;
        Eigen::VectorXd gp = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < lq; ++i) {
          double co = state.P[j * np + offq + i];
          ph += co * psi(i, q);
          for (int a = 0; a < d; ++a) gp[a] += co * gpsi[a](i, q);
        }
        double ep = ph - mcase.p(j, x, t);
        Eigen::VectorXd egp = gp - mcase.grad_p(x, t, j).head(d);
        const auto& net = params.networks[j];
        const Eigen::MatrixXd K = net.permeability.topLeftCorner(d, d) / net.viscosity;
        vol_p_l2[j] += rule.weights[q] * ep * ep;
        vol_p_energy[j] += rule.weights[q] * egp.dot(K * egp);
      }
    }
  }

  for (const auto& face : mesh.faces) {
    bool has_u = face.interior() || face.disp_kind == FaceKind::Dirichlet;
    QuadRule rule = face_quadrature(mesh, face, order);
    Eigen::MatrixXd phi_p = space_u.values(face.elem_plus, rule.points);
    Eigen::MatrixXd psi_p = space_q.values(face.elem_plus, rule.points);
    Eigen::MatrixXd phi_m, psi_m;
    if (face.interior()) {
      phi_m = space_u.values(face.elem_minus, rule.points);
      psi_m = space_q.values(face.elem_minus, rule.points);
    }
    const double eta = penalty_eta(face, mesh, params, pc, space_u.degree());
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Vec& x = rule.points[q];
      if (has_u) {
        Eigen::VectorXd jump = Eigen::VectorXd::Zero(d);
        for (int c = 0; c < d; ++c)
          for (int i = 0; i < lu; ++i) {
            jump[c] += state.U[space_u.offset(face.elem_plus) + c * lu + i] * phi_p(i, q);
            if (face.interior())
              jump[c] -= state.U[space_u.offset(face.elem_minus) + c * lu + i] * phi_m(i, q);
          }
        if (!face.interior()) jump -= mcase.u(x, t).head(d);
        fac_u += rule.weights[q] * eta * jump_tensor_sq(jump, face.normal, d);
      }
      for (int j = 0; j < J; ++j) {
        bool has_p = face.interior() || face.pressure_kind[j] == FaceKind::Dirichlet;
        if (!has_p) continue;
        const double zeta = penalty_zeta(face, mesh, j, params, pc, space_q.degree());
        double jump = 0.0;
        for (int i = 0; i < lq; ++i) {
          jump += state.P[j * np + space_q.offset(face.elem_plus) + i] * psi_p(i, q);
          if (face.interior())
            jump -= state.P[j * np + space_q.offset(face.elem_minus) + i] * psi_m(i, q);
        }
        if (!face.interior()) jump -= mcase.p(j, x, t);
        fac_p[j] += rule.weights[q] * zeta * jump * jump;
      }
    }
  }

  ErrorReport rep;
  rep.t_eval = t;
  rep.err_u_l2 = std::sqrt(vol_u_l2);
  rep.err_u_dg = std::sqrt(vol_u_energy) + std::sqrt(fac_u);
  rep.err_p_dg_net.resize(J);
  for (int j = 0; j < J; ++j) {
    // pressure L2 column as the sum of storage-weighted per-network norms
    rep.err_p_l2 += std::sqrt(params.networks[j].storage * vol_p_l2[j]);
    rep.err_p_dg_net[j] = std::sqrt(vol_p_energy[j]) + std::sqrt(fac_p[j]);
    rep.err_p_dg += rep.err_p_dg_net[j];
  }
  return rep;
}

std::vector<double> convergence_rates(const std::vector<double>& h,
                                      const std::vector<double>& err) {
  if (h.size() != err.size()) throw std::invalid_argument("rate input size mismatch");
  std::vector<double> roc(h.size(), std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 1; i < h.size(); ++i) {
    if (!(h[i] < h[i - 1]))
      throw std::invalid_argument("mesh sizes must be strictly decreasing");
    roc[i] = std::log(err[i - 1] / err[i]) / std::log(h[i - 1] / h[i]);
  }
  return roc;
}

std::string format_rate_table(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out.precision(6);
  out << std::scientific;
  out << "h,err_u_dg,roc_u,err_p_l2,roc_p\n";
  for (const auto& r : rows)
    out << r.h << "," << r.err_u_dg << "," << r.roc_u << "," << r.err_p_l2 << "," << r.roc_p
        << "\n";
  return out.str();
}

void write_rate_table(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << format_rate_table(rows);
}

EnergyTracker::EnergyTracker(const BlockSystem& sys) : sys_(&sys) {}

void EnergyTracker::record(const TransientState& state) {
  double e = state.Z.dot(sys_->M_u * state.Z) + state.U.dot(sys_->K_u * state.U) +
             state.P.dot(sys_->M_p * state.P);
  double rate = 2.0 * state.P.dot(sys_->K_p * state.P);
  if (times_.empty()) {
    dissipated_.push_back(0.0);
  } else {
    double dt = state.t - times_.back();
    dissipated_.push_back(dissipated_.back() + 0.5 * dt * (rate + last_rate_));
  }
  times_.push_back(state.t);
  energy_.push_back(e);
  last_rate_ = rate;
}

} // namespace mpetdg
