#include "mpetdg/timestepper.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

namespace mpetdg {

namespace {

void append_block(std::vector<Eigen::Triplet<double>>& trips, const SpMat& m, double scale,
                  int row0, int col0) {
  if (scale == 0.0) return;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      trips.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
}

void append_identity(std::vector<Eigen::Triplet<double>>& trips, int n, double scale, int row0,
                     int col0) {
  if (scale == 0.0) return;
  for (int i = 0; i < n; ++i) trips.emplace_back(row0 + i, col0 + i, scale);
}

} // namespace

struct NewmarkThetaStepper::Impl {
  // Reduced system solved per step. To avoid the catastrophic 1/(beta dt^2)
  // scaling of the displacement row at small timesteps, the staged solve uses
  // the acceleration increment as the unknown:
  //   [ M_u + beta dt^2 K_u      -B^T            ] [A^{n+1}]   [rhs_u]
  //   [ theta gamma dt B    M_p/dt + theta K_p   ] [P^{n+1}] = [rhs_p]
  // which is algebraically identical to the (U, P) form.
  SpMat S;
  Eigen::SparseLU<SpMat> lu;
  Eigen::GMRES<SpMat, Eigen::DiagonalPreconditioner<double>> gmres;
  bool use_direct = true;

  Eigen::SparseLU<SpMat> mass_lu; // for the initial acceleration

  // one-shot block system, built on first use of step_full
  bool full_ready = false;
  SpMat A1, A2;
  Eigen::SparseLU<SpMat> full_lu;

  // RHS cache keyed by exact time value
  bool have_cache = false;
  double t_cache = 0.0;
  Eigen::VectorXd F_cache, G_cache;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double tol) {
    if (use_direct) {
      Eigen::VectorXd x = lu.solve(rhs);
      if (lu.info() != Eigen::Success) throw std::runtime_error("reduced solve failed");
      return x;
    }
    gmres.setTolerance(tol);
    Eigen::VectorXd x = gmres.solve(rhs);
    if (gmres.info() != Eigen::Success)
      throw std::runtime_error("GMRES did not converge (error " +
                               std::to_string(gmres.error()) + ")");
    return x;
  }
};

NewmarkThetaStepper::NewmarkThetaStepper(const BlockSystem& sys, const RhsAssembler& rhs,
                                         const TimeConfig& cfg)
    : impl_(std::make_unique<Impl>()), sys_(&sys), rhs_(&rhs), cfg_(cfg) {
  if (cfg.dt <= 0.0) throw std::invalid_argument("dt must be positive");
  if (cfg.beta <= 0.0 || cfg.beta > 0.5) throw std::invalid_argument("beta out of range");
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw std::invalid_argument("gamma out of range");
  if (cfg.theta < 0.0 || cfg.theta > 1.0) throw std::invalid_argument("theta out of range");

  const int nu = sys.n_u;
  const int nP = sys.n_networks * sys.n_p;
  const double dt = cfg.dt, beta = cfg.beta, gamma = cfg.gamma, theta = cfg.theta;

  std::vector<Eigen::Triplet<double>> trips;
  append_block(trips, sys.M_u, 1.0, 0, 0);
  append_block(trips, sys.K_u, beta * dt * dt, 0, 0);
  append_block(trips, SpMat(sys.B.transpose()), -1.0, 0, nu);
  append_block(trips, sys.B, theta * gamma * dt, nu, 0);
  append_block(trips, sys.M_p, 1.0 / dt, nu, nu);
  append_block(trips, sys.K_p, theta, nu, nu);
  impl_->S.resize(nu + nP, nu + nP);
  impl_->S.setFromTriplets(trips.begin(), trips.end());

  impl_->use_direct = (nu + nP) <= cfg.direct_threshold;
  if (impl_->use_direct) {
    impl_->lu.compute(impl_->S);
    if (impl_->lu.info() != Eigen::Success)
      throw std::runtime_error("factorization of the reduced system failed");
  } else {
    impl_->gmres.setMaxIterations(2000);
    impl_->gmres.set_restart(100);
    impl_->gmres.compute(impl_->S);
  }

  impl_->mass_lu.compute(sys.M_u);
  if (impl_->mass_lu.info() != Eigen::Success)
    throw std::runtime_error("mass matrix factorization failed");
}

NewmarkThetaStepper::~NewmarkThetaStepper() = default;

void NewmarkThetaStepper::cached_rhs(double t, const Eigen::VectorXd** F,
                                     const Eigen::VectorXd** G) {
  if (!impl_->have_cache || impl_->t_cache != t) {
    rhs_->assemble(t, impl_->F_cache, impl_->G_cache);
    impl_->t_cache = t;
    impl_->have_cache = true;
  }
  *F = &impl_->F_cache;
  *G = &impl_->G_cache;
}

TransientState NewmarkThetaStepper::initial_state(const Eigen::VectorXd& U0,
                                                  const Eigen::VectorXd& Z0,
                                                  const Eigen::VectorXd& P0, double t0) const {
  TransientState s;
  s.t = t0;
  s.U = U0;
  s.Z = Z0;
  s.P = P0;
  Eigen::VectorXd F, G;
  rhs_->assemble(t0, F, G);
  Eigen::VectorXd r = F - sys_->K_u * U0 + sys_->B.transpose() * P0;
  s.A = impl_->mass_lu.solve(r);
  if (impl_->mass_lu.info() != Eigen::Success)
    throw std::runtime_error("initial acceleration solve failed");
  return s;
}

void NewmarkThetaStepper::step(TransientState& state) {
  const double dt = cfg_.dt, beta = cfg_.beta, gamma = cfg_.gamma, theta = cfg_.theta;
  const int nu = sys_->n_u;
  const int nP = sys_->n_networks * sys_->n_p;
  const double tn = state.t;
  const double tnp1 = tn + dt;

  const Eigen::VectorXd *Fn, *Gn;
  cached_rhs(tn, &Fn, &Gn);
  (void)Fn;
  Eigen::VectorXd G_old = *Gn; // cache is overwritten below
  Eigen::VectorXd F_new, G_new;
  rhs_->assemble(tnp1, F_new, G_new);

  // Newmark displacement predictor; the solve determines A^{n+1} directly so
  // that no 1/(beta dt^2) differences of near-equal displacements appear.
  Eigen::VectorXd U_pred =
      state.U + dt * state.Z + dt * dt * (0.5 - beta) * state.A;

  Eigen::VectorXd rhs(nu + nP);
  rhs.head(nu) = F_new - sys_->K_u * U_pred;

  Eigen::VectorXd BZ = sys_->B * state.Z;
  Eigen::VectorXd BA = sys_->B * state.A;
  double c_ba = -theta * (1.0 - gamma / (2.0 * beta));
  if (cfg_.alt_history_sign) c_ba = -c_ba;
  // the U^{n+1} - U^n coupling history expressed through the predictor
  double c_ba_red = c_ba - theta * gamma * (1.0 / (2.0 * beta) - 1.0);
  rhs.tail(nP) = theta * G_new + (1.0 - theta) * G_old + (sys_->M_p * state.P) / dt -
                 (1.0 - theta) * (sys_->K_p * state.P) - BZ + c_ba_red * dt * BA;

  Eigen::VectorXd x = impl_->solve(rhs, cfg_.linear_tol);
  Eigen::VectorXd A_new = x.head(nu);
  Eigen::VectorXd P_new = x.tail(nP);
  Eigen::VectorXd U_new = U_pred + beta * dt * dt * A_new;
  Eigen::VectorXd Z_new = state.Z + dt * (gamma * A_new + (1.0 - gamma) * state.A);

  state.U = std::move(U_new);
  state.P = std::move(P_new);
  state.Z = std::move(Z_new);
  state.A = std::move(A_new);
  state.t = tnp1;
  impl_->t_cache = tnp1;
  impl_->F_cache = std::move(F_new);
  impl_->G_cache = std::move(G_new);
  impl_->have_cache = true;

  if (!state.U.allFinite() || !state.P.allFinite() || !state.Z.allFinite() ||
      !state.A.allFinite())
    throw std::runtime_error("non-finite state after step at t = " + std::to_string(tnp1));
}

void NewmarkThetaStepper::step_full(TransientState& state) {
  const double dt = cfg_.dt, beta = cfg_.beta, gamma = cfg_.gamma, theta = cfg_.theta;
  const int nu = sys_->n_u;
  const int nP = sys_->n_networks * sys_->n_p;
  const int n = 3 * nu + nP; // [U, P, Z, A]
  const int oP = nu, oZ = nu + nP, oA = 2 * nu + nP;

  if (!impl_->full_ready) {
    double c_ba = -theta * (1.0 - gamma / (2.0 * beta));
    if (cfg_.alt_history_sign) c_ba = -c_ba;

    std::vector<Eigen::Triplet<double>> t1, t2;
    append_block(t1, sys_->M_u, 1.0 / (beta * dt * dt), 0, 0);
    append_block(t1, sys_->K_u, 1.0, 0, 0);
    append_block(t1, SpMat(sys_->B.transpose()), -1.0, 0, oP);
    append_block(t1, sys_->B, theta * gamma / (beta * dt), oP, 0);
    append_block(t1, sys_->M_p, 1.0 / dt, oP, oP);
    append_block(t1, sys_->K_p, theta, oP, oP);
    append_identity(t1, nu, 1.0, oZ, oZ);
    append_identity(t1, nu, -dt * gamma, oZ, oA);
    append_identity(t1, nu, -1.0 / (beta * dt * dt), oA, 0);
    append_identity(t1, nu, 1.0, oA, oA);
    impl_->A1.resize(n, n);
    impl_->A1.setFromTriplets(t1.begin(), t1.end());

    append_block(t2, sys_->M_u, 1.0 / (beta * dt * dt), 0, 0);
    append_block(t2, sys_->M_u, 1.0 / (beta * dt), 0, oZ);
    append_block(t2, sys_->M_u, (1.0 - 2.0 * beta) / (2.0 * beta), 0, oA);
    append_block(t2, sys_->B, theta * gamma / (beta * dt), oP, 0);
    append_block(t2, sys_->M_p, 1.0 / dt, oP, oP);
    append_block(t2, sys_->K_p, -(1.0 - theta), oP, oP);
    append_block(t2, sys_->B, theta * gamma / beta - 1.0, oP, oZ);
    append_block(t2, sys_->B, c_ba * dt, oP, oA);
    append_identity(t2, nu, 1.0, oZ, oZ);
    append_identity(t2, nu, dt * (1.0 - gamma), oZ, oA);
    append_identity(t2, nu, -1.0 / (beta * dt * dt), oA, 0);
    append_identity(t2, nu, -1.0 / (beta * dt), oA, oZ);
    append_identity(t2, nu, (2.0 * beta - 1.0) / (2.0 * beta), oA, oA);
    impl_->A2.resize(n, n);
    impl_->A2.setFromTriplets(t2.begin(), t2.end());

    impl_->full_lu.compute(impl_->A1);
    if (impl_->full_lu.info() != Eigen::Success)
      throw std::runtime_error("factorization of the one-shot system failed");
    impl_->full_ready = true;
  }

  const double tn = state.t;
  const Eigen::VectorXd *Fn, *Gn;
  cached_rhs(tn, &Fn, &Gn);
  (void)Fn;
  Eigen::VectorXd G_old = *Gn;
  Eigen::VectorXd F_new, G_new;
  rhs_->assemble(tn + dt, F_new, G_new);

  Eigen::VectorXd X(n);
  X.head(nu) = state.U;
  X.segment(oP, nP) = state.P;
  X.segment(oZ, nu) = state.Z;
  X.segment(oA, nu) = state.A;

  Eigen::VectorXd S = Eigen::VectorXd::Zero(n);
  S.head(nu) = F_new;
  S.segment(oP, nP) = theta * G_new + (1.0 - theta) * G_old;

  Eigen::VectorXd X_new = impl_->full_lu.solve(impl_->A2 * X + S);
  if (impl_->full_lu.info() != Eigen::Success)
    throw std::runtime_error("one-shot solve failed");

  state.U = X_new.head(nu);
  state.P = X_new.segment(oP, nP);
  state.Z = X_new.segment(oZ, nu);
  state.A = X_new.segment(oA, nu);
  state.t = tn + dt;
  impl_->t_cache = state.t;
  impl_->F_cache = std::move(F_new);
  impl_->G_cache = std::move(G_new);
  impl_->have_cache = true;
}

void run_transient(NewmarkThetaStepper& stepper, TransientState& state, const TimeConfig& cfg,
                   const std::function<void(const TransientState&)>& observer) {
  const double span = cfg.t_end - state.t;
  if (span <= 0.0) return;
  const long n_steps = std::lround(span / cfg.dt);
  if (n_steps < 1 || std::abs(n_steps * cfg.dt - span) > 1e-10 * std::max(span, cfg.dt))
    std::cerr << "warning: time span " << span << " is not an integer multiple of dt " << cfg.dt
              << "; stopping at " << state.t + n_steps * cfg.dt << "\n";
  if (observer) observer(state);
  for (long i = 0; i < n_steps; ++i) {
    stepper.step(state);
    if (observer) observer(state);
  }
}

} // namespace mpetdg
