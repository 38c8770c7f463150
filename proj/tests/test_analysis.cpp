#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "mpetdg/analysis.hpp"

using namespace mpetdg;

namespace {

MpetParameters simple_2d() {
  MpetParameters p;
  p.dim = 2;
  p.rho = 1.0;
  p.lambda = 1.0;
  p.mu = 1.0;
  p.networks.resize(2);
  for (auto& n : p.networks) {
    n.alpha = 0.25;
    n.storage = 0.1;
    n.permeability = Eigen::Matrix3d::Identity();
    n.viscosity = 1.0;
    n.beta_external = 0.1;
  }
  p.beta = Eigen::MatrixXd::Zero(2, 2);
  p.beta(0, 1) = p.beta(1, 0) = 0.5;
  return p;
}

void classify_all_neumann(PolyMesh& m, int n_networks) {
  for (auto& f : m.faces) {
    if (!f.interior()) {
      f.disp_kind = FaceKind::Neumann;
      f.pressure_kind.assign(n_networks, FaceKind::Neumann);
    } else {
      f.pressure_kind.assign(n_networks, FaceKind::Interior);
    }
  }
}

} // namespace

TEST_CASE("zero fields have zero norms") {
  PolyMesh m = build_unit_mesh(2, 2);
  MpetParameters params = simple_2d();
  PenaltyConfig pc;
  m.classify_all_dirichlet(2);
  DgSpace su(m, 1, 2);
  DgSpace sq(m, 1, 1);
  CHECK(dg_norm_elastic(su, Eigen::VectorXd::Zero(su.n_dofs()), params, pc) == 0.0);
  CHECK(dg_norm_pressure(sq, Eigen::VectorXd::Zero(sq.n_dofs()), 0, params, pc) == 0.0);
}

TEST_CASE("continuous field carries no jump contribution") {
  PolyMesh m = build_unit_mesh(3, 2);
  MpetParameters params = simple_2d();
  PenaltyConfig pc;
  classify_all_neumann(m, 2);
  DgSpace su(m, 1, 2);
  // u = (x, -y): eps = diag(1, -1), div u = 0
  Eigen::VectorXd U = su.project([](const Vec& x) {
    Eigen::VectorXd v(2);
    v << x.x(), -x.y();
    return v;
  });
  double expect = std::sqrt(2.0 * params.mu * 2.0);
  CHECK(dg_norm_elastic(su, U, params, pc) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("single-element linear pressure norm against closed form") {
  PolyMesh fine = build_unit_mesh(1, 2);
  PolyMesh m = agglomerate_mesh(fine, 1, 1);
  MpetParameters params = simple_2d();
  PenaltyConfig pc;
  m.classify_all_dirichlet(2);
  DgSpace sq(m, 1, 1);
  Eigen::VectorXd p = sq.project([](const Vec& x) {
    Eigen::VectorXd v(1);
    v << x.x();
    return v;
  });
  // grad term: |grad p| = 1 on the unit square -> 1
  // jump term: zeta * int_boundary p^2 with zeta = z q^2 / h, h = sqrt(2),
  // int p^2 over the four edges = 1 + 2/3
  double zeta = 10.0 / std::sqrt(2.0);
  double expect = 1.0 + std::sqrt(zeta * (1.0 + 2.0 / 3.0));
  CHECK(dg_norm_pressure(sq, p, 0, params, pc) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("norm homogeneity and triangle inequality") {
  PolyMesh m = build_unit_mesh(2, 2);
  MpetParameters params = simple_2d();
  PenaltyConfig pc;
  m.classify_all_dirichlet(2);
  DgSpace su(m, 2, 2);
  DgSpace sq(m, 1, 1);
  std::mt19937 rng(41);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd a(su.n_dofs()), b(su.n_dofs());
    for (int i = 0; i < su.n_dofs(); ++i) {
      a[i] = gauss(rng);
      b[i] = gauss(rng);
    }
    double na = dg_norm_elastic(su, a, params, pc);
    double ns = dg_norm_elastic(su, 3.5 * a, params, pc);
    CHECK(ns == doctest::Approx(3.5 * na).epsilon(1e-12));
    double nb = dg_norm_elastic(su, b, params, pc);
    double nab = dg_norm_elastic(su, a + b, params, pc);
    CHECK(nab <= na + nb + 1e-12 * (na + nb));

    Eigen::VectorXd pa(sq.n_dofs()), pb(sq.n_dofs());
    for (int i = 0; i < sq.n_dofs(); ++i) {
      pa[i] = gauss(rng);
      pb[i] = gauss(rng);
    }
    double qa = dg_norm_pressure(sq, pa, 1, params, pc);
    CHECK(dg_norm_pressure(sq, -2.0 * pa, 1, params, pc) ==
          doctest::Approx(2.0 * qa).epsilon(1e-12));
    double qb = dg_norm_pressure(sq, pb, 1, params, pc);
    CHECK(dg_norm_pressure(sq, pa + pb, 1, params, pc) <= qa + qb + 1e-12 * (qa + qb));
  }
}

TEST_CASE("interpolated polynomial solution has vanishing errors") {
  PolyMesh m = build_unit_mesh(2, 2);
  MpetParameters params = simple_2d();
  PenaltyConfig pc;
  m.classify_all_dirichlet(2);
  DgSpace su(m, 2, 2);
  DgSpace sq(m, 1, 1);

  ManufacturedCase mc;
  mc.params = params;
  mc.dim = 2;
  mc.u = [](const Vec& x, double t) {
    Eigen::VectorXd v(2);
    v << t * (x.x() * x.x() - x.y()), t * x.x() * x.y();
    return v;
  };
  mc.grad_u = [](const Vec& x, double t) {
    Eigen::MatrixXd g(2, 2);
    g << 2.0 * t * x.x(), -t, t * x.y(), t * x.x();
    return g;
  };
  mc.p = [](int j, const Vec& x, double t) {
    return t * (x.x() + (j == 0 ? x.y() : -x.y()));
  };
  mc.grad_p = [](const Vec&, double t, int j) {
    Eigen::VectorXd g(2);
    g << t, (j == 0 ? t : -t);
    return g;
  };

  const double tf = 0.8;
  TransientState state;
  state.t = tf;
  state.U = su.project([&](const Vec& x) { return mc.u(x, tf); });
  state.Z = Eigen::VectorXd::Zero(su.n_dofs());
  state.A = Eigen::VectorXd::Zero(su.n_dofs());
  state.P.resize(2 * sq.n_dofs());
  for (int j = 0; j < 2; ++j)
    state.P.segment(j * sq.n_dofs(), sq.n_dofs()) = sq.project([&](const Vec& x) {
      Eigen::VectorXd v(1);
      v << mc.p(j, x, tf);
      return v;
    });

  ErrorReport rep = compute_errors(su, sq, state, mc, pc);
  CHECK(rep.t_eval == tf);
  CHECK(rep.err_u_dg < 1e-10);
  CHECK(rep.err_u_l2 < 1e-11);
  CHECK(rep.err_p_dg < 1e-10);
  CHECK(rep.err_p_l2 < 1e-11);
}

TEST_CASE("pressure error weighting by the storage coefficients") {
  PolyMesh m = build_unit_mesh(2, 2);
  MpetParameters params = simple_2d();
  params.networks[0].storage = 0.1;
  params.networks[1].storage = 0.4;
  PenaltyConfig pc;
  m.classify_all_dirichlet(2);
  DgSpace su(m, 1, 2);
  DgSpace sq(m, 1, 1);

  ManufacturedCase mc;
  mc.params = params;
  mc.dim = 2;
  mc.u = [](const Vec&, double) { return Eigen::VectorXd::Zero(2).eval(); };
  mc.grad_u = [](const Vec&, double) { return Eigen::MatrixXd::Zero(2, 2).eval(); };
  mc.p = [](int, const Vec&, double) { return 1.0; };
  mc.grad_p = [](const Vec&, double, int) { return Eigen::VectorXd::Zero(2).eval(); };

  TransientState state;
  state.t = 1.0;
  state.U = Eigen::VectorXd::Zero(su.n_dofs());
  state.Z = state.U;
  state.A = state.U;
  state.P = Eigen::VectorXd::Zero(2 * sq.n_dofs());

  ErrorReport rep = compute_errors(su, sq, state, mc, pc);
  // || e_j ||_L2 = 1 on the unit square for both networks
  double expect = std::sqrt(0.1) + std::sqrt(0.4);
  CHECK(rep.err_p_l2 == doctest::Approx(expect).epsilon(1e-10));
  CHECK(rep.err_u_dg == 0.0);
}

TEST_CASE("convergence rate formula") {
  std::vector<double> h = {0.866, 0.433};
  std::vector<double> rates = convergence_rates(h, {1.97e-2, 3.69e-3});
  CHECK(std::isnan(rates[0]));
  CHECK(rates[1] == doctest::Approx(2.42).epsilon(0.01 / 2.42));

  rates = convergence_rates(h, {9.52e-3, 2.56e-3});
  CHECK(rates[1] == doctest::Approx(1.89).epsilon(0.01 / 1.89));

  rates = convergence_rates({0.8, 0.4, 0.2}, {4.0, 2.0, 1.0});
  CHECK(rates[1] == 1.0);
  CHECK(rates[2] == 1.0);

  CHECK_THROWS(convergence_rates({0.4, 0.8}, {1.0, 2.0}));
  CHECK_THROWS(convergence_rates({0.4, 0.4}, {1.0, 2.0}));
}

TEST_CASE("rate table serialization") {
  std::vector<ConvergenceRow> rows(2);
  rows[0] = {0.866, 1.97e-2, std::nan(""), 3.1e-3, std::nan("")};
  rows[1] = {0.433, 3.69e-3, 2.42, 7.5e-4, 2.05};
  std::string s = format_rate_table(rows);
  CHECK(s.find("h,err_u_dg,roc_u,err_p_l2,roc_p") == 0);
  CHECK(s == format_rate_table(rows)); // deterministic
}

TEST_CASE("energy tracker") {
  PolyMesh m = build_unit_mesh(2, 2);
  MpetParameters params = simple_2d();
  PenaltyConfig pc;
  m.classify_all_dirichlet(2);
  DgSpace su(m, 1, 2);
  DgSpace sq(m, 1, 1);
  BlockSystem sys = assemble_system(su, sq, params, pc);
  auto zf = [](const Vec&, double) { return Eigen::VectorXd::Zero(2).eval(); };
  auto zg = [](int, const Vec&, double) { return 0.0; };
  RhsAssembler rhs(su, sq, params, pc, zf, zg, homogeneous_boundary_data(2));

  EnergyTracker zero(sys);
  TransientState zstate;
  zstate.t = 0.0;
  zstate.U = Eigen::VectorXd::Zero(sys.n_u);
  zstate.Z = zstate.U;
  zstate.A = zstate.U;
  zstate.P = Eigen::VectorXd::Zero(2 * sys.n_p);
  zero.record(zstate);
  CHECK(zero.energy()[0] == 0.0);
  CHECK(zero.dissipated()[0] == 0.0);

  TimeConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.1;
  NewmarkThetaStepper stepper(sys, rhs, cfg);
  std::mt19937 rng(19);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd U0(sys.n_u), Z0(sys.n_u), P0(2 * sys.n_p);
  for (int i = 0; i < sys.n_u; ++i) {
    U0[i] = 0.1 * gauss(rng);
    Z0[i] = 0.1 * gauss(rng);
  }
  for (int i = 0; i < P0.size(); ++i) P0[i] = 0.1 * gauss(rng);
  TransientState state = stepper.initial_state(U0, Z0, P0, 0.0);
  EnergyTracker tracker(sys);
  run_transient(stepper, state, cfg, [&](const TransientState& st) { tracker.record(st); });

  REQUIRE(tracker.energy().size() == 101);
  double e0 = tracker.energy()[0];
  for (size_t i = 1; i < tracker.energy().size(); ++i) {
    CHECK(tracker.energy()[i] <= e0 * (1.0 + 1e-6));
    CHECK(tracker.dissipated()[i] >= tracker.dissipated()[i - 1] - 1e-14);
  }
}
