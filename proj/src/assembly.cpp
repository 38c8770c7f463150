#include "mpetdg/assembly.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace mpetdg {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

int voigt_size(int d) { return d * (d + 1) / 2; }

// Voigt component list: diagonal first, then off-diagonal pairs.
void voigt_pairs(int d, std::vector<std::pair<int, int>>& pairs) {
  pairs.clear();
  for (int a = 0; a < d; ++a) pairs.emplace_back(a, a);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) pairs.emplace_back(a, b);
}

// Frobenius weights: 1 for diagonal entries, 2 for each off-diagonal pair.
Eigen::VectorXd voigt_weights(int d) {
  Eigen::VectorXd w(voigt_size(d));
  for (int a = 0; a < d; ++a) w[a] = 1.0;
  for (int a = d; a < voigt_size(d); ++a) w[a] = 2.0;
  return w;
}

struct FaceSide {
  int element;
  double sign;    // +1 for the plus side, -1 for minus
  double avg;     // averaging factor: 1/2 interior, 1 boundary
  Eigen::MatrixXd vals;                 // local_dim x nq
  std::vector<Eigen::MatrixXd> grads;   // d entries, local_dim x nq
};

std::vector<FaceSide> face_sides(const DgSpace& space, const Face& face, const QuadRule& rule,
                                 bool with_grads) {
  std::vector<FaceSide> sides;
  double avg = face.interior() ? 0.5 : 1.0;
  sides.push_back({face.elem_plus, +1.0, avg, space.values(face.elem_plus, rule.points), {}});
  if (with_grads) sides.back().grads = space.gradients(face.elem_plus, rule.points);
  if (face.interior()) {
    sides.push_back({face.elem_minus, -1.0, avg, space.values(face.elem_minus, rule.points), {}});
    if (with_grads) sides.back().grads = space.gradients(face.elem_minus, rule.points);
  }
  return sides;
}

void scatter(Triplets& trips, const Eigen::MatrixXd& local, const std::vector<int>& rows,
             const std::vector<int>& cols) {
  for (int i = 0; i < local.rows(); ++i)
    for (int j = 0; j < local.cols(); ++j)
      if (local(i, j) != 0.0) trips.emplace_back(rows[i], cols[j], local(i, j));
}

} // namespace

double PenaltyConfig::effective_z(int j, const MpetParameters& params) const {
  return std::max(z_for(j), 10.0 / std::sqrt(params.networks[j].viscosity));
}

double penalty_eta(const Face& face, const PolyMesh& mesh, const MpetParameters& params,
                   const PenaltyConfig& pc, int degree_p) {
  // constant coefficients: C_E^{K+} = C_E^{K-}; harmonic mean is the identity
  double ce = params.elastic_tensor_bound();
  double h = face.interior() ? face_harmonic_h(face, mesh) : mesh.elements[face.elem_plus].h;
  return pc.eta0 * ce * degree_p * degree_p / h;
}

double penalty_zeta(const Face& face, const PolyMesh& mesh, int network,
                    const MpetParameters& params, const PenaltyConfig& pc, int degree_q) {
  double kj = params.permeability_bound(network);
  double h = face.interior() ? face_harmonic_h(face, mesh) : mesh.elements[face.elem_plus].h;
  double z = pc.effective_z(network, params);
  return z * (kj / std::sqrt(params.networks[network].viscosity)) * degree_q * degree_q / h;
}

SpMat assemble_mass(const DgSpace& space, double weight) {
  const auto& mesh = space.mesh();
  const int bs = space.block_size();
  Triplets trips;
  const int order = 2 * space.degree() + 2;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    QuadRule rule = element_quadrature(mesh, e, order);
    Eigen::MatrixXd phi = space.values(e, rule.points);
    Eigen::MatrixXd mloc = Eigen::MatrixXd::Zero(space.local_dim(), space.local_dim());
    for (size_t q = 0; q < rule.points.size(); ++q)
      mloc += weight * rule.weights[q] * phi.col(q) * phi.col(q).transpose();
    const int off = space.offset(e);
    for (int c = 0; c < space.n_components(); ++c)
      for (int i = 0; i < space.local_dim(); ++i)
        for (int j = 0; j < space.local_dim(); ++j)
          if (mloc(i, j) != 0.0)
            trips.emplace_back(off + c * space.local_dim() + i, off + c * space.local_dim() + j,
                               mloc(i, j));
  }
  SpMat m(space.n_dofs(), space.n_dofs());
  m.setFromTriplets(trips.begin(), trips.end());
  (void)bs;
  return m;
}

SpMat assemble_elastic_stiffness(const DgSpace& space_u, const MpetParameters& params,
                                 const PenaltyConfig& pc) {
  if (pc.eta0 < 3.0)
    std::cerr << "warning: eta0 = " << pc.eta0 << " is likely too small for coercivity\n";
  const auto& mesh = space_u.mesh();
  const int d = mesh.dim;
  const int ldim = space_u.local_dim();
  const int bs = space_u.block_size();
  const int nv = voigt_size(d);
  std::vector<std::pair<int, int>> vp;
  voigt_pairs(d, vp);
  const Eigen::VectorXd vw = voigt_weights(d);
  const double mu = params.mu, lam = params.lambda;
  const int order = 2 * space_u.degree() + 2;
  Triplets trips;

  // volume term: int sigma(u):eps(v)
  for (int e = 0; e < mesh.n_elements(); ++e) {
    QuadRule rule = element_quadrature(mesh, e, order);
    auto grads = space_u.gradients(e, rule.points);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(bs, bs);
    Eigen::MatrixXd strain(nv, bs); // Voigt strain of each basis function
    Eigen::VectorXd divv(bs);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      strain.setZero();
      divv.setZero();
      for (int c = 0; c < d; ++c)
        for (int i = 0; i < ldim; ++i) {
          const int k = c * ldim + i;
          for (int v = 0; v < nv; ++v) {
            auto [a, b] = vp[v];
            double s = 0.0;
            if (a == c) s += 0.5 * grads[b](i, q);
            if (b == c) s += 0.5 * grads[a](i, q);
            strain(v, k) = s;
          }
          divv[k] = grads[c](i, q);
        }
      // sigma:eps = 2 mu eps:eps + lambda div div
      Eigen::MatrixXd ws = strain.array().colwise() * vw.array();
      local += rule.weights[q] * (2.0 * mu * (strain.transpose() * ws) +
                                  lam * (divv * divv.transpose()));
    }
    std::vector<int> dofs(bs);
    for (int k = 0; k < bs; ++k) dofs[k] = space_u.offset(e) + k;
    scatter(trips, local, dofs, dofs);
  }

  // face terms over interior and displacement-Dirichlet faces
  for (const auto& face : mesh.faces) {
    if (!face.interior() && face.disp_kind != FaceKind::Dirichlet) continue;
    const double eta = penalty_eta(face, mesh, params, pc, space_u.degree());
    QuadRule rule = face_quadrature(mesh, face, order);
    auto sides = face_sides(space_u, face, rule, true);
    const int nsides = static_cast<int>(sides.size());
    const int nd = nsides * bs;
    std::vector<int> dofs(nd);
    for (int s = 0; s < nsides; ++s)
      for (int k = 0; k < bs; ++k) dofs[s * bs + k] = space_u.offset(sides[s].element) + k;

    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nd, nd);
    Eigen::MatrixXd J(nv, nd), S(nv, nd);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      J.setZero();
      S.setZero();
      for (int s = 0; s < nsides; ++s) {
        Vec n = sides[s].sign * face.normal;
        for (int c = 0; c < d; ++c)
          for (int i = 0; i < ldim; ++i) {
            const int k = s * bs + c * ldim + i;
            const double phi = sides[s].vals(i, q);
            double div = sides[s].grads[c](i, q);
            for (int v = 0; v < nv; ++v) {
              auto [a, b] = vp[v];
              // symmetrized jump tensor of phi e_c with normal n
              double jv = 0.0;
              if (a == c) jv += 0.5 * phi * n[b];
              if (b == c) jv += 0.5 * phi * n[a];
              J(v, k) = jv;
              // averaged stress sigma(phi e_c) = 2 mu eps + lam div I
              double eps = 0.0;
              if (a == c) eps += 0.5 * sides[s].grads[b](i, q);
              if (b == c) eps += 0.5 * sides[s].grads[a](i, q);
              double sig = 2.0 * mu * eps + ((a == b) ? lam * div : 0.0);
              S(v, k) = sides[s].avg * sig;
            }
          }
      }
      Eigen::MatrixXd wJ = J.array().colwise() * vw.array();
      local += rule.weights[q] * (eta * (J.transpose() * wJ) - S.transpose() * wJ -
                                  wJ.transpose() * S);
    }
    scatter(trips, local, dofs, dofs);
  }

  SpMat K(space_u.n_dofs(), space_u.n_dofs());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

SpMat assemble_pressure_stiffness(const DgSpace& space_q, int network,
                                  const MpetParameters& params, const PenaltyConfig& pc) {
  const auto& mesh = space_q.mesh();
  const int d = mesh.dim;
  const int ldim = space_q.local_dim();
  const auto& net = params.networks[network];
  const Eigen::MatrixXd K = net.permeability.topLeftCorner(d, d) / net.viscosity;
  const int order = 2 * space_q.degree() + 2;
  Triplets trips;

  for (int e = 0; e < mesh.n_elements(); ++e) {
    QuadRule rule = element_quadrature(mesh, e, order);
    auto grads = space_q.gradients(e, rule.points);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(ldim, ldim);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Eigen::MatrixXd g(d, ldim);
      for (int a = 0; a < d; ++a) g.row(a) = grads[a].col(q).transpose();
      local += rule.weights[q] * (g.transpose() * K * g);
    }
    std::vector<int> dofs(ldim);
    for (int i = 0; i < ldim; ++i) dofs[i] = space_q.offset(e) + i;
    scatter(trips, local, dofs, dofs);
  }

  for (const auto& face : mesh.faces) {
    bool dirichlet = !face.interior() && face.pressure_kind[network] == FaceKind::Dirichlet;
    if (!face.interior() && !dirichlet) continue;
    const double zeta = penalty_zeta(face, mesh, network, params, pc, space_q.degree());
    QuadRule rule = face_quadrature(mesh, face, order);
    auto sides = face_sides(space_q, face, rule, true);
    const int nsides = static_cast<int>(sides.size());
    const int nd = nsides * ldim;
    std::vector<int> dofs(nd);
    for (int s = 0; s < nsides; ++s)
      for (int i = 0; i < ldim; ++i) dofs[s * ldim + i] = space_q.offset(sides[s].element) + i;

    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nd, nd);
    Eigen::VectorXd jump(nd), flux(nd);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      for (int s = 0; s < nsides; ++s) {
        for (int i = 0; i < ldim; ++i) {
          const int k = s * ldim + i;
          jump[k] = sides[s].sign * sides[s].vals(i, q); // [[phi]] . n_plus
          Vec g = Vec::Zero();
          for (int a = 0; a < d; ++a) g[a] = sides[s].grads[a](i, q);
          double kn = 0.0;
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) kn += face.normal[a] * K(a, b) * g[b];
          flux[k] = sides[s].avg * kn; // {K grad phi / mu} . n_plus
        }
      }
      local += rule.weights[q] * (zeta * (jump * jump.transpose()) - flux * jump.transpose() -
                                  jump * flux.transpose());
    }
    scatter(trips, local, dofs, dofs);
  }

  SpMat A(space_q.n_dofs(), space_q.n_dofs());
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

SpMat assemble_coupling_B(const DgSpace& space_q, const DgSpace& space_u, int network,
                          const MpetParameters& params) {
  const auto& mesh = space_q.mesh();
  const int d = mesh.dim;
  const int lq = space_q.local_dim();
  const int lu = space_u.local_dim();
  const int bu = space_u.block_size();
  const double alpha = params.networks[network].alpha;
  const int order = space_q.degree() + space_u.degree() + 2;
  Triplets trips;

  if (alpha != 0.0) {
    for (int e = 0; e < mesh.n_elements(); ++e) {
      QuadRule rule = element_quadrature(mesh, e, order);
      Eigen::MatrixXd psi = space_q.values(e, rule.points);
      auto gu = space_u.gradients(e, rule.points);
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(lq, bu);
      for (size_t q = 0; q < rule.points.size(); ++q)
        for (int r = 0; r < lq; ++r)
          for (int c = 0; c < d; ++c)
            for (int i = 0; i < lu; ++i)
              local(r, c * lu + i) += rule.weights[q] * alpha * psi(r, q) * gu[c](i, q);
      std::vector<int> rows(lq), cols(bu);
      for (int r = 0; r < lq; ++r) rows[r] = space_q.offset(e) + r;
      for (int k = 0; k < bu; ++k) cols[k] = space_u.offset(e) + k;
      scatter(trips, local, rows, cols);
    }

    for (const auto& face : mesh.faces) {
      bool dirichlet = !face.interior() && face.pressure_kind[network] == FaceKind::Dirichlet;
      if (!face.interior() && !dirichlet) continue;
      QuadRule rule = face_quadrature(mesh, face, order);
      auto psides = face_sides(space_q, face, rule, false);
      auto usides = face_sides(space_u, face, rule, false);
      const int nr = static_cast<int>(psides.size()) * lq;
      const int nc = static_cast<int>(usides.size()) * bu;
      std::vector<int> rows(nr), cols(nc);
      for (size_t s = 0; s < psides.size(); ++s)
        for (int r = 0; r < lq; ++r) rows[s * lq + r] = space_q.offset(psides[s].element) + r;
      for (size_t s = 0; s < usides.size(); ++s)
        for (int k = 0; k < bu; ++k) cols[s * bu + k] = space_u.offset(usides[s].element) + k;
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nr, nc);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        // -int alpha {psi I} : [[[v]]] = -int alpha {psi} (v . n_v)
        for (size_t sp = 0; sp < psides.size(); ++sp)
          for (int r = 0; r < lq; ++r) {
            double avg_psi = psides[sp].avg * psides[sp].vals(r, q);
            for (size_t su = 0; su < usides.size(); ++su) {
              Vec n = usides[su].sign * face.normal;
              for (int c = 0; c < d; ++c)
                for (int i = 0; i < lu; ++i)
                  local(sp * lq + r, su * bu + c * lu + i) -=
                      rule.weights[q] * alpha * avg_psi * usides[su].vals(i, q) * n[c];
            }
          }
      }
      scatter(trips, local, rows, cols);
    }
  }

  SpMat Bm(space_q.n_dofs(), space_u.n_dofs());
  Bm.setFromTriplets(trips.begin(), trips.end());
  return Bm;
}

SpMat assemble_transfer_coupling(const DgSpace& space_q, const MpetParameters& params) {
  const auto& mesh = space_q.mesh();
  const int J = params.n_networks();
  const int np = space_q.n_dofs();
  const int ldim = space_q.local_dim();
  const int order = 2 * space_q.degree() + 2;
  Triplets trips;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    QuadRule rule = element_quadrature(mesh, e, order);
    Eigen::MatrixXd psi = space_q.values(e, rule.points);
    Eigen::MatrixXd mloc = Eigen::MatrixXd::Zero(ldim, ldim);
    for (size_t q = 0; q < rule.points.size(); ++q)
      mloc += rule.weights[q] * psi.col(q) * psi.col(q).transpose();
    const int off = space_q.offset(e);
    for (int j = 0; j < J; ++j) {
      double diag = params.networks[j].beta_external;
      for (int k = 0; k < J; ++k) diag += params.beta(j, k);
      for (int i = 0; i < ldim; ++i)
        for (int l = 0; l < ldim; ++l) {
          if (mloc(i, l) == 0.0) continue;
          if (diag != 0.0)
            trips.emplace_back(j * np + off + i, j * np + off + l, diag * mloc(i, l));
          for (int k = 0; k < J; ++k)
            if (k != j && params.beta(j, k) != 0.0)
              trips.emplace_back(j * np + off + i, k * np + off + l,
                                 -params.beta(j, k) * mloc(i, l));
        }
    }
  }
  SpMat C(J * np, J * np);
  C.setFromTriplets(trips.begin(), trips.end());
  return C;
}

BlockSystem assemble_system(const DgSpace& space_u, const DgSpace& space_q,
                            const MpetParameters& params, const PenaltyConfig& pc) {
  BlockSystem sys;
  sys.n_u = space_u.n_dofs();
  sys.n_p = space_q.n_dofs();
  sys.n_networks = params.n_networks();
  const int J = sys.n_networks;

  sys.M_u = assemble_mass(space_u, params.rho);
  sys.K_u = assemble_elastic_stiffness(space_u, params, pc);

  Triplets btrips, mptrips, kptrips;
  for (int j = 0; j < J; ++j) {
    SpMat Bj = assemble_coupling_B(space_q, space_u, j, params);
    for (int k = 0; k < Bj.outerSize(); ++k)
      for (SpMat::InnerIterator it(Bj, k); it; ++it)
        btrips.emplace_back(j * sys.n_p + it.row(), it.col(), it.value());
    SpMat Mj = assemble_mass(space_q, params.networks[j].storage);
    for (int k = 0; k < Mj.outerSize(); ++k)
      for (SpMat::InnerIterator it(Mj, k); it; ++it)
        mptrips.emplace_back(j * sys.n_p + it.row(), j * sys.n_p + it.col(), it.value());
    SpMat Aj = assemble_pressure_stiffness(space_q, j, params, pc);
    for (int k = 0; k < Aj.outerSize(); ++k)
      for (SpMat::InnerIterator it(Aj, k); it; ++it)
        kptrips.emplace_back(j * sys.n_p + it.row(), j * sys.n_p + it.col(), it.value());
    sys.A_P.push_back(std::move(Aj));
  }
  SpMat coupling = assemble_transfer_coupling(space_q, params);
  for (int k = 0; k < coupling.outerSize(); ++k)
    for (SpMat::InnerIterator it(coupling, k); it; ++it)
      kptrips.emplace_back(it.row(), it.col(), it.value());

  sys.B.resize(J * sys.n_p, sys.n_u);
  sys.B.setFromTriplets(btrips.begin(), btrips.end());
  sys.M_p.resize(J * sys.n_p, J * sys.n_p);
  sys.M_p.setFromTriplets(mptrips.begin(), mptrips.end());
  sys.K_p.resize(J * sys.n_p, J * sys.n_p);
  sys.K_p.setFromTriplets(kptrips.begin(), kptrips.end());
  return sys;
}

RhsAssembler::RhsAssembler(const DgSpace& space_u, const DgSpace& space_q,
                           const MpetParameters& params, const PenaltyConfig& pc,
                           std::function<Eigen::VectorXd(const Vec&, double)> volume_f,
                           std::function<double(int, const Vec&, double)> volume_g,
                           BoundaryData boundary)
    : space_u_(&space_u), space_q_(&space_q), params_(params), pc_(pc),
      volume_f_(std::move(volume_f)), volume_g_(std::move(volume_g)),
      boundary_(std::move(boundary)) {}

void RhsAssembler::assemble(double t, Eigen::VectorXd& F, Eigen::VectorXd& G) const {
  const auto& mesh = space_u_->mesh();
  const int d = mesh.dim;
  const int J = params_.n_networks();
  const int lu = space_u_->local_dim();
  const int lq = space_q_->local_dim();
  const int np = space_q_->n_dofs();
  const double mu = params_.mu, lam = params_.lambda;
  const int order = 2 * std::max(space_u_->degree(), space_q_->degree()) + 4;

  F = Eigen::VectorXd::Zero(space_u_->n_dofs());
  G = Eigen::VectorXd::Zero(J * np);

  // volume loads
  for (int e = 0; e < mesh.n_elements(); ++e) {
    QuadRule rule = element_quadrature(mesh, e, order);
    Eigen::MatrixXd phi = space_u_->values(e, rule.points);
    Eigen::MatrixXd psi = space_q_->values(e, rule.points);
    const int offu = space_u_->offset(e);
    const int offq = space_q_->offset(e);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Eigen::VectorXd f = volume_f_(rule.points[q], t);
      for (int c = 0; c < d; ++c)
        for (int i = 0; i < lu; ++i)
          F[offu + c * lu + i] += rule.weights[q] * f[c] * phi(i, q);
      for (int j = 0; j < J; ++j) {
        double g = volume_g_(j, rule.points[q], t);
        if (g == 0.0) continue;
        for (int i = 0; i < lq; ++i)
          G[j * np + offq + i] += rule.weights[q] * g * psi(i, q);
      }
    }
  }

  // boundary faces: Neumann data and Dirichlet lifts
  for (const auto& face : mesh.faces) {
    if (face.interior()) continue;
    QuadRule rule = face_quadrature(mesh, face, order);
    const int e = face.elem_plus;
    Eigen::MatrixXd phi = space_u_->values(e, rule.points);
    auto gphi = space_u_->gradients(e, rule.points);
    Eigen::MatrixXd psi = space_q_->values(e, rule.points);
    auto gpsi = space_q_->gradients(e, rule.points);
    const int offu = space_u_->offset(e);
    const int offq = space_q_->offset(e);
    const Vec n = face.normal;

    if (face.disp_kind == FaceKind::Neumann) {
      for (size_t q = 0; q < rule.points.size(); ++q) {
        Eigen::VectorXd h = boundary_.traction(rule.points[q], t);
        for (int c = 0; c < d; ++c)
          for (int i = 0; i < lu; ++i)
            F[offu + c * lu + i] += rule.weights[q] * h[c] * phi(i, q);
      }
    } else if (face.disp_kind == FaceKind::Dirichlet) {
      const double eta = penalty_eta(face, mesh, params_, pc_, space_u_->degree());
      for (size_t q = 0; q < rule.points.size(); ++q) {
        Eigen::VectorXd gD = boundary_.u_dirichlet(rule.points[q], t);
        if (gD.isZero(0.0)) continue;
        // G_D = sym(gD (x) n); lift: eta G_D : [[[v]]] - G_D : sigma(v)
        for (int c = 0; c < d; ++c)
          for (int i = 0; i < lu; ++i) {
            const int k = offu + c * lu + i;
            double pv = phi(i, q);
            // G_D : sym(pv e_c (x) n) = pv/2 (gD[c] n.n + (gD.n) n[c]) ... expand directly
            double gdotn = gD.head(d).dot(n.head(d).eval());
            double jterm = 0.5 * (gD[c] * pv + gdotn * pv * n[c]); // G_D : J_v
            // sigma(v) : G_D = 2 mu eps(v):G_D + lam div(v) tr(G_D),
            // with eps(phi e_c):G_D = sum_a G_{ca} d_a phi by symmetry
            double div = gphi[c](i, q);
            double epsG = 0.0;
            for (int a = 0; a < d; ++a) {
              double G_ca = 0.5 * (gD[c] * n[a] + gD[a] * n[c]);
              epsG += G_ca * gphi[a](i, q);
            }
            double trG = gdotn;
            double sigG = 2.0 * mu * epsG + lam * div * trG;
            F[k] += rule.weights[q] * (eta * jterm - sigG);
          }
      }
    }

    for (int j = 0; j < J; ++j) {
      const auto& net = params_.networks[j];
      const Eigen::MatrixXd K = net.permeability.topLeftCorner(d, d) / net.viscosity;
      if (face.pressure_kind[j] == FaceKind::Neumann) {
        for (size_t q = 0; q < rule.points.size(); ++q) {
          double h = boundary_.flux(j, rule.points[q], t);
          if (h == 0.0) continue;
          for (int i = 0; i < lq; ++i)
            G[j * np + offq + i] += rule.weights[q] * h * psi(i, q);
        }
      } else if (face.pressure_kind[j] == FaceKind::Dirichlet) {
        const double zeta = penalty_zeta(face, mesh, j, params_, pc_, space_q_->degree());
        const double alpha = net.alpha;
        for (size_t q = 0; q < rule.points.size(); ++q) {
          double pD = boundary_.p_dirichlet(j, rule.points[q], t);
          Eigen::VectorXd udotD = boundary_.u_dirichlet_t(rule.points[q], t);
          double udotn = udotD.head(d).dot(n.head(d).eval());
          for (int i = 0; i < lq; ++i) {
            const int k = j * np + offq + i;
            double lift = 0.0;
            if (pD != 0.0) {
              Vec g = Vec::Zero();
              for (int a = 0; a < d; ++a) g[a] = gpsi[a](i, q);
              double kflux = 0.0;
              for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) kflux += n[a] * K(a, b) * g[b];
              lift += zeta * pD * psi(i, q) - pD * kflux;
            }
            // coupling lift from the B-form boundary term with known u_dot
            lift -= alpha * psi(i, q) * udotn;
            G[k] += rule.weights[q] * lift;
          }
        }
      }
    }
  }
}

void dump_matrix(const SpMat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_matrix: cannot open " + path);
  out.precision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

} // namespace mpetdg
