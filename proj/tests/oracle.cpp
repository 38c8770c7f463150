#include "oracle.hpp"

#include <cmath>

using namespace mpetdg;

namespace oracle {

namespace {

// Legendre nodes on [0,1] through the Jacobi-matrix eigenproblem.
void gauss_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
    double v0 = es.eigenvectors()(0, i);
    w[i] = v0 * v0; // 2 v0^2 on [-1,1], halved by the interval map
  }
}

double tri_area(const Vec& a, const Vec& b, const Vec& c) {
  return 0.5 * ((b - a).cross(c - a)).norm();
}

double tet_vol(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  return std::abs((b - a).dot((c - a).cross(d - a))) / 6.0;
}

} // namespace

Rule gauss01(int n) {
  std::vector<double> x, w;
  gauss_nodes(n, x, w);
  Rule r;
  for (int i = 0; i < n; ++i) {
    Vec p = Vec::Zero();
    p[0] = x[i];
    r.pts.push_back(p);
    r.w.push_back(w[i]);
  }
  return r;
}

Rule simplex_rule(const std::vector<Vec>& verts, int dim, int n1d) {
  std::vector<double> x, w;
  gauss_nodes(n1d, x, w);
  Rule r;
  if (dim == 1) {
    double len = (verts[1] - verts[0]).norm();
    for (int i = 0; i < n1d; ++i) {
      r.pts.push_back(verts[0] + x[i] * (verts[1] - verts[0]));
      r.w.push_back(w[i] * len);
    }
  } else if (dim == 2) {
    double scale = 2.0 * tri_area(verts[0], verts[1], verts[2]);
    Vec e1 = verts[1] - verts[0], e2 = verts[2] - verts[0];
    for (int i = 0; i < n1d; ++i)
      for (int j = 0; j < n1d; ++j) {
        double s = x[i], t = x[j];
        double xi = s * (1.0 - t), et = t;
        r.pts.push_back(verts[0] + xi * e1 + et * e2);
        r.w.push_back(w[i] * w[j] * (1.0 - t) * scale);
      }
  } else {
    double scale = 6.0 * tet_vol(verts[0], verts[1], verts[2], verts[3]);
    Vec e1 = verts[1] - verts[0], e2 = verts[2] - verts[0], e3 = verts[3] - verts[0];
    for (int i = 0; i < n1d; ++i)
      for (int j = 0; j < n1d; ++j)
        for (int k = 0; k < n1d; ++k) {
          double a = x[i], b = x[j], c = x[k];
          double zz = c, yy = b * (1.0 - c), xx = a * (1.0 - b) * (1.0 - c);
          double jac = (1.0 - b) * (1.0 - c) * (1.0 - c);
          r.pts.push_back(verts[0] + xx * e1 + yy * e2 + zz * e3);
          r.w.push_back(w[i] * w[j] * w[k] * jac * scale);
        }
  }
  return r;
}

double integrate(const Rule& r, const std::function<double(const Vec&)>& f) {
  double s = 0.0;
  for (size_t i = 0; i < r.pts.size(); ++i) s += r.w[i] * f(r.pts[i]);
  return s;
}

namespace {

Rule element_rule(const PolyMesh& mesh, int e, int n1d) {
  Rule out;
  for (const auto& s : mesh.elements[e].sub_simplices) {
    std::vector<Vec> verts;
    for (int v : s) verts.push_back(mesh.vertices[v]);
    Rule r = simplex_rule(verts, mesh.dim, n1d);
    out.pts.insert(out.pts.end(), r.pts.begin(), r.pts.end());
    out.w.insert(out.w.end(), r.w.begin(), r.w.end());
  }
  return out;
}

Rule face_rule(const PolyMesh& mesh, const Face& face, int n1d) {
  std::vector<Vec> verts;
  for (int v : face.vertices) verts.push_back(mesh.vertices[v]);
  return simplex_rule(verts, mesh.dim - 1, n1d);
}

double harmonic_h(const PolyMesh& mesh, const Face& f) {
  if (!f.interior()) return mesh.elements[f.elem_plus].h;
  double a = mesh.elements[f.elem_plus].h, b = mesh.elements[f.elem_minus].h;
  return 2.0 * a * b / (a + b);
}

// strain of basis function (mode i of component c) from production basis
// gradients; written directly from the symmetric-gradient definition
Eigen::MatrixXd basis_strain(const std::vector<Eigen::MatrixXd>& grads, int c, int i, int q,
                             int d) {
  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    eps(c, a) += 0.5 * grads[a](i, q);
    eps(a, c) += 0.5 * grads[a](i, q);
  }
  return eps;
}

Eigen::MatrixXd stress_of(const Eigen::MatrixXd& eps, double mu, double lam) {
  return 2.0 * mu * eps +
         lam * eps.trace() * Eigen::MatrixXd::Identity(eps.rows(), eps.cols());
}

} // namespace

Eigen::MatrixXd mass(const DgSpace& space, double weight) {
  const auto& mesh = space.mesh();
  const int n1d = space.degree() + 3;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(space.n_dofs(), space.n_dofs());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    Rule r = element_rule(mesh, e, n1d);
    Eigen::MatrixXd phi = space.values(e, r.pts);
    for (int c = 0; c < space.n_components(); ++c)
      for (int i = 0; i < space.local_dim(); ++i)
        for (int j = 0; j < space.local_dim(); ++j) {
          double s = 0.0;
          for (size_t q = 0; q < r.pts.size(); ++q) s += r.w[q] * phi(i, q) * phi(j, q);
          M(space.offset(e) + c * space.local_dim() + i,
            space.offset(e) + c * space.local_dim() + j) = weight * s;
        }
  }
  return M;
}

Eigen::MatrixXd elastic(const DgSpace& space_u, const MpetParameters& params,
                        const PenaltyConfig& pc) {
  const auto& mesh = space_u.mesh();
  const int d = mesh.dim;
  const int ld = space_u.local_dim();
  const int n1d = space_u.degree() + 3;
  const double mu = params.mu, lam = params.lambda;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(space_u.n_dofs(), space_u.n_dofs());

  for (int e = 0; e < mesh.n_elements(); ++e) {
    Rule r = element_rule(mesh, e, n1d);
    auto grads = space_u.gradients(e, r.pts);
    for (size_t q = 0; q < r.pts.size(); ++q)
      for (int ca = 0; ca < d; ++ca)
        for (int ia = 0; ia < ld; ++ia) {
          Eigen::MatrixXd ea = basis_strain(grads, ca, ia, q, d);
          for (int cb = 0; cb < d; ++cb)
            for (int ib = 0; ib < ld; ++ib) {
              Eigen::MatrixXd eb = basis_strain(grads, cb, ib, q, d);
              double val = (stress_of(eb, mu, lam).array() * ea.array()).sum();
              K(space_u.offset(e) + ca * ld + ia, space_u.offset(e) + cb * ld + ib) +=
                  r.w[q] * val;
            }
        }
  }

  double ce = std::max(2.0 * mu, d * lam + 2.0 * mu);
  for (const auto& face : mesh.faces) {
    if (!face.interior() && face.disp_kind != FaceKind::Dirichlet) continue;
    double eta = pc.eta0 * ce * space_u.degree() * space_u.degree() / harmonic_h(mesh, face);
    Rule r = face_rule(mesh, face, n1d);
    std::vector<int> elems{face.elem_plus};
    if (face.interior()) elems.push_back(face.elem_minus);
    double avg = face.interior() ? 0.5 : 1.0;
    std::vector<std::vector<Eigen::MatrixXd>> grads;
    std::vector<Eigen::MatrixXd> vals;
    for (int el : elems) {
      grads.push_back(space_u.gradients(el, r.pts));
      vals.push_back(space_u.values(el, r.pts));
    }
    const int ns = static_cast<int>(elems.size());
    for (size_t q = 0; q < r.pts.size(); ++q)
      for (int sa = 0; sa < ns; ++sa)
        for (int ca = 0; ca < d; ++ca)
          for (int ia = 0; ia < ld; ++ia) {
            Vec na = (sa == 0 ? 1.0 : -1.0) * face.normal;
            Eigen::MatrixXd Ja = Eigen::MatrixXd::Zero(d, d);
            for (int rr = 0; rr < d; ++rr)
              for (int ss = 0; ss < d; ++ss) {
                if (rr == ca) Ja(rr, ss) += 0.5 * vals[sa](ia, q) * na[ss];
                if (ss == ca) Ja(rr, ss) += 0.5 * na[rr] * vals[sa](ia, q);
              }
            Eigen::MatrixXd Sa =
                avg * stress_of(basis_strain(grads[sa], ca, ia, q, d), mu, lam);
            for (int sb = 0; sb < ns; ++sb)
              for (int cb = 0; cb < d; ++cb)
                for (int ib = 0; ib < ld; ++ib) {
                  Vec nb = (sb == 0 ? 1.0 : -1.0) * face.normal;
                  Eigen::MatrixXd Jb = Eigen::MatrixXd::Zero(d, d);
                  for (int rr = 0; rr < d; ++rr)
                    for (int ss = 0; ss < d; ++ss) {
                      if (rr == cb) Jb(rr, ss) += 0.5 * vals[sb](ib, q) * nb[ss];
                      if (ss == cb) Jb(rr, ss) += 0.5 * nb[rr] * vals[sb](ib, q);
                    }
                  Eigen::MatrixXd Sb =
                      avg * stress_of(basis_strain(grads[sb], cb, ib, q, d), mu, lam);
                  double val = eta * (Ja.array() * Jb.array()).sum() -
                               (Sb.array() * Ja.array()).sum() -
                               (Sa.array() * Jb.array()).sum();
                  K(space_u.offset(elems[sa]) + ca * ld + ia,
                    space_u.offset(elems[sb]) + cb * ld + ib) += r.w[q] * val;
                }
          }
  }
  return K;
}

Eigen::MatrixXd pressure(const DgSpace& space_q, int network, const MpetParameters& params,
                         const PenaltyConfig& pc) {
  const auto& mesh = space_q.mesh();
  const int d = mesh.dim;
  const int ld = space_q.local_dim();
  const int n1d = space_q.degree() + 3;
  const auto& net = params.networks[network];
  Eigen::MatrixXd Kt = net.permeability.topLeftCorner(d, d) / net.viscosity;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(space_q.n_dofs(), space_q.n_dofs());

  for (int e = 0; e < mesh.n_elements(); ++e) {
    Rule r = element_rule(mesh, e, n1d);
    auto grads = space_q.gradients(e, r.pts);
    for (size_t q = 0; q < r.pts.size(); ++q)
      for (int i = 0; i < ld; ++i)
        for (int j = 0; j < ld; ++j) {
          Eigen::VectorXd gi(d), gj(d);
          for (int a = 0; a < d; ++a) {
            gi[a] = grads[a](i, q);
            gj[a] = grads[a](j, q);
          }
          A(space_q.offset(e) + i, space_q.offset(e) + j) += r.w[q] * gi.dot(Kt * gj);
        }
  }

  double kj = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                  Eigen::MatrixXd(net.permeability.topLeftCorner(d, d)))
                  .eigenvalues()
                  .maxCoeff();
  double z = std::max(pc.z_for(network), 10.0 / std::sqrt(net.viscosity));
  for (const auto& face : mesh.faces) {
    if (!face.interior() && face.pressure_kind[network] != FaceKind::Dirichlet) continue;
    double zeta = z * (kj / std::sqrt(net.viscosity)) * space_q.degree() * space_q.degree() /
                  harmonic_h(mesh, face);
    Rule r = face_rule(mesh, face, n1d);
    std::vector<int> elems{face.elem_plus};
    if (face.interior()) elems.push_back(face.elem_minus);
    double avg = face.interior() ? 0.5 : 1.0;
    const int ns = static_cast<int>(elems.size());
    std::vector<Eigen::MatrixXd> vals;
    std::vector<std::vector<Eigen::MatrixXd>> grads;
    for (int el : elems) {
      vals.push_back(space_q.values(el, r.pts));
      grads.push_back(space_q.gradients(el, r.pts));
    }
    for (size_t q = 0; q < r.pts.size(); ++q)
      for (int sa = 0; sa < ns; ++sa)
        for (int ia = 0; ia < ld; ++ia) {
          double siga = (sa == 0) ? 1.0 : -1.0;
          Eigen::VectorXd ga(d);
          for (int a = 0; a < d; ++a) ga[a] = grads[sa][a](ia, q);
          double fluxa = avg * face.normal.head(d).dot((Kt * ga).eval());
          for (int sb = 0; sb < ns; ++sb)
            for (int ib = 0; ib < ld; ++ib) {
              double sigb = (sb == 0) ? 1.0 : -1.0;
              Eigen::VectorXd gb(d);
              for (int a = 0; a < d; ++a) gb[a] = grads[sb][a](ib, q);
              double fluxb = avg * face.normal.head(d).dot((Kt * gb).eval());
              double val = zeta * siga * vals[sa](ia, q) * sigb * vals[sb](ib, q) -
                           fluxb * siga * vals[sa](ia, q) - fluxa * sigb * vals[sb](ib, q);
              A(space_q.offset(elems[sa]) + ia, space_q.offset(elems[sb]) + ib) +=
                  r.w[q] * val;
            }
        }
  }
  return A;
}

Eigen::MatrixXd coupling_B(const DgSpace& space_q, const DgSpace& space_u, int network,
                           const MpetParameters& params) {
  const auto& mesh = space_q.mesh();
  const int d = mesh.dim;
  const int lq = space_q.local_dim();
  const int lu = space_u.local_dim();
  const int n1d = space_q.degree() + space_u.degree() + 3;
  const double alpha = params.networks[network].alpha;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(space_q.n_dofs(), space_u.n_dofs());
  if (alpha == 0.0) return B;

  for (int e = 0; e < mesh.n_elements(); ++e) {
    Rule r = element_rule(mesh, e, n1d);
    Eigen::MatrixXd psi = space_q.values(e, r.pts);
    auto gu = space_u.gradients(e, r.pts);
    for (size_t q = 0; q < r.pts.size(); ++q)
      for (int i = 0; i < lq; ++i)
        for (int c = 0; c < d; ++c)
          for (int j = 0; j < lu; ++j)
            B(space_q.offset(e) + i, space_u.offset(e) + c * lu + j) +=
                r.w[q] * alpha * psi(i, q) * gu[c](j, q);
  }

  for (const auto& face : mesh.faces) {
    if (!face.interior() && face.pressure_kind[network] != FaceKind::Dirichlet) continue;
    Rule r = face_rule(mesh, face, n1d);
    std::vector<int> elems{face.elem_plus};
    if (face.interior()) elems.push_back(face.elem_minus);
    double avg = face.interior() ? 0.5 : 1.0;
    const int ns = static_cast<int>(elems.size());
    std::vector<Eigen::MatrixXd> pv, uv;
    for (int el : elems) {
      pv.push_back(space_q.values(el, r.pts));
      uv.push_back(space_u.values(el, r.pts));
    }
    for (size_t q = 0; q < r.pts.size(); ++q)
      for (int sp = 0; sp < ns; ++sp)
        for (int i = 0; i < lq; ++i)
          for (int su = 0; su < ns; ++su) {
            Vec n = (su == 0 ? 1.0 : -1.0) * face.normal;
            for (int c = 0; c < d; ++c)
              for (int j = 0; j < lu; ++j)
                B(space_q.offset(elems[sp]) + i, space_u.offset(elems[su]) + c * lu + j) -=
                    r.w[q] * alpha * avg * pv[sp](i, q) * uv[su](j, q) * n[c];
          }
  }
  return B;
}

Eigen::MatrixXd transfer(const DgSpace& space_q, const MpetParameters& params) {
  const auto& mesh = space_q.mesh();
  const int J = params.n_networks();
  const int np = space_q.n_dofs();
  const int ld = space_q.local_dim();
  const int n1d = space_q.degree() + 3;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(J * np, J * np);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    Rule r = element_rule(mesh, e, n1d);
    Eigen::MatrixXd psi = space_q.values(e, r.pts);
    for (int i = 0; i < ld; ++i)
      for (int l = 0; l < ld; ++l) {
        double m = 0.0;
        for (size_t q = 0; q < r.pts.size(); ++q) m += r.w[q] * psi(i, q) * psi(l, q);
        for (int j = 0; j < J; ++j) {
          double diag = params.networks[j].beta_external;
          for (int k = 0; k < J; ++k) diag += params.beta(j, k);
          C(j * np + space_q.offset(e) + i, j * np + space_q.offset(e) + l) += diag * m;
          for (int k = 0; k < J; ++k)
            if (k != j)
              C(j * np + space_q.offset(e) + i, k * np + space_q.offset(e) + l) -=
                  params.beta(j, k) * m;
        }
      }
  }
  return C;
}

} // namespace oracle
