#include "mpetdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace mpetdg {

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  // Newton on Legendre P_n over [-1,1], then map to [0,1]
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = 0.5 * (t + 1.0);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

namespace {

struct RefRule {
  std::vector<Vec> pts; // reference simplex coordinates
  std::vector<double> wts; // sum to reference simplex measure (1/d!)
};

// Collapsed tensor-product Gauss rule on the unit reference simplex.
RefRule reference_simplex_rule(int dim, int order) {
  if (order < 1) throw std::invalid_argument("quadrature: order must be >= 1");
  if (order > kMaxQuadOrder) throw std::invalid_argument("quadrature: order above supported maximum");
  const int n = order / 2 + 2;
  std::vector<double> x, w;
  gauss_legendre_01(n, x, w);
  RefRule r;
  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      r.pts.push_back(Vec(x[i], 0, 0));
      r.wts.push_back(w[i]);
    }
  } else if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double u = x[i], v = x[j];
        r.pts.push_back(Vec(u, v * (1.0 - u), 0));
        r.wts.push_back(w[i] * w[j] * (1.0 - u));
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double u = x[i], v = x[j], s = x[k];
          r.pts.push_back(Vec(u, v * (1.0 - u), s * (1.0 - u) * (1.0 - v)));
          r.wts.push_back(w[i] * w[j] * w[k] * (1.0 - u) * (1.0 - u) * (1.0 - v));
        }
  }
  return r;
}

double coords_measure(const std::vector<Vec>& v, int dim) {
  if (dim == 1) return (v[1] - v[0]).norm();
  if (dim == 2) {
    if (v.size() == 3) return 0.5 * (v[1] - v[0]).cross(v[2] - v[0]).norm();
  }
  Vec a = v[1] - v[0], b = v[2] - v[0], c = v[3] - v[0];
  return std::abs(a.dot(b.cross(c))) / 6.0;
}

// Maps the reference rule onto an arbitrary (possibly embedded) simplex.
void append_mapped(QuadRule& out, const RefRule& ref, const std::vector<Vec>& verts, int dim) {
  const double meas = coords_measure(verts, dim);
  double fact = 1.0;
  for (int k = 2; k <= dim; ++k) fact *= k;
  const double scale = meas * fact; // physical measure / reference measure
  for (size_t q = 0; q < ref.pts.size(); ++q) {
    Vec p = verts[0];
    for (int a = 0; a < dim; ++a) p += ref.pts[q][a] * (verts[a + 1] - verts[0]);
    out.points.push_back(p);
    out.weights.push_back(ref.wts[q] * scale);
  }
}

} // namespace

QuadRule simplex_quadrature(const std::vector<Vec>& verts, int dim, int order) {
  RefRule ref = reference_simplex_rule(dim, order);
  QuadRule out;
  append_mapped(out, ref, verts, dim);
  return out;
}

QuadRule element_quadrature(const PolyMesh& mesh, int element, int order) {
  RefRule ref = reference_simplex_rule(mesh.dim, order);
  QuadRule out;
  for (const auto& s : mesh.elements[element].sub_simplices) {
    std::vector<Vec> verts;
    for (int v : s) verts.push_back(mesh.vertices[v]);
    append_mapped(out, ref, verts, mesh.dim);
  }
  return out;
}

QuadRule face_quadrature(const PolyMesh& mesh, const Face& face, int order) {
  RefRule ref = reference_simplex_rule(mesh.dim - 1, order);
  QuadRule out;
  std::vector<Vec> verts;
  for (int v : face.vertices) verts.push_back(mesh.vertices[v]);
  append_mapped(out, ref, verts, mesh.dim - 1);
  return out;
}

} // namespace mpetdg
