#include "mpetdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

namespace mpetdg {

namespace {

double simplex_measure_coords(const std::vector<Vec>& v, int dim) {
  if (dim == 2) {
    Vec a = v[1] - v[0], b = v[2] - v[0];
    return 0.5 * std::abs(a.x() * b.y() - a.y() * b.x());
  }
  Vec a = v[1] - v[0], b = v[2] - v[0], c = v[3] - v[0];
  return std::abs(a.dot(b.cross(c))) / 6.0;
}

void finalize_element(Element& e, const PolyMesh& mesh, int dim) {
  // collect unique vertex ids
  std::set<int> vs;
  for (const auto& s : e.sub_simplices) vs.insert(s.begin(), s.end());
  e.vertices.assign(vs.begin(), vs.end());

  e.bbox_min = Vec::Constant(std::numeric_limits<double>::max());
  e.bbox_max = Vec::Constant(std::numeric_limits<double>::lowest());
  if (dim == 2) { e.bbox_min.z() = 0.0; e.bbox_max.z() = 0.0; }
  for (int vid : e.vertices) {
    e.bbox_min = e.bbox_min.cwiseMin(mesh.vertices[vid]);
    e.bbox_max = e.bbox_max.cwiseMax(mesh.vertices[vid]);
  }
  e.h = 0.0;
  for (size_t i = 0; i < e.vertices.size(); ++i)
    for (size_t j = i + 1; j < e.vertices.size(); ++j)
      e.h = std::max(e.h, (mesh.vertices[e.vertices[i]] - mesh.vertices[e.vertices[j]]).norm());
  e.measure = 0.0;
  for (const auto& s : e.sub_simplices) e.measure += simplex_measure(mesh, s, dim);
}

// Outward normal of the facet of simplex `simplex` that excludes vertex
// `opposite`, pointing away from `opposite`.
Vec facet_outward_normal(const PolyMesh& mesh, const std::vector<int>& facet,
                         int opposite, int dim) {
  Vec n;
  if (dim == 2) {
    Vec t = mesh.vertices[facet[1]] - mesh.vertices[facet[0]];
    n = Vec(t.y(), -t.x(), 0.0);
  } else {
    Vec a = mesh.vertices[facet[1]] - mesh.vertices[facet[0]];
    Vec b = mesh.vertices[facet[2]] - mesh.vertices[facet[0]];
    n = a.cross(b);
  }
  n.normalize();
  Vec to_opp = mesh.vertices[opposite] - mesh.vertices[facet[0]];
  if (n.dot(to_opp) > 0) n = -n;
  return n;
}

double facet_measure(const PolyMesh& mesh, const std::vector<int>& facet, int dim) {
  if (dim == 2) return (mesh.vertices[facet[1]] - mesh.vertices[facet[0]]).norm();
  Vec a = mesh.vertices[facet[1]] - mesh.vertices[facet[0]];
  Vec b = mesh.vertices[facet[2]] - mesh.vertices[facet[0]];
  return 0.5 * a.cross(b).norm();
}

struct FacetRecord {
  std::vector<int> facet; // unsorted, as taken from the first simplex
  int elem = -1;          // owning polytopic element
  int opposite = -1;      // opposite vertex in the owning sub-simplex
  int count = 0;
  int other_elem = -1;
};

// Build faces from sub-simplex facets: a facet shared by sub-simplices of two
// different elements is an interior face; a facet seen once is a boundary face.
// Facets shared within one element are internal to the agglomerate and dropped.
void build_faces(PolyMesh& mesh, const std::vector<int>& simplex_owner,
                 const std::vector<std::vector<int>>& all_simplices) {
  const int dim = mesh.dim;
  std::map<std::vector<int>, FacetRecord> table;
  for (size_t si = 0; si < all_simplices.size(); ++si) {
    const auto& s = all_simplices[si];
    for (int skip = 0; skip < dim + 1; ++skip) {
      std::vector<int> facet;
      for (int k = 0; k < dim + 1; ++k)
        if (k != skip) facet.push_back(s[k]);
      std::vector<int> key = facet;
      std::sort(key.begin(), key.end());
      auto& rec = table[key];
      rec.count++;
      if (rec.count == 1) {
        rec.facet = facet;
        rec.elem = simplex_owner[si];
        rec.opposite = s[skip];
      } else {
        rec.other_elem = simplex_owner[si];
      }
    }
  }
  mesh.faces.clear();
  for (auto& [key, rec] : table) {
    if (rec.count > 2) throw std::runtime_error("mesh: non-manifold facet");
    if (rec.count == 2 && rec.elem == rec.other_elem) continue; // internal
    Face f;
    f.vertices = rec.facet;
    f.elem_plus = rec.elem;
    f.elem_minus = (rec.count == 2) ? rec.other_elem : -1;
    f.normal = facet_outward_normal(mesh, rec.facet, rec.opposite, dim);
    f.measure = facet_measure(mesh, rec.facet, dim);
    mesh.faces.push_back(std::move(f));
  }
}

} // namespace

double simplex_measure(const PolyMesh& mesh, const std::vector<int>& simplex, int dim) {
  std::vector<Vec> coords;
  coords.reserve(simplex.size());
  for (int v : simplex) coords.push_back(mesh.vertices[v]);
  return simplex_measure_coords(coords, dim);
}

double PolyMesh::max_h() const {
  double h = 0.0;
  for (const auto& e : elements) h = std::max(h, e.h);
  return h;
}

double PolyMesh::total_measure() const {
  double m = 0.0;
  for (const auto& e : elements) m += e.measure;
  return m;
}

double PolyMesh::domain_measure_from_simplices() const {
  double m = 0.0;
  for (const auto& e : elements)
    for (const auto& s : e.sub_simplices) m += simplex_measure(*this, s, dim);
  return m;
}

double PolyMesh::max_neighbor_h_ratio() const {
  double r = 1.0;
  for (const auto& f : faces) {
    if (!f.interior()) continue;
    double hp = elements[f.elem_plus].h, hm = elements[f.elem_minus].h;
    r = std::max(r, std::max(hp / hm, hm / hp));
  }
  return r;
}

void PolyMesh::classify_all_dirichlet(int n_networks) {
  for (auto& f : faces) {
    if (f.interior()) {
      f.disp_kind = FaceKind::Interior;
      f.pressure_kind.assign(n_networks, FaceKind::Interior);
    } else {
      f.disp_kind = FaceKind::Dirichlet;
      f.pressure_kind.assign(n_networks, FaceKind::Dirichlet);
    }
  }
}

void PolyMesh::validate() const {
  for (const auto& e : elements) {
    if (!(e.measure > 0.0)) throw std::runtime_error("mesh: element with non-positive measure");
    double sum = 0.0;
    for (const auto& s : e.sub_simplices) sum += simplex_measure(*this, s, dim);
    if (std::abs(sum - e.measure) > 1e-12 * std::max(1.0, e.measure))
      throw std::runtime_error("mesh: sub-simplices do not partition element");
  }
  for (const auto& f : faces) {
    if (std::abs(f.normal.norm() - 1.0) > 1e-14)
      throw std::runtime_error("mesh: non-unit face normal");
    if (f.elem_plus < 0) throw std::runtime_error("mesh: face without owner");
  }
  // closed-surface check: per element the measure-weighted outward normals sum
  // to zero
  std::vector<Vec> sums(elements.size(), Vec::Zero());
  for (const auto& f : faces) {
    sums[f.elem_plus] += f.measure * f.normal;
    if (f.interior()) sums[f.elem_minus] -= f.measure * f.normal;
  }
  for (size_t i = 0; i < sums.size(); ++i)
    if (sums[i].norm() > 1e-12 * std::max(1.0, elements[i].measure))
      throw std::runtime_error("mesh: element surface normals do not close");
}

PolyMesh build_structured_mesh(const Vec& box_min, const Vec& box_max,
                               const std::array<int, 3>& divisions, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("mesh: dim must be 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (divisions[a] < 1) throw std::invalid_argument("mesh: divisions must be >= 1");
    if (!(box_max[a] > box_min[a])) throw std::invalid_argument("mesh: degenerate box");
  }
  PolyMesh mesh;
  mesh.dim = dim;
  const int nx = divisions[0], ny = divisions[1], nz = (dim == 3) ? divisions[2] : 1;

  auto vid = [&](int i, int j, int k) {
    return (k * (ny + 1) + j) * (nx + 1) + i;
  };
  for (int k = 0; k <= ((dim == 3) ? nz : 0); ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        Vec v(box_min.x() + (box_max.x() - box_min.x()) * i / nx,
              box_min.y() + (box_max.y() - box_min.y()) * j / ny, 0.0);
        if (dim == 3) v.z() = box_min.z() + (box_max.z() - box_min.z()) * k / nz;
        mesh.vertices.push_back(v);
      }

  std::vector<std::vector<int>> simplices;
  if (dim == 2) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        int a = vid(i, j, 0), b = vid(i + 1, j, 0), c = vid(i + 1, j + 1, 0), d = vid(i, j + 1, 0);
        simplices.push_back({a, b, c});
        simplices.push_back({a, c, d});
      }
  } else {
    // Kuhn subdivision: six tets per cell along vertex paths of the unit cube,
    // conforming across cells.
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          int base[3] = {i, j, k};
          for (const auto& p : perms) {
            std::vector<int> tet;
            int c[3] = {base[0], base[1], base[2]};
            tet.push_back(vid(c[0], c[1], c[2]));
            for (int step = 0; step < 3; ++step) {
              c[p[step]] += 1;
              tet.push_back(vid(c[0], c[1], c[2]));
            }
            simplices.push_back(tet);
          }
        }
  }

  mesh.elements.resize(simplices.size());
  std::vector<int> owner(simplices.size());
  for (size_t s = 0; s < simplices.size(); ++s) {
    mesh.elements[s].sub_simplices = {simplices[s]};
    owner[s] = static_cast<int>(s);
  }
  for (auto& e : mesh.elements) finalize_element(e, mesh, dim);
  build_faces(mesh, owner, simplices);
  return mesh;
}

PolyMesh build_unit_mesh(int divisions, int dim) {
  return build_structured_mesh(Vec::Zero(), Vec::Ones(), {divisions, divisions, divisions}, dim);
}

PolyMesh agglomerate_mesh(const PolyMesh& mesh, int n_parts, unsigned seed) {
  if (n_parts < 1) throw std::invalid_argument("agglomerate: n_parts must be >= 1");
  for (const auto& e : mesh.elements)
    if (e.sub_simplices.size() != 1)
      throw std::invalid_argument("agglomerate: input mesh must be simplicial");
  const int n = mesh.n_elements();
  if (n_parts > n) throw std::invalid_argument("agglomerate: n_parts exceeds element count");

  // adjacency over interior faces
  std::vector<std::vector<int>> adj(n);
  for (const auto& f : mesh.faces) {
    if (!f.interior()) continue;
    adj[f.elem_plus].push_back(f.elem_minus);
    adj[f.elem_minus].push_back(f.elem_plus);
  }

  std::vector<int> part(n, -1);
  std::mt19937 rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::queue<int>> frontier(n_parts);
  std::vector<int> count(n_parts, 0);
  for (int p = 0; p < n_parts; ++p) {
    part[order[p]] = p;
    count[p] = 1;
    for (int nb : adj[order[p]]) frontier[p].push(nb);
  }
  int assigned = n_parts;
  while (assigned < n) {
    // grow the smallest part that still has a reachable unassigned neighbor
    int best = -1;
    for (int p = 0; p < n_parts; ++p) {
      while (!frontier[p].empty() && part[frontier[p].front()] >= 0) frontier[p].pop();
      if (frontier[p].empty()) continue;
      if (best < 0 || count[p] < count[best]) best = p;
    }
    if (best < 0) {
      // disconnected leftover: attach to any assigned neighbor's part
      bool progressed = false;
      for (int e = 0; e < n && !progressed; ++e) {
        if (part[e] >= 0) continue;
        for (int nb : adj[e]) {
          if (part[nb] >= 0) {
            part[e] = part[nb];
            count[part[nb]]++;
            for (int nn : adj[e]) if (part[nn] < 0) frontier[part[e]].push(nn);
            progressed = true;
            assigned++;
            break;
          }
        }
      }
      if (!progressed) throw std::runtime_error("agglomerate: mesh is disconnected");
      continue;
    }
    int e = frontier[best].front();
    frontier[best].pop();
    part[e] = best;
    count[best]++;
    assigned++;
    for (int nb : adj[e]) if (part[nb] < 0) frontier[best].push(nb);
  }
  for (int p = 0; p < n_parts; ++p)
    if (count[p] == 0) throw std::runtime_error("agglomerate: empty part");

  // verify face-connectivity of each part
  {
    std::vector<char> seen(n, 0);
    for (int p = 0; p < n_parts; ++p) {
      int start = -1;
      for (int e = 0; e < n; ++e) if (part[e] == p) { start = e; break; }
      std::queue<int> q;
      q.push(start);
      seen[start] = 1;
      int reached = 0;
      while (!q.empty()) {
        int e = q.front(); q.pop();
        reached++;
        for (int nb : adj[e])
          if (part[nb] == p && !seen[nb]) { seen[nb] = 1; q.push(nb); }
      }
      if (reached != count[p]) throw std::runtime_error("agglomerate: part not face-connected");
    }
  }

  PolyMesh out;
  out.dim = mesh.dim;
  out.vertices = mesh.vertices;
  out.elements.resize(n_parts);
  std::vector<std::vector<int>> all_simplices;
  std::vector<int> owner;
  for (int e = 0; e < n; ++e) {
    out.elements[part[e]].sub_simplices.push_back(mesh.elements[e].sub_simplices[0]);
    all_simplices.push_back(mesh.elements[e].sub_simplices[0]);
    owner.push_back(part[e]);
  }
  for (auto& e : out.elements) finalize_element(e, out, out.dim);
  build_faces(out, owner, all_simplices);
  return out;
}

void finalize_mesh(PolyMesh& mesh) {
  std::vector<int> owner;
  std::vector<std::vector<int>> simplices;
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (const auto& s : mesh.elements[e].sub_simplices) {
      owner.push_back(e);
      simplices.push_back(s);
    }
  for (auto& e : mesh.elements) finalize_element(e, mesh, mesh.dim);
  build_faces(mesh, owner, simplices);
}

double face_harmonic_h(const Face& face, const PolyMesh& mesh) {
  double hp = mesh.elements[face.elem_plus].h;
  if (!face.interior()) return hp;
  double hm = mesh.elements[face.elem_minus].h;
  return 2.0 * hp * hm / (hp + hm);
}

} // namespace mpetdg
