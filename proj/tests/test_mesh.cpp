#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "mpetdg/mesh.hpp"

using namespace mpetdg;

TEST_CASE("structured unit square, one division") {
  PolyMesh m = build_unit_mesh(1, 2);
  CHECK(m.n_elements() == 2);
  int interior = 0, boundary = 0;
  for (const auto& f : m.faces) (f.interior() ? interior : boundary)++;
  CHECK(interior == 1);
  CHECK(boundary == 4);
  CHECK(m.total_measure() == doctest::Approx(1.0).epsilon(1e-12));
  m.validate();
}

TEST_CASE("unit cube mesh size at two divisions") {
  PolyMesh m = build_unit_mesh(2, 3);
  CHECK(m.max_h() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-13));
}

TEST_CASE("unit cube element count and volume at four divisions") {
  PolyMesh m = build_unit_mesh(4, 3);
  CHECK(m.n_elements() == 384);
  CHECK(m.total_measure() == doctest::Approx(1.0).epsilon(1e-12));
  double vol = 0.0;
  for (const auto& e : m.elements)
    for (const auto& s : e.sub_simplices) vol += simplex_measure(m, s, 3);
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));
  m.validate();
}

TEST_CASE("degenerate construction inputs rejected") {
  CHECK_THROWS(build_structured_mesh(Vec::Zero(), Vec::Ones(), {0, 1, 1}, 2));
  CHECK_THROWS(build_structured_mesh(Vec::Ones(), Vec::Ones(), {1, 1, 1}, 2));
  CHECK_THROWS(build_structured_mesh(Vec::Zero(), Vec::Ones(), {1, 1, 1}, 4));
}

TEST_CASE("harmonic face size") {
  PolyMesh m;
  m.dim = 2;
  m.elements.resize(2);
  m.elements[0].h = 0.5;
  m.elements[1].h = 0.5;

  Face f;
  f.elem_plus = 0;
  f.elem_minus = 1;
  CHECK(face_harmonic_h(f, m) == doctest::Approx(0.5).epsilon(1e-14));

  m.elements[0].h = 1.0;
  CHECK(face_harmonic_h(f, m) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  Face b;
  b.elem_plus = 0;
  m.elements[0].h = 0.25;
  CHECK(face_harmonic_h(b, m) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("agglomeration into a single element") {
  PolyMesh fine = build_unit_mesh(2, 2);
  PolyMesh agg = agglomerate_mesh(fine, 1, 7);
  CHECK(agg.n_elements() == 1);
  int interior = 0;
  for (const auto& f : agg.faces)
    if (f.interior()) interior++;
  CHECK(interior == 0);
  CHECK(agg.total_measure() == doctest::Approx(1.0).epsilon(1e-12));
  agg.validate();
}

TEST_CASE("two-part agglomeration of a two-triangle square") {
  PolyMesh fine = build_unit_mesh(1, 2);
  PolyMesh agg = agglomerate_mesh(fine, 2, 3);
  CHECK(agg.n_elements() == 2);
  CHECK(agg.n_faces() == fine.n_faces());
  CHECK(agg.total_measure() == doctest::Approx(fine.total_measure()).epsilon(1e-13));
  agg.validate();
}

TEST_CASE("agglomeration preserves measure and boundary") {
  PolyMesh fine = build_unit_mesh(16, 2); // 512 triangles
  PolyMesh agg = agglomerate_mesh(fine, 51, 1);
  CHECK(agg.n_elements() == 51);
  CHECK(agg.total_measure() == doctest::Approx(fine.total_measure()).epsilon(1e-12));

  auto boundary_len = [](const PolyMesh& m) {
    double s = 0.0;
    for (const auto& f : m.faces)
      if (!f.interior()) s += f.measure;
    return s;
  };
  CHECK(boundary_len(agg) == doctest::Approx(boundary_len(fine)).epsilon(1e-12));
  CHECK(agg.max_neighbor_h_ratio() <= 4.0);
  agg.validate();
}

TEST_CASE("agglomeration input errors") {
  PolyMesh fine = build_unit_mesh(2, 2);
  CHECK_THROWS(agglomerate_mesh(fine, 0, 1));
  CHECK_THROWS(agglomerate_mesh(fine, fine.n_elements() + 1, 1));
}

TEST_CASE("element surface normals close") {
  for (int dim : {2, 3}) {
    PolyMesh m = build_unit_mesh(2, dim);
    std::vector<Vec> sums(m.n_elements(), Vec::Zero());
    for (const auto& f : m.faces) {
      sums[f.elem_plus] += f.measure * f.normal;
      if (f.interior()) sums[f.elem_minus] -= f.measure * f.normal;
    }
    for (const auto& s : sums) CHECK(s.norm() < 1e-12);
  }
}

TEST_CASE("neighbor size ratio stays bounded on test meshes") {
  CHECK(build_unit_mesh(3, 2).max_neighbor_h_ratio() <= 4.0);
  CHECK(build_unit_mesh(2, 3).max_neighbor_h_ratio() <= 4.0);
}

TEST_CASE("face classification covers every boundary face") {
  PolyMesh m = build_unit_mesh(2, 3);
  m.classify_all_dirichlet(4);
  for (const auto& f : m.faces) {
    if (f.interior()) {
      CHECK(f.disp_kind == FaceKind::Interior);
    } else {
      CHECK(f.disp_kind == FaceKind::Dirichlet);
      REQUIRE(f.pressure_kind.size() == 4);
      for (auto k : f.pressure_kind) CHECK(k == FaceKind::Dirichlet);
    }
  }
}
