#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <algorithm>
#include <numeric>
#include <sstream>

#include "ifem/coefficients.hpp"
#include "ifem/errors.hpp"
#include "ifem/mesh.hpp"

using namespace ifem;

namespace {

SubdomainLayout single() { return SubdomainLayout{}; }

void check_invariants(const Mesh& m) {
  double area = 0.0;
  for (int k = 0; k < m.num_triangles(); ++k) {
    const auto& t = m.triangle(k);
    const Point a = m.vertex(t.vertices[0]), b = m.vertex(t.vertices[1]), c = m.vertex(t.vertices[2]);
    const double signed_area = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    CHECK(signed_area > 0.0);
    CHECK(signed_area == doctest::Approx(t.area).epsilon(1e-14));
    const double longest = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    CHECK(t.diameter == longest);
    area += t.area;
  }
  CHECK(std::abs(area - m.domain().area()) < 1e-12);

  for (int f = 0; f < m.num_faces(); ++f) {
    const Face& face = m.face(f);
    CHECK(std::abs(face.normal.norm() - 1.0) < 1e-14);
    CHECK(face.length == doctest::Approx((m.vertex(face.vertices[0]) - m.vertex(face.vertices[1])).norm()));
    CHECK(face.vertices[0] < face.vertices[1]);
    if (face.is_boundary()) {
      CHECK(face.k_plus == kNoElement);
      // outward: the normal points away from the element centroid
      CHECK(face.normal.dot(m.vertex(face.vertices[0]) - m.centroid(face.k_minus)) > 0.0);
    } else {
      CHECK(face.k_minus < face.k_plus);
      CHECK(face.normal.dot(m.centroid(face.k_plus) - m.centroid(face.k_minus)) > 0.0);
    }
    if (f > 0) {
      const Face& prev = m.face(f - 1);
      CHECK(std::pair(prev.vertices[0], prev.vertices[1]) < std::pair(face.vertices[0], face.vertices[1]));
    }
  }
  for (int k = 0; k < m.num_triangles(); ++k) {
    for (int i = 0; i < 3; ++i) {
      const Face& face = m.face(m.element_faces(k)[i]);
      CHECK((face.k_minus == k || face.k_plus == k));
    }
  }
}

}  // namespace

TEST_CASE("structured mesh with one cell") {
  const Mesh m = build_structured_square(1, single());
  CHECK(m.num_triangles() == 2);
  CHECK(m.num_faces() == 5);
  int boundary = 0;
  for (const auto& f : m.faces()) {
    boundary += f.is_boundary();
  }
  CHECK(boundary == 4);
  check_invariants(m);
}

TEST_CASE("2x2 checkerboard mesh") {
  const auto layout = named_layout("checkerboard4", Rectangle{}, 1.0, 10.0);
  const Mesh m = build_structured_square(2, layout.geometry);
  CHECK(m.num_triangles() == 8);
  CHECK(m.num_faces() == 16);
  int boundary = 0;
  for (const auto& f : m.faces()) {
    boundary += f.is_boundary();
  }
  CHECK(boundary == 8);
  check_invariants(m);

  // faces on the lines x = 1/2 or y = 1/2 separate quadrants
  for (const auto& f : m.faces()) {
    if (f.is_boundary()) {
      continue;
    }
    const Point a = m.vertex(f.vertices[0]), b = m.vertex(f.vertices[1]);
    const bool on_cut = (a.x() == 0.5 && b.x() == 0.5) || (a.y() == 0.5 && b.y() == 0.5);
    if (on_cut) {
      CHECK(m.triangle(f.k_minus).subdomain != m.triangle(f.k_plus).subdomain);
    } else {
      CHECK(m.triangle(f.k_minus).subdomain == m.triangle(f.k_plus).subdomain);
    }
  }
}

TEST_CASE("misaligned layout is rejected") {
  SubdomainLayout layout;
  layout.boxes.push_back({Rectangle{0.0, 0.3, 0.0, 1.0}, 1});
  CHECK_THROWS_AS(build_structured_square(4, layout), AlignmentError);
  const auto quad = named_layout("checkerboard4", Rectangle{}, 1.0, 2.0);
  CHECK_THROWS_AS(build_structured_square(1, quad.geometry), AlignmentError);
  CHECK_NOTHROW(build_structured_square(2, quad.geometry));
  CHECK_THROWS(build_structured_square(0, single()));
}

TEST_CASE("uniform refinement") {
  const Mesh coarse = build_structured_square(1, single());
  const Mesh fine = refine_uniform(coarse);
  CHECK(fine.num_triangles() == 8);
  check_invariants(fine);
  for (int k = 0; k < fine.num_triangles(); ++k) {
    const int parent = fine.parents()[k];
    CHECK(parent == k / 4);
    CHECK(fine.triangle(k).diameter == coarse.triangle(parent).diameter / 2.0);
  }

  // same triangulation as the structured grid at twice the resolution
  Mesh m = build_structured_square(2, named_layout("checkerboard4", Rectangle{}, 1.0, 5.0).geometry);
  const double min_angle = m.min_angle();
  for (int level = 0; level < 4; ++level) {
    m = refine_uniform(m);
    check_invariants(m);
    CHECK(m.min_angle() == doctest::Approx(min_angle).epsilon(1e-14));
    CHECK(std::abs(std::accumulate(m.triangles().begin(), m.triangles().end(), 0.0,
                                   [](double s, const Triangle& t) { return s + t.area; }) -
                   1.0) < 1e-12);
  }
  CHECK(m.num_triangles() == 8 * 256);
  CHECK(m.num_faces() == build_structured_square(32, single()).num_faces());
}

TEST_CASE("subdomains are inherited under refinement") {
  const auto layout = named_layout("checkerboard4", Rectangle{}, 1.0, 5.0);
  const Mesh coarse = build_structured_square(2, layout.geometry);
  const Mesh fine = refine_uniform(refine_uniform(coarse));
  for (int k = 0; k < fine.num_triangles(); ++k) {
    CHECK(fine.triangle(k).subdomain == coarse.triangle(k >> 4).subdomain);
    CHECK(fine.triangle(k).subdomain == layout.geometry.subdomain_at(fine.centroid(k)));
  }
}

TEST_CASE("face patch") {
  const Mesh m = build_structured_square(4, single());
  // the patch contains the element itself; the corner triangle has one boundary face
  CHECK(face_patch(m, 0).size() == 3);
  // a triangle of an interior cell has three neighbors
  const int interior = 2 * (1 * 4 + 1);
  CHECK(face_patch(m, interior).size() == 4);
  for (int k = 0; k < m.num_triangles(); ++k) {
    for (int nb : face_patch(m, k)) {
      if (nb == k) {
        continue;
      }
      const auto back = face_patch(m, nb);
      CHECK(std::find(back.begin(), back.end(), k) != back.end());
    }
  }
}

TEST_CASE("mesh dump round trip") {
  const Mesh m = refine_uniform(build_structured_square(4, named_layout("stripes", Rectangle{}, 1, 2).geometry));
  std::stringstream ss;
  write_mesh(ss, m);
  const std::string text = ss.str();
  CHECK(text.find("\nt ") != std::string::npos);
  CHECK(text.find("\nf ") != std::string::npos);
  const Mesh back = read_mesh(ss);
  REQUIRE(back.num_triangles() == m.num_triangles());
  REQUIRE(back.num_faces() == m.num_faces());
  for (int f = 0; f < m.num_faces(); ++f) {
    CHECK(back.face(f).vertices == m.face(f).vertices);
    CHECK(back.face(f).k_minus == m.face(f).k_minus);
    CHECK(back.face(f).k_plus == m.face(f).k_plus);
  }
  for (int k = 0; k < m.num_triangles(); ++k) {
    CHECK(back.triangle(k).subdomain == m.triangle(k).subdomain);
  }
}
