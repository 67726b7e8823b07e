#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ifem/coefficients.hpp"
#include "ifem/errors.hpp"

using namespace ifem;

TEST_CASE("face coefficient example") {
  const auto fc = FaceCoefficient::interior_face(1.0, 3.0);
  CHECK(fc.arithmetic == 2.0);
  CHECK(fc.harmonic == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(fc.w_minus == 0.75);
  CHECK(fc.w_plus == 0.25);
  CHECK(weighted_average(fc, 2.0, 6.0) == doctest::Approx(0.75 * 2.0 + 0.25 * 6.0));
  CHECK(dual_weighted_average(fc, 2.0, 6.0) == doctest::Approx(0.25 * 2.0 + 0.75 * 6.0));
  CHECK(jump(fc, 2.0, 6.0) == -4.0);
  // weighted flux of alpha grad u: alpha^- w^- = alpha^+ w^+ = harmonic / 2
  CHECK(fc.alpha_minus * fc.w_minus == doctest::Approx(fc.harmonic / 2));
  CHECK(fc.alpha_plus * fc.w_plus == doctest::Approx(fc.harmonic / 2));
}

TEST_CASE("equal coefficients") {
  const auto fc = FaceCoefficient::interior_face(1.0, 1.0);
  CHECK(fc.harmonic == 1.0);
  CHECK(fc.w_minus == 0.5);
  CHECK(fc.weight_bound_value(true) == doctest::Approx(0.5));
  CHECK(fc.weight_bound_value(false) == doctest::Approx(0.5));
  CHECK(weight_bound_check(fc));
}

TEST_CASE("boundary faces") {
  const auto fc = FaceCoefficient::boundary_face(7.0);
  CHECK_FALSE(fc.interior);
  CHECK(fc.harmonic == 7.0);
  CHECK(fc.arithmetic == 7.0);
  CHECK(fc.w_minus == 1.0);
  CHECK(fc.w_plus == 0.0);
  CHECK(fc.weight_bound_value(true) == doctest::Approx(1.0));
  CHECK(weighted_average(fc, 3.0, 100.0) == 3.0);
  CHECK(dual_weighted_average(fc, 3.0, 100.0) == 0.0);
  CHECK(jump(fc, 3.0, 100.0) == 3.0);
}

TEST_CASE("non-positive coefficients are rejected") {
  CHECK_THROWS_AS(FaceCoefficient::interior_face(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(FaceCoefficient::interior_face(1.0, -2.0), DomainError);
  CHECK_THROWS_AS(FaceCoefficient::boundary_face(0.0), DomainError);
  CHECK_THROWS_AS(CoefficientField::from_elements({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(CoefficientField::from_elements({1.0, std::nan("")}), DomainError);
  const Mesh m = build_structured_square(2, named_layout("halves", Rectangle{}, 1, 2).geometry);
  CHECK_THROWS_AS(CoefficientField::from_subdomains(m, {1.0, -1.0}), DomainError);
}

TEST_CASE("random coefficient pairs") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> exponent(-8.0, 8.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  int failures = 0;
  for (int sample = 0; sample < 100000; ++sample) {
    const double am = std::pow(10.0, exponent(rng));
    const double ap = std::pow(10.0, exponent(rng));
    const auto fc = FaceCoefficient::interior_face(am, ap);
    const double lo = std::min(am, ap);
    const double eps = 1e-14 * lo;
    bool ok = true;
    ok &= fc.harmonic >= lo - eps && fc.harmonic <= 2.0 * lo + eps;
    ok &= fc.harmonic <= fc.arithmetic * (1 + 1e-14);
    ok &= std::abs(fc.w_minus + fc.w_plus - 1.0) < 1e-14;
    ok &= fc.w_minus >= 0.0 && fc.w_plus >= 0.0;
    ok &= weight_bound_check(fc);
    // symmetric in the two sides
    const auto sw = FaceCoefficient::interior_face(ap, am);
    ok &= std::abs(sw.harmonic - fc.harmonic) <= 1e-14 * fc.harmonic;
    // [u v] = {u}_w [v] + [u] {v}^w
    const double um = value(rng), up = value(rng), vm = value(rng), vp = value(rng);
    const double lhs = jump(fc, um * vm, up * vp);
    const double rhs = weighted_average(fc, um, up) * jump(fc, vm, vp) + jump(fc, um, up) * dual_weighted_average(fc, vm, vp);
    ok &= std::abs(lhs - rhs) < 1e-14;
    failures += !ok;
  }
  CHECK(failures == 0);
}

TEST_CASE("jump identity on boundary faces") {
  const auto fc = FaceCoefficient::boundary_face(2.5);
  const double u = 0.3, v = -1.7;
  CHECK(jump(fc, u * v, 0.0) == doctest::Approx(weighted_average(fc, u, 9.0) * jump(fc, v, 9.0) +
                                                jump(fc, u, 9.0) * dual_weighted_average(fc, v, 9.0)));
}

TEST_CASE("coefficient fields") {
  const auto layout = named_layout("checkerboard4", Rectangle{}, 1.0, 100.0);
  CHECK(layout.values.size() == 4);
  CHECK(layout.alpha_at(Point(0.25, 0.25)) == 100.0);
  CHECK(layout.alpha_at(Point(0.75, 0.25)) == 1.0);
  CHECK(layout.alpha_at(Point(0.25, 0.75)) == 1.0);
  CHECK(layout.alpha_at(Point(0.75, 0.75)) == 100.0);
  const Mesh m = build_structured_square(4, layout.geometry);
  const auto alpha = CoefficientField::from_subdomains(m, layout.values);
  for (int k = 0; k < m.num_triangles(); ++k) {
    CHECK(alpha.element(k) == layout.alpha_at(m.centroid(k)));
  }
  const auto scaled = alpha.scaled(1e6);
  for (int k = 0; k < m.num_triangles(); ++k) {
    CHECK(scaled.element(k) == 1e6 * alpha.element(k));
  }
  CHECK_THROWS_AS(alpha.scaled(0.0), DomainError);
  CHECK_THROWS_AS(CoefficientField::from_subdomains(m, {1.0, 2.0}), std::exception);

  const auto fc = face_coefficients(m, alpha);
  CHECK(static_cast<int>(fc.size()) == m.num_faces());
  for (int f = 0; f < m.num_faces(); ++f) {
    CHECK(fc[f].interior == !m.face(f).is_boundary());
    CHECK(fc[f].alpha_minus == alpha.element(m.face(f).k_minus));
  }
}

TEST_CASE("named layouts") {
  const Rectangle unit{};
  CHECK(named_layout("uniform", unit, 2.0, 5.0).values == std::vector<double>{2.0});
  CHECK(named_layout("halves", unit, 1.0, 5.0).alpha_at(Point(0.7, 0.1)) == 5.0);
  const auto stripes = named_layout("stripes", unit, 1.0, 5.0);
  CHECK(stripes.alpha_at(Point(0.1, 0.5)) == 1.0);
  CHECK(stripes.alpha_at(Point(0.3, 0.5)) == 5.0);
  CHECK(stripes.alpha_at(Point(0.6, 0.5)) == 1.0);
  CHECK(stripes.alpha_at(Point(0.9, 0.5)) == 5.0);
  CHECK(named_layout("checkerboard8", unit, 1, 5).values.size() == 8);
  CHECK(named_layout("nonqma8", unit, 1, 5).values == named_layout("checkerboard8", unit, 1, 5).values);
  CHECK_THROWS_AS(named_layout("spiral", unit, 1, 5), ConfigError);
}

TEST_CASE("quasi-monotonicity") {
  const Rectangle unit{};
  auto check = [&](const std::string& name, double high) {
    const auto layout = named_layout(name, unit, 1.0, high);
    const Mesh m = build_structured_square(4, layout.geometry);
    return check_qma(m, CoefficientField::from_subdomains(m, layout.values));
  };
  CHECK(check("uniform", 1.0).satisfied);
  CHECK(check("halves", 1e6).satisfied);
  CHECK(check("stripes", 1e6).satisfied);
  CHECK(check("checkerboard4", 1.0).satisfied);
  const auto cb = check("checkerboard4", 10.0);
  CHECK_FALSE(cb.satisfied);
  CHECK(cb.subdomain_a >= 0);
  CHECK(cb.subdomain_b >= 0);
  CHECK(cb.vertex >= 0);
  CHECK_FALSE(check("checkerboard8", 10.0).satisfied);

  // three increasing quadrants around the centre plus one low cell: monotone paths exist
  const auto layout = named_layout("checkerboard4", unit, 1.0, 10.0);
  const Mesh m = build_structured_square(2, layout.geometry);
  std::vector<double> values{1.0, 2.0, 3.0, 4.0};
  // subdomain order may differ from quadrant order, so assign through positions
  std::vector<double> by_sub(4);
  const std::array<Point, 4> centres{Point(0.25, 0.25), Point(0.75, 0.25), Point(0.75, 0.75), Point(0.25, 0.75)};
  for (int q = 0; q < 4; ++q) {
    by_sub[layout.geometry.subdomain_at(centres[q])] = values[q];
  }
  CHECK(check_qma(m, CoefficientField::from_subdomains(m, by_sub)).satisfied);
  // diagonal maxima are not connected monotonically
  for (int q = 0; q < 4; ++q) {
    by_sub[layout.geometry.subdomain_at(centres[q])] = (q % 2 == 0) ? 5.0 : (q == 1 ? 1.0 : 2.0);
  }
  CHECK_FALSE(check_qma(m, CoefficientField::from_subdomains(m, by_sub)).satisfied);
}
