#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ifem/analysis.hpp"
#include "ifem/assembly.hpp"
#include "ifem/solvers.hpp"

using namespace ifem;

namespace {

Mesh unit_triangle() {
  const std::vector<Point> v{Point(0, 0), Point(1, 0), Point(0, 1)};
  const std::vector<Mesh::TriangleInput> t{{{0, 1, 2}, 0}};
  return Mesh::from_triangles(v, t, 1, Rectangle{});
}

CoefficientField constant(const Mesh& m, double a) {
  return CoefficientField::from_elements(std::vector<double>(m.num_triangles(), a));
}

}  // namespace

TEST_CASE("energy error of the zero function") {
  const Mesh m = build_structured_square(2, SubdomainLayout{});
  const auto uh = FeFunction(make_space(m, SpaceKind::conforming(1)));
  const VectorField grad = [](const Point&) { return Point(1.0, 0.0); };
  CHECK(energy_error(m, constant(m, 1.0), grad, uh) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(energy_error(m, constant(m, 4.0), grad, uh) == doctest::Approx(2.0).epsilon(1e-14));
  double sum = 0.0;
  for (double e : element_energy_errors(m, constant(m, 1.0), grad, uh)) {
    sum += e * e;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("flux error") {
  const Mesh m = build_structured_square(2, SubdomainLayout{});
  const auto sigma_h = FeFunction(make_space(m, SpaceKind::raviart_thomas()));
  const VectorField sigma = [](const Point&) { return Point(1.0, 0.0); };
  CHECK(flux_error(m, constant(m, 4.0), sigma, sigma_h) == doctest::Approx(0.5).epsilon(1e-14));
  // RT0 contains constants
  const auto pi = interpolate_rt0(sigma, make_space(m, SpaceKind::raviart_thomas()));
  CHECK(flux_error(m, constant(m, 4.0), sigma, pi) < 1e-14);
}

TEST_CASE("jump seminorm of a unit jump across one face") {
  // two triangles of the unit square, u_h = 1 below the diagonal and 0 above;
  // the boundary data matches u_h so only the diagonal contributes
  const Mesh m = build_structured_square(1, SubdomainLayout{});
  auto space = make_space(m, SpaceKind::discontinuous(0));
  Eigen::VectorXd c(2);
  c << (m.centroid(0).x() > m.centroid(0).y() ? 1.0 : 0.0), (m.centroid(1).x() > m.centroid(1).y() ? 1.0 : 0.0);
  const FeFunction uh(space, c);
  const auto fc = face_coefficients(m, constant(m, 1.0));
  const ScalarField data = [](const Point& p) { return p.x() > p.y() ? 1.0 : 0.0; };
  const auto err = dg_norm_error(m, constant(m, 1.0), fc, data, {}, uh);
  CHECK(err.jump_seminorm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(err.energy == 0.0);
  CHECK(err.dg == doctest::Approx(1.0).epsilon(1e-14));
  // continuous functions have no interior jump; against zero data only boundary traces count
  const auto p1 = interpolate_nodal([](const Point& p) { return p.x() + p.y(); }, make_space(m, SpaceKind::discontinuous(1)));
  const auto e1 = dg_norm_error(m, constant(m, 1.0), fc, [](const Point& p) { return p.x() + p.y(); }, {}, p1);
  CHECK(e1.jump_seminorm < 1e-14);
}

TEST_CASE("oscillation") {
  const Mesh m = unit_triangle();
  const ScalarField f = [](const Point& p) { return p.x(); };
  CHECK(std::abs(oscillation(m, constant(m, 1.0), f, 1) - 0.23570226039551584) < 1e-14);
  CHECK(std::abs(oscillation(m, constant(m, 4.0), f, 1) - 0.23570226039551584 / 2.0) < 1e-14);
  CHECK(oscillation(m, constant(m, 1.0), f, 2) < 1e-14);
  const ScalarField g = [](const Point& p) { return p.x() * p.y(); };
  CHECK(oscillation(m, constant(m, 1.0), g, 3) < 1e-14);
  CHECK(oscillation(m, constant(m, 1.0), g, 2) > 1e-3);
  CHECK_THROWS(oscillation(m, constant(m, 1.0), f, 0));
}

TEST_CASE("oscillation decays like h^{k+1} for smooth data") {
  const ScalarField f = [](const Point& p) { return std::sin(3.0 * p.x()) * std::exp(p.y()); };
  Mesh m = build_structured_square(4, SubdomainLayout{});
  double prev = oscillation(m, constant(m, 1.0), f, 1);
  for (int l = 0; l < 2; ++l) {
    m = refine_uniform(m);
    const double next = oscillation(m, constant(m, 1.0), f, 1);
    CHECK(std::log2(prev / next) == doctest::Approx(2.0).epsilon(0.05));
    prev = next;
  }
}

TEST_CASE("piecewise-constant projection") {
  const std::vector<Point> v{Point(0, 0), Point(1, 0), Point(1, 1)};
  const std::vector<Mesh::TriangleInput> t{{{0, 1, 2}, 0}};
  const Mesh m = Mesh::from_triangles(v, t, 1, Rectangle{});
  const auto q = project_l2([](const Point& p) { return p.x() * p.x(); }, make_space(m, SpaceKind::discontinuous(0)));
  CHECK(q.coefficients()[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("approximation term") {
  const Mesh m = build_structured_square(4, SubdomainLayout{});
  const ScalarField f = [](const Point& p) { return p.x() * p.y(); };
  const auto alpha = constant(m, 1.0);
  std::vector<double> rough(m.num_triangles(), 0.5);
  const auto a = app_term(m, alpha, f, rough);
  REQUIRE(a.value.has_value());
  CHECK(*a.value == doctest::Approx(oscillation(m, alpha, f, 1)).epsilon(1e-14));
  CHECK(a.unavailable_elements == 0);

  std::vector<double> mixed = rough;
  mixed[3] = 2.0;
  mixed[7] = INFINITY;
  const auto b = app_term(m, alpha, f, mixed);
  CHECK_FALSE(b.value.has_value());
  CHECK(b.unavailable_elements == 2);
  CHECK(b.oscillation_part < a.oscillation_part);
  CHECK_THROWS(app_term(m, alpha, f, std::vector<double>(3, 0.5)));
}

TEST_CASE("rate fitting") {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> e;
  for (double x : h) {
    e.push_back(3.0 * x * x);
  }
  const auto t = fit_rates(e, h);
  CHECK_FALSE(t.pairwise[0].has_value());
  for (std::size_t l = 1; l < h.size(); ++l) {
    CHECK(*t.pairwise[l] == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK(*t.least_squares == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(*t.asymptotic == doctest::Approx(2.0).epsilon(1e-12));

  // a pre-asymptotic first level does not enter the asymptotic rate
  e[0] = 10.0;
  const auto u = fit_rates(e, h);
  CHECK(*u.asymptotic == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(*u.least_squares - 2.0) > 0.1);

  const std::vector<double> two{1.0, 0.5};
  CHECK_THROWS(fit_rates(two, std::vector<double>{1.0, 0.5}));
  CHECK_THROWS(fit_rates(e, two));
  e[3] = 0.0;
  const auto z = fit_rates(e, h);
  CHECK_FALSE(z.pairwise[3].has_value());
  CHECK_FALSE(z.asymptotic.has_value());
}

TEST_CASE("singular-point quadrature agrees on smooth integrands") {
  const Mesh m = build_structured_square(4, SubdomainLayout{});
  const auto uh = FeFunction(make_space(m, SpaceKind::conforming(1)));
  const VectorField grad = [](const Point& p) { return Point(std::cos(p.x()), p.y() * p.y()); };
  const double plain = energy_error(m, constant(m, 1.0), grad, uh);
  const double split = energy_error(m, constant(m, 1.0), grad, uh, ErrorQuadrature{10, Point(0.5, 0.5)});
  CHECK(std::abs(plain - split) < 1e-13);
}

TEST_CASE("singular-point quadrature improves a singular integrand") {
  // |grad r^{1/2}|^2 = 1 / (4 r): exact integral over the unit square is known in closed form
  const Mesh m = build_structured_square(4, SubdomainLayout{});
  const auto uh = FeFunction(make_space(m, SpaceKind::conforming(1)));
  const VectorField grad = [](const Point& p) -> Point {
    const double r = p.norm();
    return r == 0.0 ? Point::Zero() : Point(0.5 * std::pow(r, -1.5) * p);
  };
  // int_0^1 int_0^1 1/(4 r) = (1/4) * 2 * asinh(1)
  const double exact = std::sqrt(0.5 * std::asinh(1.0));
  const double plain = energy_error(m, constant(m, 1.0), grad, uh);
  const double split = energy_error(m, constant(m, 1.0), grad, uh, ErrorQuadrature{10, Point(0, 0)});
  CHECK(std::abs(split - exact) < std::abs(plain - exact));
  CHECK(std::abs(split - exact) < 5e-3);
}

TEST_CASE("nested differences vanish for nested functions") {
  const Mesh coarse = build_structured_square(2, SubdomainLayout{});
  const Mesh fine = refine_uniform(refine_uniform(coarse));
  const ScalarField u = [](const Point& p) { return 2.0 * p.x() - p.y(); };
  const auto uc = interpolate_nodal(u, make_space(coarse, SpaceKind::conforming(1)));
  const auto uf = interpolate_nodal(u, make_space(fine, SpaceKind::conforming(1)));
  const auto alpha = constant(fine, 3.0);
  CHECK(nested_energy_difference(uc, uf, alpha, 2) < 1e-13);

  const auto sigma = interpolate_rt0([](const Point&) { return Point(-6.0, 3.0); }, make_space(coarse, SpaceKind::raviart_thomas()));
  CHECK(nested_flux_difference(sigma, uf, alpha, 2) < 1e-12);

  const auto quad = interpolate_nodal([](const Point& p) { return p.x() * p.x(); }, make_space(fine, SpaceKind::conforming(2)));
  CHECK(nested_energy_difference(uc, quad, alpha, 2) > 0.1);
}
