#include "ifem/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "ifem/errors.hpp"

namespace ifem {

namespace {

using std::numbers::pi;

// g(x) = x (1 - x) (x - 1/2) and its derivatives
double g0(double x) { return x * (1.0 - x) * (x - 0.5); }
double g1(double x) { return -3.0 * x * x + 3.0 * x - 0.5; }
double g2(double x) { return -6.0 * x + 3.0; }

CoefficientLayout halves(double jump) {
  return named_layout("halves", Rectangle{0.0, 1.0, 0.0, 1.0}, 1.0, jump);
}

// Sixth-order central differences.
constexpr std::array<double, 7> kSecond{2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0};  // / 180 h^2
constexpr std::array<double, 7> kFirst{-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};         // / 60 h

double fd_laplacian(const ScalarField& u, const Point& p, double h) {
  double s = 0.0;
  for (int i = 0; i < 7; ++i) {
    s += kSecond[i] * (u(p + Point((i - 3) * h, 0.0)) + u(p + Point(0.0, (i - 3) * h)));
  }
  return s / (180.0 * h * h);
}

Point fd_gradient(const ScalarField& u, const Point& p, double h) {
  Point g = Point::Zero();
  for (int i = 0; i < 7; ++i) {
    g.x() += kFirst[i] * u(p + Point((i - 3) * h, 0.0));
    g.y() += kFirst[i] * u(p + Point(0.0, (i - 3) * h));
  }
  return g / (60.0 * h);
}

struct Segment {
  Point a, b;
  Point normal;
};

// Box edges that are not on the outer boundary.
std::vector<Segment> interface_segments(const SubdomainLayout& layout) {
  const Rectangle& d = layout.domain;
  const double tol = 1e-12 * std::max(d.width(), d.height());
  std::vector<Segment> out;
  for (const auto& b : layout.boxes) {
    const Rectangle& r = b.box;
    const std::array<Segment, 4> edges{{{{r.x0, r.y0}, {r.x0, r.y1}, {1.0, 0.0}},
                                        {{r.x1, r.y0}, {r.x1, r.y1}, {1.0, 0.0}},
                                        {{r.x0, r.y0}, {r.x1, r.y0}, {0.0, 1.0}},
                                        {{r.x0, r.y1}, {r.x1, r.y1}, {0.0, 1.0}}}};
    for (const auto& e : edges) {
      const bool vertical = e.normal.x() != 0.0;
      const double c = vertical ? e.a.x() : e.a.y();
      const double lo = vertical ? d.x0 : d.y0;
      const double hi = vertical ? d.x1 : d.y1;
      if (std::abs(c - lo) > tol && std::abs(c - hi) > tol) {
        out.push_back(e);
      }
    }
  }
  return out;
}

}  // namespace

VectorField ProblemSpec::sigma_exact() const {
  if (!grad_exact) {
    return {};
  }
  return [layout = layout, grad = grad_exact](const Point& p) -> Point { return -layout.alpha_at(p) * grad(p); };
}

std::vector<double> ProblemSpec::element_regularity(const Mesh& mesh) const {
  std::vector<double> s(mesh.num_triangles(), INFINITY);
  if (!singular_point) {
    return s;
  }
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    for (int v : mesh.triangle(k).vertices) {
      if ((mesh.vertex(v) - *singular_point).norm() <= 1e-12) {
        s[k] = s_singular;
      }
    }
  }
  return s;
}

ErrorQuadrature ProblemSpec::error_quadrature() const { return ErrorQuadrature{10, singular_point}; }

ProblemSpec problem_smooth_unit() {
  ProblemSpec p;
  p.name = "smooth";
  p.layout = named_layout("uniform", Rectangle{0.0, 1.0, 0.0, 1.0}, 1.0, 1.0);
  p.u_exact = [](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); };
  p.grad_exact = [](const Point& x) {
    return Point(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()), pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
  };
  p.f = [](const Point& x) { return 2.0 * pi * pi * std::sin(pi * x.x()) * std::sin(pi * x.y()); };
  return p;
}

ProblemSpec problem_interface_1d(double jump) {
  if (!(jump > 0.0)) {
    throw DomainError(fmt::format("coefficient jump must be positive, got {}", jump));
  }
  ProblemSpec p;
  p.name = "interface1d";
  p.layout = halves(jump);
  p.s_global = jump == 1.0 ? INFINITY : 0.5;
  p.u_exact = [layout = p.layout](const Point& x) {
    return g0(x.x()) * std::sin(pi * x.y()) / layout.alpha_at(x);
  };
  p.grad_exact = [layout = p.layout](const Point& x) -> Point {
    return Point(g1(x.x()) * std::sin(pi * x.y()), pi * g0(x.x()) * std::cos(pi * x.y())) / layout.alpha_at(x);
  };
  p.f = [](const Point& x) { return (pi * pi * g0(x.x()) - g2(x.x())) * std::sin(pi * x.y()); };
  return p;
}

ProblemSpec problem_piecewise_linear(double jump) {
  if (!(jump > 0.0)) {
    throw DomainError(fmt::format("coefficient jump must be positive, got {}", jump));
  }
  ProblemSpec p;
  p.name = "piecewise_linear";
  p.layout = halves(jump);
  p.u_exact = [jump](const Point& x) { return x.x() < 0.5 ? x.x() : 0.5 + (x.x() - 0.5) / jump; };
  p.grad_exact = [layout = p.layout](const Point& x) { return Point(1.0 / layout.alpha_at(x), 0.0); };
  p.f = [](const Point&) { return 0.0; };
  p.dirichlet = p.u_exact;
  p.s_global = 0.5;
  return p;
}

KelloggParameters kellogg_parameters(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw DomainError(fmt::format("Kellogg exponent must lie in (0, 1), got {}", s));
  }
  // With rho = pi/4 the second and third matching conditions coincide and the first
  // reduces to tan((pi/2 - sigma) s) = tan(sigma s). The admissible sigma satisfy
  // max(0, pi - pi s) < -2 s sigma < min(pi, 2 pi - pi s).
  const double rho = pi / 4.0;
  const double lo = -std::min(pi, 2.0 * pi - pi * s) / (2.0 * s);
  const double hi = -std::max(0.0, pi - pi * s) / (2.0 * s);
  auto residual = [s](double sigma) { return std::tan((pi / 2.0 - sigma) * s) - std::tan(sigma * s); };
  auto ratio_of = [s, rho](double sigma) { return -std::tan(sigma * s) / std::tan(rho * s); };
  auto equations = [s, rho](double r, double sigma) {
    const double e1 = r + std::tan((pi / 2.0 - sigma) * s) / std::tan(rho * s);
    const double e2 = 1.0 / r + std::tan(rho * s) / std::tan(sigma * s);
    const double e3 = r + std::tan(sigma * s) / std::tan((pi / 2.0 - rho) * s);
    return std::max({std::abs(e1) / r, std::abs(e2) * r, std::abs(e3) / r});
  };

  constexpr int kScan = 4000;
  double a = lo + (hi - lo) * 1e-9;
  double fa = residual(a);
  for (int i = 1; i <= kScan; ++i) {
    const double b = lo + (hi - lo) * (i == kScan ? 1.0 - 1e-9 : static_cast<double>(i) / kScan);
    const double fb = residual(b);
    if (std::isfinite(fa) && std::isfinite(fb) && fa * fb <= 0.0) {
      boost::uintmax_t iterations = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          residual, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), iterations);
      const double sigma = 0.5 * (bracket.first + bracket.second);
      const double r = ratio_of(sigma);
      // a sign change across a pole of tan shows up as a large residual here
      if (r > 0.0 && std::isfinite(r)) {
        const double res = equations(r, sigma);
        if (res < 1e-10) {
          return {s, r, rho, sigma, res};
        }
      }
    }
    a = b;
    fa = fb;
  }
  throw ConstructionError(
      fmt::format("no admissible Kellogg root for s = {} in sigma interval ({}, {})", s, lo, hi));
}

ProblemSpec problem_kellogg(double s) {
  const KelloggParameters kp = kellogg_parameters(s);
  ProblemSpec p;
  p.name = "kellogg";
  const Rectangle domain{-1.0, 1.0, -1.0, 1.0};
  p.layout.geometry.domain = domain;
  // quadrants 1..4 counterclockwise from (+, +)
  p.layout.geometry.boxes = {{{0.0, 1.0, 0.0, 1.0}, 0},
                             {{-1.0, 0.0, 0.0, 1.0}, 1},
                             {{-1.0, 0.0, -1.0, 0.0}, 2},
                             {{0.0, 1.0, -1.0, 0.0}, 3}};
  p.layout.values = {kp.ratio, 1.0, kp.ratio, 1.0};
  p.s_global = s;
  p.s_singular = s;
  p.singular_point = Point(0.0, 0.0);
  p.qma_satisfied = false;
  p.f = [](const Point&) { return 0.0; };

  const double rho = kp.rho, sigma = kp.sigma;
  // mu on quadrant q: amplitude * cos((theta - shift) s)
  const std::array<double, 4> amplitude{std::cos((pi / 2.0 - sigma) * s), std::cos(rho * s), std::cos(sigma * s),
                                        std::cos((pi / 2.0 - rho) * s)};
  const std::array<double, 4> shift{pi / 2.0 - rho, pi - sigma, pi + rho, 3.0 * pi / 2.0 + sigma};
  auto polar = [geometry = p.layout.geometry](const Point& x) {
    const int q = geometry.subdomain_at(x);
    double theta = std::atan2(x.y(), x.x());
    if (theta < 0.0) {
      theta += 2.0 * pi;
    }
    if (q == 3 && theta < pi / 2.0) {
      theta += 2.0 * pi;
    }
    return std::pair{q, theta};
  };
  p.u_exact = [=](const Point& x) {
    const double r = x.norm();
    if (r == 0.0) {
      return 0.0;
    }
    const auto [q, theta] = polar(x);
    return std::pow(r, s) * amplitude[q] * std::cos((theta - shift[q]) * s);
  };
  p.grad_exact = [=](const Point& x) -> Point {
    const double r = x.norm();
    if (r == 0.0) {
      return Point::Zero();
    }
    const auto [q, theta] = polar(x);
    const double mu = amplitude[q] * std::cos((theta - shift[q]) * s);
    const double dmu = -s * amplitude[q] * std::sin((theta - shift[q]) * s);
    const double c = std::cos(theta), sn = std::sin(theta);
    const double scale = std::pow(r, s - 1.0);
    return scale * (s * mu * Point(c, sn) + dmu * Point(-sn, c));
  };
  p.dirichlet = p.u_exact;
  return p;
}

ProblemSpec problem_nonqma(const std::string& pattern, double jump) {
  if (pattern != "checkerboard4" && pattern != "checkerboard8") {
    throw ConfigError(fmt::format("unknown non-QMA pattern '{}'", pattern));
  }
  if (!(jump > 0.0)) {
    throw DomainError(fmt::format("coefficient jump must be positive, got {}", jump));
  }
  ProblemSpec p;
  p.name = "nonqma";
  p.layout = named_layout(pattern, Rectangle{0.0, 1.0, 0.0, 1.0}, 1.0, jump);
  p.f = [](const Point&) { return 1.0; };
  const Mesh probe = p.mesh(pattern == "checkerboard4" ? 2 : 4);
  p.qma_satisfied = check_qma(probe, p.coefficients(probe)).satisfied;
  p.s_global = NAN;
  return p;
}

ScalarField builtin_source(const std::string& name) {
  if (name == "one") {
    return [](const Point&) { return 1.0; };
  }
  if (name == "zero") {
    return [](const Point&) { return 0.0; };
  }
  if (name == "smooth") {
    return problem_smooth_unit().f;
  }
  throw ConfigError(fmt::format("unknown builtin source '{}'", name));
}

ProblemSpec problem_custom(CoefficientLayout layout, const std::string& source) {
  if (static_cast<int>(layout.values.size()) != layout.geometry.subdomain_count()) {
    throw ConfigError(fmt::format("custom layout has {} subdomains but {} values", layout.geometry.subdomain_count(),
                                  layout.values.size()));
  }
  for (double v : layout.values) {
    if (!(v > 0.0)) {
      throw DomainError(fmt::format("diffusion coefficient must be positive, got {}", v));
    }
  }
  ProblemSpec p;
  p.name = "custom";
  p.layout = std::move(layout);
  p.f = builtin_source(source);
  return p;
}

ProblemCheck verify_problem(const ProblemSpec& p, int samples, std::uint64_t seed, double tol) {
  if (!p.has_exact() || !p.grad_exact) {
    throw std::invalid_argument(fmt::format("problem '{}' has no exact solution to verify", p.name));
  }
  ProblemCheck out;
  auto record = [&](double residual, double scale, const std::string& what, const Point& x) {
    out.worst_residual = std::max(out.worst_residual, residual);
    out.worst_relative = std::max(out.worst_relative, residual / (1.0 + scale));
    if (residual > tol * (1.0 + scale) && out.ok) {
      out.ok = false;
      out.message = fmt::format("{} at ({:.6f}, {:.6f}): residual {:.3e}", what, x.x(), x.y(), residual);
    }
  };

  const Rectangle& d = p.domain();
  const double size = std::min(d.width(), d.height());
  const double h = 5e-3 * size;
  const double margin = 4.0 * h;
  const auto interfaces = interface_segments(p.layout.geometry);
  const double singular_exclusion = 0.25 * size;
  auto near_singular = [&](const Point& x, double radius) {
    return p.singular_point && (x - *p.singular_point).norm() < radius;
  };
  auto near_interface = [&](const Point& x) {
    for (const auto& s : interfaces) {
      const bool vertical = s.normal.x() != 0.0;
      const double dist = vertical ? std::abs(x.x() - s.a.x()) : std::abs(x.y() - s.a.y());
      const double lo = vertical ? s.a.y() : s.a.x();
      const double hi = vertical ? s.b.y() : s.b.x();
      const double along = vertical ? x.y() : x.x();
      if (dist < margin && along > lo - margin && along < hi + margin) {
        return true;
      }
    }
    return false;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(d.x0 + margin, d.x1 - margin);
  std::uniform_real_distribution<double> uy(d.y0 + margin, d.y1 - margin);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // strong form and gradient consistency inside the subdomains
  for (int n = 0, attempts = 0; n < samples && attempts < 1000 * samples; ++attempts) {
    const Point x(ux(rng), uy(rng));
    if (near_interface(x) || near_singular(x, singular_exclusion)) {
      continue;
    }
    ++n;
    // -lap u = f / alpha keeps the difference-quotient roundoff independent of alpha
    const double fx = p.f(x) / p.alpha_at(x);
    record(std::abs(-fd_laplacian(p.u_exact, x, h) - fx), std::abs(fx), "strong-form residual", x);
    const Point g = p.grad_exact(x);
    record((fd_gradient(p.u_exact, x, h) - g).norm(), g.norm(), "gradient mismatch", x);
  }

  // boundary values
  for (int n = 0; n < samples; ++n) {
    const double t = unit(rng);
    const int side = static_cast<int>(4 * unit(rng)) % 4;
    const Point x = side == 0   ? Point(d.x0 + t * d.width(), d.y0)
                    : side == 1 ? Point(d.x1, d.y0 + t * d.height())
                    : side == 2 ? Point(d.x0 + t * d.width(), d.y1)
                                : Point(d.x0, d.y0 + t * d.height());
    const double target = p.dirichlet ? p.dirichlet(x) : 0.0;
    record(std::abs(p.u_exact(x) - target), std::abs(target), "boundary value", x);
  }

  // continuity of u and of the normal flux across interfaces
  if (!interfaces.empty()) {
    const double delta = 1e-12 * size;
    for (int n = 0, attempts = 0; n < samples && attempts < 1000 * samples; ++attempts) {
      const auto& s = interfaces[static_cast<std::size_t>(unit(rng) * interfaces.size()) % interfaces.size()];
      const Point x = s.a + unit(rng) * (s.b - s.a);
      if (near_singular(x, 0.05 * size) || !d.contains(x)) {
        continue;
      }
      ++n;
      const Point xm = x - delta * s.normal, xp = x + delta * s.normal;
      const double um = p.u_exact(xm), up = p.u_exact(xp);
      record(std::abs(um - up), std::abs(um), "interface continuity", x);
      const double fm = p.alpha_at(xm) * p.grad_exact(xm).dot(s.normal);
      const double fp = p.alpha_at(xp) * p.grad_exact(xp).dot(s.normal);
      record(std::abs(fm - fp), std::abs(fm), "interface flux continuity", x);
    }
  }
  return out;
}

ProblemSpec make_problem(const ProblemRequest& request) {
  if (request.name == "smooth") {
    return problem_smooth_unit();
  }
  if (request.name == "interface1d") {
    return problem_interface_1d(request.jump);
  }
  if (request.name == "piecewise_linear") {
    return problem_piecewise_linear(request.jump);
  }
  if (request.name == "kellogg") {
    return problem_kellogg(request.s);
  }
  if (request.name == "nonqma") {
    return problem_nonqma(request.pattern, request.jump);
  }
  if (request.name == "custom") {
    if (!request.custom_layout) {
      throw ConfigError("custom problem needs a coefficient layout");
    }
    return problem_custom(*request.custom_layout, request.source);
  }
  throw ConfigError(fmt::format("unknown problem '{}'", request.name));
}

}  // namespace ifem
