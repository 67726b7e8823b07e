#include "ifem/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "ifem/quadrature.hpp"

namespace ifem {

namespace {

bool touches(const ElementGeometry& g, const std::optional<Point>& p) {
  if (!p) {
    return false;
  }
  for (const auto& v : g.vertices) {
    if ((v - *p).norm() <= 1e-12) {
      return true;
    }
  }
  return false;
}

// Calls fn(barycentric, physical weight) for every quadrature point of element g.
template <class Fn>
void integrate(const ElementGeometry& g, const ErrorQuadrature& quad, Fn&& fn) {
  const TriangleRule& rule = triangle_rule(quad.degree);
  if (!touches(g, quad.singular_point)) {
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      fn(rule.points[q], 2.0 * g.area * rule.weights[q]);
    }
    return;
  }
  // midpoint sub-triangles in barycentric coordinates
  const Barycentric e0{1, 0, 0}, e1{0, 1, 0}, e2{0, 0, 1};
  const Barycentric m0{0, 0.5, 0.5}, m1{0.5, 0, 0.5}, m2{0.5, 0.5, 0};
  const std::array<std::array<Barycentric, 3>, 4> sub{{{e0, m2, m1}, {m2, e1, m0}, {m1, m0, e2}, {m0, m1, m2}}};
  for (const auto& s : sub) {
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& r = rule.points[q];
      Barycentric b{};
      for (int i = 0; i < 3; ++i) {
        b[i] = r[0] * s[0][i] + r[1] * s[1][i] + r[2] * s[2][i];
      }
      fn(b, 0.5 * g.area * rule.weights[q]);
    }
  }
}

// ||f - Q_p f||_K^2 with Q_p the L2 projection onto P_p(K).
double projection_defect_squared(const ElementGeometry& g, const ScalarField& f, int p) {
  const TriangleRule& rule = triangle_rule(kMaxQuadratureDegree);
  const int n = (p + 1) * (p + 2) / 2;
  auto basis = [p](const Barycentric& b, Eigen::VectorXd& out) {
    out.resize((p + 1) * (p + 2) / 2);
    int idx = 0;
    for (int total = 0; total <= p; ++total) {
      for (int j = 0; j <= total; ++j) {
        out[idx++] = std::pow(b[1], total - j) * std::pow(b[2], j);
      }
    }
  };
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd phi;
  std::vector<double> values(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double w = 2.0 * g.area * rule.weights[q];
    basis(rule.points[q], phi);
    values[q] = f(g.map(rule.points[q]));
    mass += w * phi * phi.transpose();
    load += w * values[q] * phi;
  }
  const Eigen::VectorXd c = mass.ldlt().solve(load);
  double defect = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    basis(rule.points[q], phi);
    const double d = values[q] - phi.dot(c);
    defect += 2.0 * g.area * rule.weights[q] * d * d;
  }
  return defect;
}

}  // namespace

std::vector<double> element_energy_errors(const Mesh& mesh, const CoefficientField& alpha,
                                          const VectorField& grad_exact, const FeFunction& uh,
                                          const ErrorQuadrature& quad) {
  std::vector<double> local(mesh.num_triangles(), 0.0);
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const ElementGeometry& g = uh.space().geometry(k);
    double s = 0.0;
    integrate(g, quad, [&](const Barycentric& b, double w) {
      s += w * (grad_exact(g.map(b)) - uh.gradient(k, b)).squaredNorm();
    });
    local[k] = std::sqrt(alpha.element(k) * s);
  }
  return local;
}

double energy_error(const Mesh& mesh, const CoefficientField& alpha, const VectorField& grad_exact,
                    const FeFunction& uh, const ErrorQuadrature& quad) {
  double total = 0.0;
  for (double e : element_energy_errors(mesh, alpha, grad_exact, uh, quad)) {
    total += e * e;
  }
  return std::sqrt(total);
}

double jump_seminorm(const Mesh& mesh, const FaceCoefficients& fc, const FeFunction& uh) {
  return dg_norm_error(mesh, CoefficientField::from_elements(std::vector<double>(mesh.num_triangles(), 1.0)), fc,
                       [](const Point&) { return 0.0; }, {}, uh)
      .jump_seminorm;
}

DgError dg_norm_error(const Mesh& mesh, const CoefficientField& alpha, const FaceCoefficients& fc,
                      const ScalarField& u_exact, const VectorField& grad_exact, const FeFunction& uh,
                      const ErrorQuadrature& quad) {
  DgError out;
  if (grad_exact) {
    out.energy = energy_error(mesh, alpha, grad_exact, uh, quad);
  }
  const EdgeRule& rule = edge_rule(quad.degree);
  double jumps = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Point& a = mesh.vertex(face.vertices[0]);
    const Point& b = mesh.vertex(face.vertices[1]);
    const ElementGeometry& gm = uh.space().geometry(face.k_minus);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      const Point x = (1.0 - t) * a + t * b;
      const double minus = uh.value(face.k_minus, gm.barycentric(x));
      double d = 0.0;
      if (face.is_boundary()) {
        d = u_exact(x) - minus;
      } else {
        d = minus - uh.value(face.k_plus, uh.space().geometry(face.k_plus).barycentric(x));
      }
      s += rule.weights[q] * d * d;
    }
    jumps += fc[f].harmonic / face.length * s * face.length;
  }
  out.jump_seminorm = std::sqrt(jumps);
  out.dg = std::sqrt(out.energy * out.energy + jumps);
  return out;
}

double flux_error(const Mesh& mesh, const CoefficientField& alpha, const VectorField& sigma_exact,
                  const FeFunction& sigma_h, const ErrorQuadrature& quad) {
  double total = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const ElementGeometry& g = sigma_h.space().geometry(k);
    double s = 0.0;
    integrate(g, quad, [&](const Barycentric& b, double w) {
      s += w * (sigma_exact(g.map(b)) - sigma_h.vector_value(k, b)).squaredNorm();
    });
    total += s / alpha.element(k);
  }
  return std::sqrt(total);
}

double oscillation(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f, int k) {
  if (k < 1 || k > 3) {
    throw std::invalid_argument("oscillation needs 1 <= k <= 3");
  }
  double total = 0.0;
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const double h = mesh.triangle(e).diameter;
    total += h * h / alpha.element(e) * projection_defect_squared(ElementGeometry::of(mesh, e), f, k - 1);
  }
  return std::sqrt(total);
}

AppTerm app_term(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f,
                 std::span<const double> element_regularity) {
  if (static_cast<int>(element_regularity.size()) != mesh.num_triangles()) {
    throw std::invalid_argument("one regularity exponent per element is required");
  }
  AppTerm out;
  double total = 0.0;
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    if (element_regularity[e] >= 1.0) {
      ++out.unavailable_elements;
      continue;
    }
    const double h = mesh.triangle(e).diameter;
    total += h * h / alpha.element(e) * projection_defect_squared(ElementGeometry::of(mesh, e), f, 0);
  }
  out.oscillation_part = std::sqrt(total);
  if (out.unavailable_elements == 0) {
    out.value = out.oscillation_part;
  }
  return out;
}

RateTable fit_rates(std::span<const double> errors, std::span<const double> h) {
  if (errors.size() != h.size()) {
    throw std::invalid_argument("errors and mesh sizes differ in length");
  }
  if (errors.size() < 3) {
    throw std::invalid_argument("rate fitting needs at least three levels");
  }
  RateTable t;
  t.errors.assign(errors.begin(), errors.end());
  t.h.assign(h.begin(), h.end());
  t.pairwise.resize(errors.size());
  for (std::size_t l = 1; l < errors.size(); ++l) {
    if (errors[l] > 0.0 && errors[l - 1] > 0.0) {
      t.pairwise[l] = std::log(errors[l - 1] / errors[l]) / std::log(h[l - 1] / h[l]);
    }
  }
  auto slope = [&](std::size_t first) -> std::optional<double> {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(errors.size() - first);
    for (std::size_t l = first; l < errors.size(); ++l) {
      if (!(errors[l] > 0.0)) {
        return std::nullopt;
      }
      const double x = std::log(h[l]), y = std::log(errors[l]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  t.least_squares = slope(0);
  t.asymptotic = slope(errors.size() - 3);
  return t;
}

double nested_energy_difference(const FeFunction& coarse, const FeFunction& fine, const CoefficientField& fine_alpha,
                                int levels) {
  const Mesh& fm = fine.space().mesh();
  const ErrorQuadrature quad{};
  double total = 0.0;
  for (int k = 0; k < fm.num_triangles(); ++k) {
    const int parent = k >> (2 * levels);
    const ElementGeometry& g = fine.space().geometry(k);
    const ElementGeometry& gc = coarse.space().geometry(parent);
    double s = 0.0;
    integrate(g, quad, [&](const Barycentric& b, double w) {
      s += w * (fine.gradient(k, b) - coarse.gradient(parent, gc.barycentric(g.map(b)))).squaredNorm();
    });
    total += fine_alpha.element(k) * s;
  }
  return std::sqrt(total);
}

double nested_flux_difference(const FeFunction& sigma_coarse, const FeFunction& u_fine,
                              const CoefficientField& fine_alpha, int levels) {
  const Mesh& fm = u_fine.space().mesh();
  const ErrorQuadrature quad{};
  double total = 0.0;
  for (int k = 0; k < fm.num_triangles(); ++k) {
    const int parent = k >> (2 * levels);
    const ElementGeometry& g = u_fine.space().geometry(k);
    const ElementGeometry& gc = sigma_coarse.space().geometry(parent);
    const double a = fine_alpha.element(k);
    double s = 0.0;
    integrate(g, quad, [&](const Barycentric& b, double w) {
      const Point ref = -a * u_fine.gradient(k, b);
      s += w * (ref - sigma_coarse.vector_value(parent, gc.barycentric(g.map(b)))).squaredNorm();
    });
    total += s / a;
  }
  return std::sqrt(total);
}

}  // namespace ifem
