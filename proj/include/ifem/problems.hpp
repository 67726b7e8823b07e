#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ifem/analysis.hpp"
#include "ifem/coefficients.hpp"
#include "ifem/mesh.hpp"

namespace ifem {

/// Benchmark problem -div(alpha grad u) = f with piecewise-constant alpha.
struct ProblemSpec {
  std::string name;
  CoefficientLayout layout;
  ScalarField f;
  ScalarField u_exact;     // empty when no exact solution is known
  VectorField grad_exact;  // empty when no exact solution is known
  ScalarField dirichlet;   // empty means homogeneous
  double s_global = INFINITY;
  std::optional<Point> singular_point;  // elements touching it have s_K = s_singular
  double s_singular = INFINITY;
  bool qma_satisfied = true;

  bool has_exact() const { return static_cast<bool>(u_exact); }
  const Rectangle& domain() const { return layout.geometry.domain; }
  double alpha_at(const Point& p) const { return layout.alpha_at(p); }
  /// -alpha grad u, with alpha and grad u taken from the same subdomain.
  VectorField sigma_exact() const;

  Mesh mesh(int n) const { return build_structured_square(n, layout.geometry); }
  CoefficientField coefficients(const Mesh& mesh) const {
    return CoefficientField::from_subdomains(mesh, layout.values);
  }
  /// Per-element regularity exponents s_K.
  std::vector<double> element_regularity(const Mesh& mesh) const;
  ErrorQuadrature error_quadrature() const;
};

/// alpha = 1, u = sin(pi x) sin(pi y) on the unit square.
ProblemSpec problem_smooth_unit();

/// Unit square split at x = 1/2, alpha = 1 | jump. u = g(x) sin(pi y) / alpha with
/// g(x) = x (1 - x) (x - 1/2): continuous, alpha du/dx continuous, zero on the boundary,
/// and f = (pi^2 g - g'') sin(pi y) independent of the jump.
ProblemSpec problem_interface_1d(double jump);

/// Same split; u = x on the left, 1/2 + (x - 1/2)/jump on the right, f = 0, u = g on the boundary.
/// Lies in every discrete space, so all methods must reproduce it.
ProblemSpec problem_piecewise_linear(double jump);

/// Parameters of the Kellogg solution u = r^s mu(theta) (symmetric branch rho = pi/4).
struct KelloggParameters {
  double s;
  double ratio;  // R: alpha = R in quadrants 1 and 3, 1 in quadrants 2 and 4
  double rho;
  double sigma;
  double residual;  // max residual of the three matching equations
};
/// Solves the matching conditions for s in (0, 1). Throws DomainError for s outside
/// (0, 1) and ConstructionError if the root finder fails.
KelloggParameters kellogg_parameters(double s);

/// Checkerboard problem on (-1, 1)^2 with singular exponent s at the origin.
ProblemSpec problem_kellogg(double s);

/// f = 1 on the unit square with a QMA-violating layout ("checkerboard4" or "checkerboard8").
ProblemSpec problem_nonqma(const std::string& pattern, double jump);

/// Builtin sources for custom problems: "one", "zero", "smooth".
ScalarField builtin_source(const std::string& name);

/// Coefficient boxes with a builtin source and zero boundary data; no exact solution.
ProblemSpec problem_custom(CoefficientLayout layout, const std::string& source);

struct ProblemCheck {
  bool ok = true;
  double worst_residual = 0.0;
  double worst_relative = 0.0;  // residual / (1 + scale); ok iff at most tol
  std::string message;  // first failing sample
};

/// Finite-difference strong-form check in each subdomain, boundary values, and
/// continuity of u and alpha du/dn across interfaces, at random sample points.
/// Needs an exact solution.
ProblemCheck verify_problem(const ProblemSpec& p, int samples, std::uint64_t seed = 1, double tol = 1e-8);

/// Catalog lookup: "smooth", "interface1d", "piecewise_linear", "kellogg", "nonqma", "custom".
struct ProblemRequest {
  std::string name = "smooth";
  double jump = 1.0;
  double s = 0.5;
  std::string pattern = "checkerboard4";
  std::optional<CoefficientLayout> custom_layout;  // "custom" only
  std::string source = "one";                     // "custom" only
};
ProblemSpec make_problem(const ProblemRequest& request);

}  // namespace ifem
