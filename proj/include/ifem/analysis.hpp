#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ifem/coefficients.hpp"
#include "ifem/mesh.hpp"
#include "ifem/spaces.hpp"

namespace ifem {

/// Quadrature used for error norms. Elements with a vertex at `singular_point`
/// are integrated on their four midpoint sub-triangles.
struct ErrorQuadrature {
  int degree = 10;
  std::optional<Point> singular_point;
};

/// Errors of one discrete solution; absent fields do not apply to the method.
struct ErrorReport {
  int level = 0;
  double h_max = 0.0;
  std::optional<double> energy_error;   // ||alpha^{1/2} grad_h (u - u_h)||
  std::optional<double> dg_error;       // |||u - u_h|||_dg
  std::optional<double> jump_seminorm;  // (sum_F ||u - u_h||_{J,F}^2)^{1/2}
  std::optional<double> flux_error;     // ||alpha^{-1/2} (sigma - sigma_h)||
  std::optional<double> osc;            // osc_alpha(f, T)
  std::vector<double> per_element;      // optional local energy errors
};

/// Broken weighted energy error; u_h may be conforming, CR or discontinuous.
double energy_error(const Mesh& mesh, const CoefficientField& alpha, const VectorField& grad_exact,
                    const FeFunction& uh, const ErrorQuadrature& quad = {});

/// Local contributions ||alpha^{1/2} grad(u - u_h)||_{0,K}.
std::vector<double> element_energy_errors(const Mesh& mesh, const CoefficientField& alpha,
                                          const VectorField& grad_exact, const FeFunction& uh,
                                          const ErrorQuadrature& quad = {});

struct DgError {
  double energy = 0.0;
  double jump_seminorm = 0.0;
  double dg = 0.0;  // sqrt(energy^2 + jump_seminorm^2)
};

/// DG-norm error. The exact solution is continuous, so interior jumps come from u_h
/// alone; on boundary faces the jump is u_exact - u_h.
DgError dg_norm_error(const Mesh& mesh, const CoefficientField& alpha, const FaceCoefficients& fc,
                      const ScalarField& u_exact, const VectorField& grad_exact, const FeFunction& uh,
                      const ErrorQuadrature& quad = {});

/// Jump seminorm of a discrete function alone (boundary trace against zero).
double jump_seminorm(const Mesh& mesh, const FaceCoefficients& fc, const FeFunction& uh);

/// ||alpha^{-1/2}(sigma - sigma_h)|| for an RT0 field sigma_h.
double flux_error(const Mesh& mesh, const CoefficientField& alpha, const VectorField& sigma_exact,
                  const FeFunction& sigma_h, const ErrorQuadrature& quad = {});

/// osc_alpha(f, T) = (sum_K h_K^2 / alpha_K ||f - Q_{k-1} f||_K^2)^{1/2}, k >= 1.
double oscillation(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f, int k);

/// Data part of app_alpha(f, K). Elements with s_K >= 1 need the fractional seminorm
/// of grad u, which is not computed; `value` is present only when no such element exists.
struct AppTerm {
  std::optional<double> value;
  double oscillation_part = 0.0;  // contribution of elements with s_K < 1
  int unavailable_elements = 0;
};
AppTerm app_term(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f,
                 std::span<const double> element_regularity);

/// Pairwise rates log(e_{l-1}/e_l) / log(h_{l-1}/h_l) and least-squares slopes of
/// log e against log h, over all levels and over the last three.
struct RateTable {
  std::vector<double> h;
  std::vector<double> errors;
  std::vector<std::optional<double>> pairwise;  // entry 0 is always empty
  std::optional<double> least_squares;
  std::optional<double> asymptotic;
};
/// Needs at least three levels; non-positive errors leave the affected rates empty.
RateTable fit_rates(std::span<const double> errors, std::span<const double> h);

/// Energy norm of the difference between a function on a coarse mesh and one on a
/// mesh obtained from it by `levels` uniform refinements (integrated on the fine mesh).
double nested_energy_difference(const FeFunction& coarse, const FeFunction& fine, const CoefficientField& fine_alpha,
                                int levels);
/// ||alpha^{-1/2}(-alpha grad u_ref - sigma_h)|| with u_ref on the refined mesh and sigma_h RT0 on the coarse one.
double nested_flux_difference(const FeFunction& sigma_coarse, const FeFunction& u_fine,
                              const CoefficientField& fine_alpha, int levels);

}  // namespace ifem
