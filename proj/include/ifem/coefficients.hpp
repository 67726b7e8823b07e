#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ifem/mesh.hpp"

namespace ifem {

/// Piecewise-constant diffusion coefficient, stored per subdomain with a per-element cache.
class CoefficientField {
 public:
  /// Throws DomainError if any value is not strictly positive.
  static CoefficientField from_subdomains(const Mesh& mesh, std::vector<double> subdomain_values);
  static CoefficientField from_elements(std::vector<double> element_values);

  double element(int k) const { return element_values_[k]; }
  double subdomain(int i) const { return subdomain_values_[i]; }
  const std::vector<double>& element_values() const { return element_values_; }
  const std::vector<double>& subdomain_values() const { return subdomain_values_; }

  /// Same layout with every value multiplied by c > 0.
  CoefficientField scaled(double c) const;

 private:
  std::vector<double> subdomain_values_;
  std::vector<double> element_values_;
};

/// Coefficient data of one face. On boundary faces alpha_plus is unused,
/// both averages equal alpha_minus and w_minus = 1, w_plus = 0.
struct FaceCoefficient {
  double alpha_minus = 1.0;
  double alpha_plus = 1.0;
  double arithmetic = 1.0;
  double harmonic = 1.0;
  double w_minus = 1.0;
  double w_plus = 0.0;
  bool interior = false;

  /// Interior face with traces alpha_minus and alpha_plus and harmonic weights
  /// w^+- = alpha^-+ / (alpha^- + alpha^+). Throws DomainError for non-positive values.
  static FaceCoefficient interior_face(double alpha_minus, double alpha_plus);
  static FaceCoefficient boundary_face(double alpha_minus);

  /// w^kappa sqrt(alpha^kappa / alpha_H) for kappa = minus (true) or plus (false).
  double weight_bound_value(bool minus) const;
};

struct FaceCoefficients {
  std::vector<FaceCoefficient> faces;

  const FaceCoefficient& operator[](int f) const { return faces[f]; }
  std::size_t size() const { return faces.size(); }
};

FaceCoefficients face_coefficients(const Mesh& mesh, const CoefficientField& alpha);

/// True iff w^kappa sqrt(alpha^kappa / alpha_H) <= sqrt(2)/2 + 1e-12 for both sides.
/// Only meaningful on interior faces; boundary faces always give 1.
bool weight_bound_check(const FaceCoefficient& fc);

/// {v}_w^F = w^- v^- + w^+ v^+ (interior), v^- (boundary).
double weighted_average(const FaceCoefficient& fc, double minus, double plus);
/// {v}^w_F = w^+ v^- + w^- v^+ (interior), 0 (boundary).
double dual_weighted_average(const FaceCoefficient& fc, double minus, double plus);
/// [v]_F = v^- - v^+ (interior), v^- (boundary).
double jump(const FaceCoefficient& fc, double minus, double plus);

/// Subdomain geometry plus one coefficient value per subdomain.
struct CoefficientLayout {
  SubdomainLayout geometry;
  std::vector<double> values;

  double alpha_at(const Point& p) const { return values.at(geometry.subdomain_at(p)); }
};

/// Named layouts on `domain`:
///   uniform        one subdomain, value `low`
///   halves         split at the vertical midline: low | high
///   stripes        four vertical stripes low, high, low, high
///   checkerboard4  2x2 checkerboard, high on the diagonal cells (0,0) and (1,1)
///   checkerboard8  4x2 checkerboard (8 cells), high where (i + j) is even
///   nonqma8        alias of checkerboard8
/// Throws ConfigError for unknown names.
CoefficientLayout named_layout(const std::string& name, const Rectangle& domain, double low, double high);

/// Outcome of the quasi-monotonicity test over the subdomain adjacency graph.
struct QmaReport {
  bool satisfied = true;
  int subdomain_a = -1;  // first offending pair, if any
  int subdomain_b = -1;
  int vertex = -1;       // a vertex shared by the pair
};

/// Every pair of subdomains sharing at least one mesh vertex must be connected
/// by a path of face-adjacent subdomains along which alpha is monotone.
QmaReport check_qma(const Mesh& mesh, const CoefficientField& alpha);

}  // namespace ifem
