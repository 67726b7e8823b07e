#include "ifem/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include <fmt/format.h>

#include "ifem/errors.hpp"

namespace ifem {

namespace {

void require_positive(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError(fmt::format("diffusion coefficient must be positive and finite, got {}", a));
  }
}

}  // namespace

CoefficientField CoefficientField::from_subdomains(const Mesh& mesh, std::vector<double> subdomain_values) {
  if (static_cast<int>(subdomain_values.size()) < mesh.subdomain_count()) {
    throw std::invalid_argument(fmt::format("mesh has {} subdomains but {} coefficient values were given",
                                            mesh.subdomain_count(), subdomain_values.size()));
  }
  for (double a : subdomain_values) {
    require_positive(a);
  }
  CoefficientField field;
  field.subdomain_values_ = std::move(subdomain_values);
  field.element_values_.reserve(mesh.num_triangles());
  for (const auto& t : mesh.triangles()) {
    field.element_values_.push_back(field.subdomain_values_[t.subdomain]);
  }
  return field;
}

CoefficientField CoefficientField::from_elements(std::vector<double> element_values) {
  for (double a : element_values) {
    require_positive(a);
  }
  CoefficientField field;
  field.element_values_ = std::move(element_values);
  return field;
}

CoefficientField CoefficientField::scaled(double c) const {
  require_positive(c);
  CoefficientField out = *this;
  for (double& a : out.subdomain_values_) {
    a *= c;
  }
  for (double& a : out.element_values_) {
    a *= c;
  }
  return out;
}

FaceCoefficient FaceCoefficient::interior_face(double alpha_minus, double alpha_plus) {
  require_positive(alpha_minus);
  require_positive(alpha_plus);
  const double sum = alpha_minus + alpha_plus;
  FaceCoefficient fc;
  fc.interior = true;
  fc.alpha_minus = alpha_minus;
  fc.alpha_plus = alpha_plus;
  fc.arithmetic = 0.5 * sum;
  fc.harmonic = 2.0 * alpha_minus * (alpha_plus / sum);
  fc.w_minus = alpha_plus / sum;
  fc.w_plus = alpha_minus / sum;
  return fc;
}

FaceCoefficient FaceCoefficient::boundary_face(double alpha_minus) {
  require_positive(alpha_minus);
  FaceCoefficient fc;
  fc.interior = false;
  fc.alpha_minus = alpha_minus;
  fc.alpha_plus = alpha_minus;
  fc.arithmetic = alpha_minus;
  fc.harmonic = alpha_minus;
  fc.w_minus = 1.0;
  fc.w_plus = 0.0;
  return fc;
}

double FaceCoefficient::weight_bound_value(bool minus) const {
  return minus ? w_minus * std::sqrt(alpha_minus / harmonic) : w_plus * std::sqrt(alpha_plus / harmonic);
}

FaceCoefficients face_coefficients(const Mesh& mesh, const CoefficientField& alpha) {
  FaceCoefficients out;
  out.faces.reserve(mesh.num_faces());
  for (const auto& f : mesh.faces()) {
    out.faces.push_back(f.is_boundary() ? FaceCoefficient::boundary_face(alpha.element(f.k_minus))
                                        : FaceCoefficient::interior_face(alpha.element(f.k_minus),
                                                                         alpha.element(f.k_plus)));
  }
  return out;
}

bool weight_bound_check(const FaceCoefficient& fc) {
  const double bound = std::sqrt(2.0) / 2.0 + 1e-12;
  return fc.weight_bound_value(true) <= bound && fc.weight_bound_value(false) <= bound;
}

double weighted_average(const FaceCoefficient& fc, double minus, double plus) {
  return fc.interior ? fc.w_minus * minus + fc.w_plus * plus : minus;
}

double dual_weighted_average(const FaceCoefficient& fc, double minus, double plus) {
  return fc.interior ? fc.w_plus * minus + fc.w_minus * plus : 0.0;
}

double jump(const FaceCoefficient& fc, double minus, double plus) { return fc.interior ? minus - plus : minus; }

CoefficientLayout named_layout(const std::string& name, const Rectangle& domain, double low, double high) {
  CoefficientLayout layout;
  layout.geometry.domain = domain;
  auto cells = [&](int nx, int ny, auto&& value_of) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const Rectangle box{domain.x0 + domain.width() * i / nx, domain.x0 + domain.width() * (i + 1) / nx,
                            domain.y0 + domain.height() * j / ny, domain.y0 + domain.height() * (j + 1) / ny};
        layout.geometry.boxes.push_back({box, static_cast<int>(layout.values.size())});
        layout.values.push_back(value_of(i, j));
      }
    }
  };
  if (name == "uniform") {
    layout.values = {low};
  } else if (name == "halves") {
    cells(2, 1, [&](int i, int) { return i == 0 ? low : high; });
  } else if (name == "stripes") {
    cells(4, 1, [&](int i, int) { return i % 2 == 0 ? low : high; });
  } else if (name == "checkerboard4") {
    cells(2, 2, [&](int i, int j) { return (i + j) % 2 == 0 ? high : low; });
  } else if (name == "checkerboard8" || name == "nonqma8") {
    cells(4, 2, [&](int i, int j) { return (i + j) % 2 == 0 ? high : low; });
  } else {
    throw ConfigError(fmt::format("unknown coefficient layout '{}'", name));
  }
  return layout;
}

QmaReport check_qma(const Mesh& mesh, const CoefficientField& alpha) {
  const int ns = mesh.subdomain_count();
  std::vector<double> value(ns, 0.0);
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    value[mesh.triangle(k).subdomain] = alpha.element(k);
  }

  std::vector<std::set<int>> adjacent(ns);
  for (const auto& f : mesh.faces()) {
    if (!f.is_boundary()) {
      const int a = mesh.triangle(f.k_minus).subdomain;
      const int b = mesh.triangle(f.k_plus).subdomain;
      if (a != b) {
        adjacent[a].insert(b);
        adjacent[b].insert(a);
      }
    }
  }

  // monotone reachability: nondecreasing (sign = +1) or nonincreasing (sign = -1)
  auto reachable = [&](int from, int to, int sign) {
    std::vector<bool> seen(ns, false);
    std::queue<int> open;
    open.push(from);
    seen[from] = true;
    while (!open.empty()) {
      const int s = open.front();
      open.pop();
      if (s == to) {
        return true;
      }
      for (int t : adjacent[s]) {
        if (!seen[t] && sign * (value[t] - value[s]) >= 0.0) {
          seen[t] = true;
          open.push(t);
        }
      }
    }
    return false;
  };

  std::vector<std::set<int>> touching(mesh.num_vertices());
  for (const auto& t : mesh.triangles()) {
    for (int v : t.vertices) {
      touching[v].insert(t.subdomain);
    }
  }
  std::set<std::pair<int, int>> checked;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int a : touching[v]) {
      for (int b : touching[v]) {
        if (a >= b || !checked.insert({a, b}).second) {
          continue;
        }
        if (!reachable(a, b, 1) && !reachable(a, b, -1)) {
          return {false, a, b, v};
        }
      }
    }
  }
  return {};
}

}  // namespace ifem
