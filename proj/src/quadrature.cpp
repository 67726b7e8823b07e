#include "ifem/quadrature.hpp"

#include <cmath>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "ifem/errors.hpp"

namespace ifem {

namespace {

// Gauss-Legendre nodes/weights mapped to [0, 1].
template <int N>
std::pair<std::vector<double>, std::vector<double>> gauss_unit() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  std::vector<double> x, wt;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool center = a[i] == 0.0;
    x.push_back(0.5 * (1.0 - a[i]));
    wt.push_back(0.5 * w[i]);
    if (!center) {
      x.push_back(0.5 * (1.0 + a[i]));
      wt.push_back(0.5 * w[i]);
    }
  }
  return {x, wt};
}

std::pair<std::vector<double>, std::vector<double>> gauss_points(int n) {
  switch (n) {
    case 1: return gauss_unit<1>();
    case 2: return gauss_unit<2>();
    case 3: return gauss_unit<3>();
    case 4: return gauss_unit<4>();
    case 5: return gauss_unit<5>();
    case 6: return gauss_unit<6>();
    case 7: return gauss_unit<7>();
    default: throw DomainError(fmt::format("no Gauss rule with {} points", n));
  }
}

void check_degree(int degree) {
  if (degree < 1 || degree > kMaxQuadratureDegree) {
    throw DomainError(fmt::format("quadrature degree {} outside [1, {}]", degree, kMaxQuadratureDegree));
  }
}

TriangleRule make_triangle_rule(int degree) {
  TriangleRule rule;
  rule.exact_degree = degree;
  if (degree == 1) {
    rule.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    rule.weights = {0.5};
    return rule;
  }
  if (degree == 2) {
    constexpr double a = 2.0 / 3.0, b = 1.0 / 6.0;
    rule.points = {{a, b, b}, {b, a, b}, {b, b, a}};
    rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    return rule;
  }
  // Collapsed (conical product) rule: (x, y) = (u (1 - v), v), Jacobian 1 - v.
  // A degree-d integrand becomes degree d in u and d + 1 in v.
  const auto [u, wu] = gauss_points((degree + 2) / 2);
  const auto [v, wv] = gauss_points((degree + 3) / 2);
  for (std::size_t j = 0; j < v.size(); ++j) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = u[i] * (1.0 - v[j]);
      const double y = v[j];
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(wu[i] * wv[j] * (1.0 - v[j]));
    }
  }
  return rule;
}

EdgeRule make_edge_rule(int degree) {
  EdgeRule rule;
  rule.exact_degree = degree;
  auto [x, w] = gauss_points((degree + 2) / 2);
  rule.points = std::move(x);
  rule.weights = std::move(w);
  return rule;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  check_degree(degree);
  static const std::vector<TriangleRule> rules = [] {
    std::vector<TriangleRule> r;
    for (int d = 1; d <= kMaxQuadratureDegree; ++d) {
      r.push_back(make_triangle_rule(d));
    }
    return r;
  }();
  return rules[degree - 1];
}

const EdgeRule& edge_rule(int degree) {
  check_degree(degree);
  static const std::vector<EdgeRule> rules = [] {
    std::vector<EdgeRule> r;
    for (int d = 1; d <= kMaxQuadratureDegree; ++d) {
      r.push_back(make_edge_rule(d));
    }
    return r;
  }();
  return rules[degree - 1];
}

}  // namespace ifem
