#pragma once

#include <array>
#include <vector>

namespace ifem {

/// Barycentric coordinates (l0, l1, l2) on the reference triangle (0,0), (1,0), (0,1);
/// the Cartesian reference point is (l1, l2).
using Barycentric = std::array<double, 3>;

/// Rule on the reference triangle; weights sum to 1/2.
struct TriangleRule {
  std::vector<Barycentric> points;
  std::vector<double> weights;
  int exact_degree = 0;
};

/// Gauss rule on [0, 1]; weights sum to 1.
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exact_degree = 0;
};

inline constexpr int kMaxQuadratureDegree = 10;

/// Positive-weight rule exact for total degree <= degree, 1 <= degree <= 10.
/// Throws DomainError outside that range. Rules are built once and shared.
const TriangleRule& triangle_rule(int degree);
const EdgeRule& edge_rule(int degree);

}  // namespace ifem
