#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ifem/mesh.hpp"
#include "ifem/quadrature.hpp"

namespace ifem {

/// Affine map of one triangle: x = p0 + (p1 - p0) l1 + (p2 - p0) l2.
struct ElementGeometry {
  std::array<Point, 3> vertices;
  double area = 0.0;
  std::array<Point, 3> grad_lambda;  // gradients of the barycentric coordinates

  static ElementGeometry of(const Mesh& mesh, int k);

  Point map(const Barycentric& b) const {
    return b[0] * vertices[0] + b[1] * vertices[1] + b[2] * vertices[2];
  }
  Barycentric barycentric(const Point& x) const;
};

enum class Family { conforming, crouzeix_raviart, raviart_thomas, discontinuous };

/// Finite element family and polynomial degree.
struct SpaceKind {
  Family family = Family::conforming;
  int degree = 1;

  static SpaceKind conforming(int k) { return {Family::conforming, k}; }
  static SpaceKind crouzeix_raviart() { return {Family::crouzeix_raviart, 1}; }
  static SpaceKind raviart_thomas() { return {Family::raviart_thomas, 0}; }
  static SpaceKind discontinuous(int k) { return {Family::discontinuous, k}; }

  /// Throws DomainError for unsupported degrees.
  void validate() const;
  int local_dofs() const;
  bool is_vector() const { return family == Family::raviart_thomas; }
  std::string name() const;

  friend bool operator==(const SpaceKind&, const SpaceKind&) = default;
};

/// Global numbering of degrees of freedom.
///   conforming P1: vertices; P2: vertices then face midpoints (nv + face id);
///   CR and RT0: faces; discontinuous: element-local blocks k * local_dofs + i.
/// Local ordering follows local vertices, then (P2) the face opposite each vertex;
/// for CR/RT0 local dof i belongs to the face opposite local vertex i.
class DofMap {
 public:
  static DofMap build(const Mesh& mesh, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  int n_dofs() const { return n_dofs_; }
  int local_dofs() const { return local_; }
  std::span<const int> element(int k) const {
    return {element_dofs_.data() + static_cast<std::size_t>(k) * local_, static_cast<std::size_t>(local_)};
  }
  /// RT0 orientation: +1 if k is the minus element of its local face i, -1 otherwise.
  /// Always +1 for scalar spaces.
  int sign(int k, int i) const { return signs_.empty() ? 1 : signs_[3 * k + i]; }
  /// Degrees of freedom fixed by the Dirichlet condition (conforming and CR only).
  bool is_dirichlet(int dof) const { return !dirichlet_.empty() && dirichlet_[dof]; }
  std::vector<int> dirichlet_dofs() const;

 private:
  SpaceKind kind_;
  int n_dofs_ = 0;
  int local_ = 0;
  std::vector<int> element_dofs_;
  std::vector<signed char> signs_;
  std::vector<bool> dirichlet_;
};

/// A finite element space over a mesh. The mesh must outlive the space.
class FeSpace {
 public:
  FeSpace(const Mesh& mesh, SpaceKind kind);

  const Mesh& mesh() const { return *mesh_; }
  SpaceKind kind() const { return dofs_.kind(); }
  const DofMap& dofs() const { return dofs_; }
  int n_dofs() const { return dofs_.n_dofs(); }
  const ElementGeometry& geometry(int k) const { return geometry_[k]; }

  /// Scalar shape values at a reference point (not for RT0).
  void values(const Barycentric& b, std::span<double> out) const;
  /// Physical gradients of scalar shape functions on element k.
  void gradients(int k, const Barycentric& b, std::span<Point> out) const;
  /// RT0 shape functions (with global orientation) on element k at barycentric b.
  void vector_values(int k, const Barycentric& b, std::span<Point> out) const;
  /// RT0 divergences (constant per element).
  void divergences(int k, std::span<double> out) const;

 private:
  const Mesh* mesh_;
  DofMap dofs_;
  std::vector<ElementGeometry> geometry_;
};

/// Coefficient vector on a space.
class FeFunction {
 public:
  FeFunction(std::shared_ptr<const FeSpace> space, Eigen::VectorXd coefficients);
  explicit FeFunction(std::shared_ptr<const FeSpace> space);

  const FeSpace& space() const { return *space_; }
  std::shared_ptr<const FeSpace> space_ptr() const { return space_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  Eigen::VectorXd& coefficients() { return coefficients_; }

  double value(int k, const Barycentric& b) const;
  Point gradient(int k, const Barycentric& b) const;
  /// RT0 field value.
  Point vector_value(int k, const Barycentric& b) const;
  /// RT0 divergence on element k.
  double divergence(int k) const;

 private:
  std::shared_ptr<const FeSpace> space_;
  Eigen::VectorXd coefficients_;
};

std::shared_ptr<const FeSpace> make_space(const Mesh& mesh, SpaceKind kind);

/// Lagrange interpolation at vertices (and face midpoints for k = 2). Works for
/// conforming and discontinuous Lagrange spaces.
FeFunction interpolate_nodal(const ScalarField& v, std::shared_ptr<const FeSpace> space);
/// Face means (1/|F|) int_F v ds.
FeFunction interpolate_cr(const ScalarField& v, std::shared_ptr<const FeSpace> space);
/// Face fluxes int_F tau . n_F ds.
FeFunction interpolate_rt0(const VectorField& tau, std::shared_ptr<const FeSpace> space);
/// Element-wise L2 projection onto a discontinuous space of degree 0, 1 or 2.
FeFunction project_l2(const ScalarField& v, std::shared_ptr<const FeSpace> space);

/// Reference-edge parameter t in [0, 1] on local face i of an element, as barycentrics.
/// The face runs from local vertex i+1 to local vertex i+2.
Barycentric face_point(int local_face, double t);

}  // namespace ifem
