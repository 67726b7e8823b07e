#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ifem {

using Point = Eigen::Vector2d;
using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

inline constexpr int kNoElement = -1;

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rectangle {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Point& p, double tol = 0.0) const {
    return p.x() >= x0 - tol && p.x() <= x1 + tol && p.y() >= y0 - tol && p.y() <= y1 + tol;
  }
};

/// Box of the domain assigned to one subdomain. Later boxes override earlier ones.
struct SubdomainBox {
  Rectangle box;
  int subdomain = 0;
};

/// Piecewise assignment of subdomain ids over a rectangular domain.
struct SubdomainLayout {
  Rectangle domain;
  std::vector<SubdomainBox> boxes;
  int default_subdomain = 0;

  /// Number of distinct subdomain ids (max id + 1).
  int subdomain_count() const;
  /// Subdomain containing p; points on box edges resolve to the last matching box.
  int subdomain_at(const Point& p) const;
};

/// Triangle with counterclockwise vertices. Local face i is opposite local vertex i.
struct Triangle {
  std::array<int, 3> vertices{};
  int subdomain = 0;
  double diameter = 0.0;  // longest edge
  double area = 0.0;
};

enum class FaceKind { interior, boundary };

/// Edge of the triangulation. `normal` is the unit outward normal of `k_minus`;
/// `k_plus` is kNoElement on (Dirichlet) boundary faces.
struct Face {
  std::array<int, 2> vertices{};  // sorted ascending
  int k_minus = kNoElement;
  int k_plus = kNoElement;
  Point normal = Point::Zero();
  double length = 0.0;
  FaceKind kind = FaceKind::boundary;

  bool is_boundary() const { return kind == FaceKind::boundary; }
};

/// Conforming triangulation with face topology. Immutable after construction.
class Mesh {
 public:
  struct TriangleInput {
    std::array<int, 3> vertices;
    int subdomain;
  };

  /// Builds faces and adjacency. Triangles are reoriented counterclockwise if needed.
  static Mesh from_triangles(std::vector<Point> vertices, std::span<const TriangleInput> triangles,
                             int subdomain_count, Rectangle domain);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Face>& faces() const { return faces_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int subdomain_count() const { return subdomain_count_; }
  const Rectangle& domain() const { return domain_; }

  const Point& vertex(int v) const { return vertices_[v]; }
  const Triangle& triangle(int k) const { return triangles_[k]; }
  const Face& face(int f) const { return faces_[f]; }

  /// Face ids of triangle k, indexed by local face (opposite local vertex).
  const std::array<int, 3>& element_faces(int k) const { return element_faces_[k]; }
  /// Neighbor across local face i, or kNoElement on the boundary.
  int neighbor(int k, int local_face) const;
  /// Parent element in the mesh this one was refined from (empty for root meshes).
  /// Children of parent p are 4p .. 4p+3.
  std::span<const int> parents() const { return parents_; }

  Point centroid(int k) const;
  double max_diameter() const;
  double min_angle() const;

 private:
  friend Mesh refine_uniform(const Mesh& mesh);

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 3>> element_faces_;
  std::vector<int> parents_;
  int subdomain_count_ = 1;
  Rectangle domain_;
};

/// n x n grid on layout.domain, every cell split along its lower-left to
/// upper-right diagonal. Throws AlignmentError if a box edge is off the grid.
Mesh build_structured_square(int n, const SubdomainLayout& layout);

/// Midpoint subdivision into 4 congruent children; subdomains inherited.
Mesh refine_uniform(const Mesh& mesh);

/// Element k together with all elements sharing a face with it (sorted).
std::vector<int> face_patch(const Mesh& mesh, int k);

/// Plain-text dump: `v x y`, `t v0 v1 v2 subdomain`, `f v0 v1 kminus kplus` (kplus -1 on boundary).
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

}  // namespace ifem
