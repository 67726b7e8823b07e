#include "ifem/spaces.hpp"

#include <cassert>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ifem/errors.hpp"

namespace ifem {

namespace {

constexpr int kProjectionDegree = 10;

Point perp(const Point& d) { return {-d.y(), d.x()}; }

}  // namespace

ElementGeometry ElementGeometry::of(const Mesh& mesh, int k) {
  ElementGeometry g;
  const auto& t = mesh.triangle(k);
  for (int i = 0; i < 3; ++i) {
    g.vertices[i] = mesh.vertex(t.vertices[i]);
  }
  g.area = t.area;
  for (int i = 0; i < 3; ++i) {
    const Point d = g.vertices[(i + 2) % 3] - g.vertices[(i + 1) % 3];
    g.grad_lambda[i] = perp(d) / (2.0 * g.area);
  }
  return g;
}

Barycentric ElementGeometry::barycentric(const Point& x) const {
  Barycentric b;
  for (int i = 0; i < 3; ++i) {
    // lambda_i is affine, equal to 1 at vertex i and 0 on the opposite face
    b[i] = grad_lambda[i].dot(x - vertices[(i + 1) % 3]);
  }
  return b;
}

void SpaceKind::validate() const {
  bool ok = false;
  switch (family) {
    case Family::conforming: ok = degree == 1 || degree == 2; break;
    case Family::crouzeix_raviart: ok = degree == 1; break;
    case Family::raviart_thomas: ok = degree == 0; break;
    case Family::discontinuous: ok = degree >= 0 && degree <= 2; break;
  }
  if (!ok) {
    throw DomainError(fmt::format("unsupported space {}", name()));
  }
}

int SpaceKind::local_dofs() const {
  switch (family) {
    case Family::crouzeix_raviart:
    case Family::raviart_thomas: return 3;
    case Family::conforming:
    case Family::discontinuous: return degree == 0 ? 1 : (degree == 1 ? 3 : 6);
  }
  return 0;
}

std::string SpaceKind::name() const {
  switch (family) {
    case Family::conforming: return fmt::format("P{}", degree);
    case Family::crouzeix_raviart: return "CR";
    case Family::raviart_thomas: return fmt::format("RT{}", degree);
    case Family::discontinuous: return fmt::format("DG-P{}", degree);
  }
  return "?";
}

DofMap DofMap::build(const Mesh& mesh, SpaceKind kind) {
  kind.validate();
  DofMap map;
  map.kind_ = kind;
  map.local_ = kind.local_dofs();
  const int nk = mesh.num_triangles();
  map.element_dofs_.resize(static_cast<std::size_t>(nk) * map.local_);

  switch (kind.family) {
    case Family::conforming: {
      const int nv = mesh.num_vertices();
      map.n_dofs_ = kind.degree == 1 ? nv : nv + mesh.num_faces();
      for (int k = 0; k < nk; ++k) {
        auto* d = map.element_dofs_.data() + static_cast<std::size_t>(k) * map.local_;
        for (int i = 0; i < 3; ++i) {
          d[i] = mesh.triangle(k).vertices[i];
          if (kind.degree == 2) {
            d[3 + i] = nv + mesh.element_faces(k)[i];
          }
        }
      }
      map.dirichlet_.assign(map.n_dofs_, false);
      for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (face.is_boundary()) {
          map.dirichlet_[face.vertices[0]] = true;
          map.dirichlet_[face.vertices[1]] = true;
          if (kind.degree == 2) {
            map.dirichlet_[nv + f] = true;
          }
        }
      }
      break;
    }
    case Family::crouzeix_raviart:
    case Family::raviart_thomas: {
      map.n_dofs_ = mesh.num_faces();
      for (int k = 0; k < nk; ++k) {
        for (int i = 0; i < 3; ++i) {
          map.element_dofs_[3 * k + i] = mesh.element_faces(k)[i];
        }
      }
      if (kind.family == Family::crouzeix_raviart) {
        map.dirichlet_.assign(map.n_dofs_, false);
        for (int f = 0; f < mesh.num_faces(); ++f) {
          map.dirichlet_[f] = mesh.face(f).is_boundary();
        }
      } else {
        map.signs_.resize(3 * nk);
        for (int k = 0; k < nk; ++k) {
          for (int i = 0; i < 3; ++i) {
            map.signs_[3 * k + i] = mesh.face(mesh.element_faces(k)[i]).k_minus == k ? 1 : -1;
          }
        }
      }
      break;
    }
    case Family::discontinuous: {
      map.n_dofs_ = nk * map.local_;
      for (int d = 0; d < map.n_dofs_; ++d) {
        map.element_dofs_[d] = d;
      }
      break;
    }
  }
  return map;
}

std::vector<int> DofMap::dirichlet_dofs() const {
  std::vector<int> out;
  for (int d = 0; d < static_cast<int>(dirichlet_.size()); ++d) {
    if (dirichlet_[d]) {
      out.push_back(d);
    }
  }
  return out;
}

FeSpace::FeSpace(const Mesh& mesh, SpaceKind kind) : mesh_(&mesh), dofs_(DofMap::build(mesh, kind)) {
  geometry_.reserve(mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    geometry_.push_back(ElementGeometry::of(mesh, k));
  }
}

void FeSpace::values(const Barycentric& b, std::span<double> out) const {
  const SpaceKind kind = dofs_.kind();
  assert(!kind.is_vector());
  if (kind.family == Family::crouzeix_raviart) {
    for (int i = 0; i < 3; ++i) {
      out[i] = 1.0 - 2.0 * b[i];
    }
    return;
  }
  switch (kind.degree) {
    case 0: out[0] = 1.0; break;
    case 1:
      for (int i = 0; i < 3; ++i) {
        out[i] = b[i];
      }
      break;
    case 2:
      for (int i = 0; i < 3; ++i) {
        out[i] = b[i] * (2.0 * b[i] - 1.0);
        out[3 + i] = 4.0 * b[(i + 1) % 3] * b[(i + 2) % 3];
      }
      break;
  }
}

void FeSpace::gradients(int k, const Barycentric& b, std::span<Point> out) const {
  const SpaceKind kind = dofs_.kind();
  const auto& gl = geometry_[k].grad_lambda;
  if (kind.family == Family::crouzeix_raviart) {
    for (int i = 0; i < 3; ++i) {
      out[i] = -2.0 * gl[i];
    }
    return;
  }
  switch (kind.degree) {
    case 0: out[0] = Point::Zero(); break;
    case 1:
      for (int i = 0; i < 3; ++i) {
        out[i] = gl[i];
      }
      break;
    case 2:
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, l = (i + 2) % 3;
        out[i] = (4.0 * b[i] - 1.0) * gl[i];
        out[3 + i] = 4.0 * (b[j] * gl[l] + b[l] * gl[j]);
      }
      break;
  }
}

void FeSpace::vector_values(int k, const Barycentric& b, std::span<Point> out) const {
  const ElementGeometry& g = geometry_[k];
  const Point x = g.map(b);
  for (int i = 0; i < 3; ++i) {
    out[i] = dofs_.sign(k, i) / (2.0 * g.area) * (x - g.vertices[i]);
  }
}

void FeSpace::divergences(int k, std::span<double> out) const {
  for (int i = 0; i < 3; ++i) {
    out[i] = dofs_.sign(k, i) / geometry_[k].area;
  }
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> space, Eigen::VectorXd coefficients)
    : space_(std::move(space)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != space_->n_dofs()) {
    throw std::invalid_argument(fmt::format("coefficient vector has length {}, space has {} dofs",
                                            coefficients_.size(), space_->n_dofs()));
  }
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> space)
    : FeFunction(space, Eigen::VectorXd::Zero(space->n_dofs())) {}

double FeFunction::value(int k, const Barycentric& b) const {
  std::array<double, 6> phi{};
  const int n = space_->dofs().local_dofs();
  space_->values(b, std::span(phi).first(n));
  const auto dofs = space_->dofs().element(k);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += coefficients_[dofs[i]] * phi[i];
  }
  return s;
}

Point FeFunction::gradient(int k, const Barycentric& b) const {
  std::array<Point, 6> grad;
  const int n = space_->dofs().local_dofs();
  space_->gradients(k, b, std::span(grad).first(n));
  const auto dofs = space_->dofs().element(k);
  Point s = Point::Zero();
  for (int i = 0; i < n; ++i) {
    s += coefficients_[dofs[i]] * grad[i];
  }
  return s;
}

Point FeFunction::vector_value(int k, const Barycentric& b) const {
  std::array<Point, 3> phi;
  space_->vector_values(k, b, phi);
  const auto dofs = space_->dofs().element(k);
  Point s = Point::Zero();
  for (int i = 0; i < 3; ++i) {
    s += coefficients_[dofs[i]] * phi[i];
  }
  return s;
}

double FeFunction::divergence(int k) const {
  std::array<double, 3> div{};
  space_->divergences(k, div);
  const auto dofs = space_->dofs().element(k);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    s += coefficients_[dofs[i]] * div[i];
  }
  return s;
}

std::shared_ptr<const FeSpace> make_space(const Mesh& mesh, SpaceKind kind) {
  return std::make_shared<const FeSpace>(mesh, kind);
}

Barycentric face_point(int local_face, double t) {
  Barycentric b{0.0, 0.0, 0.0};
  b[(local_face + 1) % 3] = 1.0 - t;
  b[(local_face + 2) % 3] = t;
  return b;
}

FeFunction interpolate_nodal(const ScalarField& v, std::shared_ptr<const FeSpace> space) {
  const SpaceKind kind = space->kind();
  if (kind.family != Family::conforming && kind.family != Family::discontinuous) {
    throw std::invalid_argument("nodal interpolation needs a Lagrange space");
  }
  FeFunction out(space);
  const Mesh& mesh = space->mesh();
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const ElementGeometry& g = space->geometry(k);
    const auto dofs = space->dofs().element(k);
    if (kind.degree == 0) {
      out.coefficients()[dofs[0]] = v(mesh.centroid(k));
      continue;
    }
    for (int i = 0; i < 3; ++i) {
      out.coefficients()[dofs[i]] = v(g.vertices[i]);
      if (kind.degree == 2) {
        out.coefficients()[dofs[3 + i]] = v(0.5 * (g.vertices[(i + 1) % 3] + g.vertices[(i + 2) % 3]));
      }
    }
  }
  return out;
}

FeFunction interpolate_cr(const ScalarField& v, std::shared_ptr<const FeSpace> space) {
  if (space->kind().family != Family::crouzeix_raviart) {
    throw std::invalid_argument("interpolate_cr needs a Crouzeix-Raviart space");
  }
  FeFunction out(space);
  const Mesh& mesh = space->mesh();
  const EdgeRule& rule = edge_rule(kProjectionDegree);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Point& a = mesh.vertex(face.vertices[0]);
    const Point& b = mesh.vertex(face.vertices[1]);
    double mean = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      mean += rule.weights[q] * v((1.0 - t) * a + t * b);
    }
    out.coefficients()[f] = mean;
  }
  return out;
}

FeFunction interpolate_rt0(const VectorField& tau, std::shared_ptr<const FeSpace> space) {
  if (space->kind().family != Family::raviart_thomas) {
    throw std::invalid_argument("interpolate_rt0 needs a Raviart-Thomas space");
  }
  FeFunction out(space);
  const Mesh& mesh = space->mesh();
  const EdgeRule& rule = edge_rule(kProjectionDegree);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Point& a = mesh.vertex(face.vertices[0]);
    const Point& b = mesh.vertex(face.vertices[1]);
    double flux = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      flux += rule.weights[q] * tau((1.0 - t) * a + t * b).dot(face.normal);
    }
    out.coefficients()[f] = flux * face.length;
  }
  return out;
}

FeFunction project_l2(const ScalarField& v, std::shared_ptr<const FeSpace> space) {
  if (space->kind().family != Family::discontinuous) {
    throw std::invalid_argument("project_l2 needs a discontinuous space");
  }
  FeFunction out(space);
  const Mesh& mesh = space->mesh();
  const TriangleRule& rule = triangle_rule(kProjectionDegree);
  const int n = space->dofs().local_dofs();
  std::array<double, 6> phi{};
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const ElementGeometry& g = space->geometry(k);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = 2.0 * g.area * rule.weights[q];
      space->values(rule.points[q], std::span(phi).first(n));
      const double vq = v(g.map(rule.points[q]));
      for (int i = 0; i < n; ++i) {
        load[i] += w * vq * phi[i];
        for (int j = 0; j < n; ++j) {
          mass(i, j) += w * phi[i] * phi[j];
        }
      }
    }
    const Eigen::VectorXd local = mass.llt().solve(load);
    const auto dofs = space->dofs().element(k);
    for (int i = 0; i < n; ++i) {
      out.coefficients()[dofs[i]] = local[i];
    }
  }
  return out;
}

}  // namespace ifem
