#include "ifem/assembly.hpp"

#include <array>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ifem/errors.hpp"
#include "ifem/quadrature.hpp"

namespace ifem {

namespace {

constexpr int kMaxLocal = 6;

int element_degree(int k) { return 2 * k + 2; }

using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2 * kMaxLocal, 2 * kMaxLocal>;
using LocalVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2 * kMaxLocal, 1>;

// Stiffness (alpha grad phi_j, grad phi_i)_K and load (f, phi_i)_K of a scalar space.
void scalar_element(const FeSpace& space, int k, double alpha, const ScalarField& f, int degree,
                    LocalMatrix& a, LocalVector& b) {
  const int n = space.dofs().local_dofs();
  const ElementGeometry& g = space.geometry(k);
  const TriangleRule& rule = triangle_rule(degree);
  a.setZero(n, n);
  b.setZero(n);
  std::array<double, kMaxLocal> phi{};
  std::array<Point, kMaxLocal> grad;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double w = 2.0 * g.area * rule.weights[q];
    space.values(rule.points[q], std::span(phi).first(n));
    space.gradients(k, rule.points[q], std::span(grad).first(n));
    const double fq = f ? f(g.map(rule.points[q])) : 0.0;
    for (int i = 0; i < n; ++i) {
      b[i] += w * fq * phi[i];
      for (int j = 0; j < n; ++j) {
        a(i, j) += w * alpha * grad[i].dot(grad[j]);
      }
    }
  }
}

ConstrainedSystem assemble_constrained(std::shared_ptr<const FeSpace> space, const CoefficientField& alpha,
                                       const ScalarField& f, int degree, Eigen::VectorXd boundary) {
  const DofMap& dofs = space->dofs();
  const Mesh& mesh = space->mesh();
  ConstrainedSystem out;
  out.space = space;
  out.boundary_values = std::move(boundary);

  std::vector<int> row(dofs.n_dofs(), -1);
  for (int d = 0; d < dofs.n_dofs(); ++d) {
    if (!dofs.is_dirichlet(d)) {
      row[d] = static_cast<int>(out.free_dofs.size());
      out.free_dofs.push_back(d);
      out.boundary_values[d] = 0.0;
    }
  }

  const int n = static_cast<int>(out.free_dofs.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_triangles()) * dofs.local_dofs() * dofs.local_dofs());
  LocalMatrix a;
  LocalVector b;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    scalar_element(*space, k, alpha.element(k), f, degree, a, b);
    const auto ed = dofs.element(k);
    for (int i = 0; i < dofs.local_dofs(); ++i) {
      const int ri = row[ed[i]];
      if (ri < 0) {
        continue;
      }
      rhs[ri] += b[i];
      for (int j = 0; j < dofs.local_dofs(); ++j) {
        const int cj = row[ed[j]];
        if (cj >= 0) {
          triplets.push_back({ri, cj, a(i, j)});
        } else {
          rhs[ri] -= a(i, j) * out.boundary_values[ed[j]];
        }
      }
    }
  }
  out.system.matrix = CsrMatrix::from_triplets(n, n, std::move(triplets));
  out.system.rhs = std::move(rhs);
  out.system.structure = Structure::spd;
  return out;
}

}  // namespace

FeFunction ConstrainedSystem::expand(const Eigen::VectorXd& x) const {
  Eigen::VectorXd full = boundary_values;
  for (std::size_t r = 0; r < free_dofs.size(); ++r) {
    full[free_dofs[r]] = x[static_cast<Eigen::Index>(r)];
  }
  return FeFunction(space, std::move(full));
}

std::pair<FeFunction, FeFunction> MixedSystem::split(const Eigen::VectorXd& x) const {
  const int nf = system.n_flux;
  return {FeFunction(flux_space, x.head(nf)), FeFunction(scalar_space, -x.tail(system.n_scalar))};
}

FeFunction DgSystem::expand(const Eigen::VectorXd& x) const { return FeFunction(space, x); }

DgParameters DgParameters::for_degree(int k) {
  DgParameters p;
  p.gamma = k >= 2 ? 20.0 : 10.0;
  return p;
}

DgFaceData dg_face_data(const FaceCoefficient& fc, const DgParameters& params) {
  DgFaceData d{fc.harmonic, fc.w_minus, fc.w_plus};
  if (params.penalty == FaceAverage::arithmetic) {
    d.penalty_alpha = fc.arithmetic;
  }
  if (params.weights == FaceAverage::arithmetic && fc.interior) {
    d.w_minus = 0.5;
    d.w_plus = 0.5;
  }
  return d;
}

ConstrainedSystem assemble_conforming(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f,
                                      int k, const ScalarField& g) {
  auto space = make_space(mesh, SpaceKind::conforming(k));
  Eigen::VectorXd boundary =
      g ? interpolate_nodal(g, space).coefficients() : Eigen::VectorXd::Zero(space->n_dofs());
  return assemble_constrained(space, alpha, f, element_degree(k), std::move(boundary));
}

ConstrainedSystem assemble_cr(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f,
                              const ScalarField& g) {
  auto space = make_space(mesh, SpaceKind::crouzeix_raviart());
  Eigen::VectorXd boundary =
      g ? interpolate_cr(g, space).coefficients() : Eigen::VectorXd::Zero(space->n_dofs());
  return assemble_constrained(space, alpha, f, element_degree(1), std::move(boundary));
}

MixedSystem assemble_mixed(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f) {
  MixedSystem out;
  out.flux_space = make_space(mesh, SpaceKind::raviart_thomas());
  out.scalar_space = make_space(mesh, SpaceKind::discontinuous(0));
  const int nf = out.flux_space->n_dofs();
  const int nk = mesh.num_triangles();
  const int n = nf + nk;

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(nk) * 15);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const TriangleRule& mass_rule = triangle_rule(2);
  const TriangleRule& load_rule = triangle_rule(element_degree(1));
  std::array<Point, 3> phi;
  std::array<double, 3> div{};
  for (int k = 0; k < nk; ++k) {
    const ElementGeometry& geo = out.flux_space->geometry(k);
    const auto ed = out.flux_space->dofs().element(k);
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (std::size_t q = 0; q < mass_rule.points.size(); ++q) {
      const double w = 2.0 * geo.area * mass_rule.weights[q] / alpha.element(k);
      out.flux_space->vector_values(k, mass_rule.points[q], phi);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          m(i, j) += w * phi[i].dot(phi[j]);
        }
      }
    }
    out.flux_space->divergences(k, div);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        triplets.push_back({ed[i], ed[j], m(i, j)});
      }
      const double b = div[i] * geo.area;
      triplets.push_back({nf + k, ed[i], b});
      triplets.push_back({ed[i], nf + k, b});
    }
    double load = 0.0;
    for (std::size_t q = 0; q < load_rule.points.size(); ++q) {
      load += 2.0 * geo.area * load_rule.weights[q] * f(geo.map(load_rule.points[q]));
    }
    rhs[nf + k] = load;
  }
  out.system.matrix = CsrMatrix::from_triplets(n, n, std::move(triplets));
  out.system.rhs = std::move(rhs);
  out.system.structure = Structure::saddle_point;
  out.system.n_flux = nf;
  out.system.n_scalar = nk;
  return out;
}

DgSystem assemble_dg(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f, int k,
                     const DgParameters& params, const ScalarField& g) {
  if (!(params.gamma > 0.0)) {
    throw ParameterError(fmt::format("DG penalty gamma must be positive, got {}", params.gamma));
  }
  DgSystem out;
  out.space = make_space(mesh, SpaceKind::discontinuous(k));
  const FeSpace& space = *out.space;
  const int nloc = space.dofs().local_dofs();
  const int n = space.n_dofs();
  const FaceCoefficients fcs = face_coefficients(mesh, alpha);

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_triangles()) * nloc * nloc +
                   static_cast<std::size_t>(mesh.num_faces()) * 4 * nloc * nloc);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  LocalMatrix a;
  LocalVector b;
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    scalar_element(space, e, alpha.element(e), f, element_degree(k), a, b);
    const auto ed = space.dofs().element(e);
    for (int i = 0; i < nloc; ++i) {
      rhs[ed[i]] += b[i];
      for (int j = 0; j < nloc; ++j) {
        triplets.push_back({ed[i], ed[j], a(i, j)});
      }
    }
  }

  const EdgeRule& rule = edge_rule(element_degree(k));
  std::array<double, kMaxLocal> phi{};
  std::array<Point, kMaxLocal> grad;
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& face = mesh.face(fi);
    const DgFaceData fd = dg_face_data(fcs[fi], params);
    const double penalty = params.gamma * fd.penalty_alpha / face.length;
    const std::array<int, 2> sides{face.k_minus, face.k_plus};
    const int nsides = face.is_boundary() ? 1 : 2;
    const int m = nsides * nloc;
    LocalMatrix local = LocalMatrix::Zero(m, m);
    LocalVector local_rhs = LocalVector::Zero(m);
    LocalVector jmp(m), avg(m);
    const Point& pa = mesh.vertex(face.vertices[0]);
    const Point& pb = mesh.vertex(face.vertices[1]);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      const Point x = (1.0 - t) * pa + t * pb;
      const double w = rule.weights[q] * face.length;
      for (int s = 0; s < nsides; ++s) {
        const int el = sides[s];
        const Barycentric bc = space.geometry(el).barycentric(x);
        space.values(bc, std::span(phi).first(nloc));
        space.gradients(el, bc, std::span(grad).first(nloc));
        const double sign = s == 0 ? 1.0 : -1.0;
        const double weight = (s == 0 ? fd.w_minus : fd.w_plus) * alpha.element(el);
        for (int i = 0; i < nloc; ++i) {
          jmp[s * nloc + i] = sign * phi[i];
          avg[s * nloc + i] = weight * grad[i].dot(face.normal);
        }
      }
      local.noalias() += w * (penalty * jmp * jmp.transpose() - jmp * avg.transpose() - avg * jmp.transpose());
      if (face.is_boundary() && g) {
        local_rhs += w * g(x) * (penalty * jmp - avg);
      }
    }
    for (int s = 0; s < nsides; ++s) {
      const auto ds = space.dofs().element(sides[s]);
      for (int i = 0; i < nloc; ++i) {
        rhs[ds[i]] += local_rhs[s * nloc + i];
        for (int r = 0; r < nsides; ++r) {
          const auto dr = space.dofs().element(sides[r]);
          for (int j = 0; j < nloc; ++j) {
            triplets.push_back({ds[i], dr[j], local(s * nloc + i, r * nloc + j)});
          }
        }
      }
    }
  }
  out.system.matrix = CsrMatrix::from_triplets(n, n, std::move(triplets));
  out.system.rhs = std::move(rhs);
  out.system.structure = Structure::spd;
  return out;
}

double apply_dg_form(const Mesh& mesh, const CoefficientField& alpha, const DgParameters& params,
                     const FeFunction& u, const FeFunction& v) {
  if (!(u.space().kind() == v.space().kind()) || u.space().kind().family != Family::discontinuous) {
    throw std::invalid_argument("apply_dg_form needs two functions in the same DG space");
  }
  const int k = u.space().kind().degree;
  double total = 0.0;
  const TriangleRule& tri = triangle_rule(element_degree(k));
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const double area = u.space().geometry(e).area;
    for (std::size_t q = 0; q < tri.points.size(); ++q) {
      total += 2.0 * area * tri.weights[q] * alpha.element(e) *
               u.gradient(e, tri.points[q]).dot(v.gradient(e, tri.points[q]));
    }
  }

  const FaceCoefficients fcs = face_coefficients(mesh, alpha);
  const EdgeRule& rule = edge_rule(element_degree(k));
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& face = mesh.face(fi);
    const FaceCoefficient& fc = fcs[fi];
    const DgFaceData fd = dg_face_data(fc, params);
    const Point& pa = mesh.vertex(face.vertices[0]);
    const Point& pb = mesh.vertex(face.vertices[1]);
    const ElementGeometry& gm = u.space().geometry(face.k_minus);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      const Point x = (1.0 - t) * pa + t * pb;
      const Barycentric bm = gm.barycentric(x);
      const double um = u.value(face.k_minus, bm), vm = v.value(face.k_minus, bm);
      const double fum = alpha.element(face.k_minus) * u.gradient(face.k_minus, bm).dot(face.normal);
      const double fvm = alpha.element(face.k_minus) * v.gradient(face.k_minus, bm).dot(face.normal);
      double up = 0.0, vp = 0.0, fup = 0.0, fvp = 0.0;
      if (!face.is_boundary()) {
        const Barycentric bp = u.space().geometry(face.k_plus).barycentric(x);
        up = u.value(face.k_plus, bp);
        vp = v.value(face.k_plus, bp);
        fup = alpha.element(face.k_plus) * u.gradient(face.k_plus, bp).dot(face.normal);
        fvp = alpha.element(face.k_plus) * v.gradient(face.k_plus, bp).dot(face.normal);
      }
      FaceCoefficient weights = fc;
      weights.w_minus = fd.w_minus;
      weights.w_plus = fd.w_plus;
      const double ju = jump(fc, um, up), jv = jump(fc, vm, vp);
      const double flux_u = weighted_average(weights, fum, fup);
      const double flux_v = weighted_average(weights, fvm, fvp);
      total += rule.weights[q] * face.length *
               (params.gamma * fd.penalty_alpha / face.length * ju * jv - flux_u * jv - flux_v * ju);
    }
  }
  return total;
}

}  // namespace ifem
