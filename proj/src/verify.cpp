#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include <fmt/format.h>

#include "ifem/errors.hpp"
#include "ifem/quadrature.hpp"
#include "ifem/solvers.hpp"
#include "ifem/study.hpp"

namespace ifem {

namespace {

using Rng = std::mt19937_64;

struct Check {
  InvariantResult r;

  Check(std::string name, double threshold) {
    r.name = std::move(name);
    r.threshold = threshold;
  }
  // Records a residual that must stay at or below the threshold.
  void below(double residual, const std::string& where) {
    if (!(residual <= r.threshold) && r.passed) {
      r.passed = false;
      r.detail = fmt::format("{}: {:.3e}", where, residual);
    }
    if (!(residual <= r.worst)) {
      r.worst = residual;
    }
  }
  // Records a value that must stay at or above the threshold; `worst` is the minimum seen.
  void above(double value, const std::string& where, bool first) {
    if (first || value < r.worst) {
      r.worst = value;
    }
    if (!(value >= r.threshold) && r.passed) {
      r.passed = false;
      r.detail = fmt::format("{}: {:.3e}", where, value);
    }
  }
};

struct Layout {
  std::string name;
  double jump;
};

const std::vector<Layout>& test_layouts() {
  static const std::vector<Layout> layouts{
      {"uniform", 1.0}, {"halves", 1e6}, {"stripes", 1e-4}, {"checkerboard4", 1e6}, {"checkerboard8", 1e3}};
  return layouts;
}

struct TestMesh {
  Mesh mesh;
  CoefficientField alpha;
};

TestMesh test_mesh(const Layout& l, int n) {
  const auto layout = named_layout(l.name, Rectangle{}, 1.0, l.jump);
  Mesh m = build_structured_square(n, layout.geometry);
  CoefficientField a = CoefficientField::from_subdomains(m, layout.values);
  return {std::move(m), std::move(a)};
}

Eigen::VectorXd random_vector(int n, Rng& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = d(rng);
  }
  return v;
}

FaceCoefficient faulty(FaceCoefficient fc, double fault) {
  if (fc.interior) {
    fc.w_minus += fault;
  }
  return fc;
}

// int_K div(I_rt tau) = int_dK tau . n for a cubic field, against its element mean computed by quadrature.
InvariantResult commutativity(const StudyConfig&) {
  Check c("commutativity", 1e-11);
  const VectorField tau = [](const Point& p) {
    return Point(p.x() * p.x() * p.x() + p.y() * p.y(), p.x() * p.y() * p.y() - p.x() * p.x());
  };
  const ScalarField div = [](const Point& p) { return 3.0 * p.x() * p.x() + 2.0 * p.x() * p.y(); };
  const TriangleRule& rule = triangle_rule(4);
  for (int n : {2, 4, 8}) {
    const Mesh m = build_structured_square(n, SubdomainLayout{});
    const auto pi = interpolate_rt0(tau, make_space(m, SpaceKind::raviart_thomas()));
    for (int k = 0; k < m.num_triangles(); ++k) {
      const auto& g = pi.space().geometry(k);
      double mean = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        mean += 2.0 * rule.weights[q] * div(g.map(rule.points[q]));
      }
      c.below(std::abs(pi.divergence(k) - mean) / (1.0 + std::abs(mean)), fmt::format("n={} element {}", n, k));
    }
  }
  return c.r;
}

InvariantResult jump_identity(const StudyConfig& cfg) {
  Check c("jump_identity", 1e-14);
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> e(-8.0, 8.0), v(-1.0, 1.0);
  for (int s = 0; s < 100000; ++s) {
    const bool boundary = s % 10 == 0;
    const FaceCoefficient fc = boundary ? FaceCoefficient::boundary_face(std::pow(10.0, e(rng)))
                                        : faulty(FaceCoefficient::interior_face(std::pow(10.0, e(rng)),
                                                                                std::pow(10.0, e(rng))),
                                                 cfg.test_weight_fault);
    const double um = v(rng), up = v(rng), vm = v(rng), vp = v(rng);
    const double lhs = jump(fc, um * vm, up * vp);
    const double rhs = weighted_average(fc, um, up) * jump(fc, vm, vp) + jump(fc, um, up) * dual_weighted_average(fc, vm, vp);
    c.below(std::abs(lhs - rhs), fmt::format("sample {}", s));
  }
  return c.r;
}

// min <= alpha_H <= 2 min and alpha_H <= alpha_A.
InvariantResult average_bounds(const StudyConfig& cfg) {
  Check c("average_bounds", 1e-14);
  Rng rng(cfg.seed + 1);
  std::uniform_real_distribution<double> e(-8.0, 8.0);
  for (int s = 0; s < 100000; ++s) {
    const double am = std::pow(10.0, e(rng)), ap = std::pow(10.0, e(rng));
    const auto fc = FaceCoefficient::interior_face(am, ap);
    const double lo = std::min(am, ap);
    const double excess = std::max({(lo - fc.harmonic) / lo, (fc.harmonic - 2.0 * lo) / lo,
                                    (fc.harmonic - fc.arithmetic) / fc.arithmetic, 0.0});
    c.below(excess, fmt::format("alpha = ({:.3e}, {:.3e})", am, ap));
  }
  return c.r;
}

InvariantResult weight_normalization(const StudyConfig& cfg) {
  Check c("weight_normalization", 1e-14);
  for (const auto& l : test_layouts()) {
    const TestMesh t = test_mesh(l, 8);
    const auto fcs = face_coefficients(t.mesh, t.alpha);
    for (int f = 0; f < t.mesh.num_faces(); ++f) {
      const FaceCoefficient fc = faulty(fcs[f], cfg.test_weight_fault);
      if (fc.interior) {
        c.below(std::abs(fc.w_minus + fc.w_plus - 1.0), fmt::format("{} face {}", l.name, f));
      }
    }
  }
  return c.r;
}

InvariantResult weight_bound(const StudyConfig& cfg) {
  Check c("weight_bound", std::sqrt(2.0) / 2.0 + 1e-12);
  for (const auto& l : test_layouts()) {
    const TestMesh t = test_mesh(l, 8);
    const auto fcs = face_coefficients(t.mesh, t.alpha);
    for (int f = 0; f < t.mesh.num_faces(); ++f) {
      const FaceCoefficient fc = faulty(fcs[f], cfg.test_weight_fault);
      if (fc.interior) {
        c.below(std::max(fc.weight_bound_value(true), fc.weight_bound_value(false)), fmt::format("{} face {}", l.name, f));
      }
    }
  }
  return c.r;
}

InvariantResult cr_face_means(const StudyConfig& cfg) {
  Check c("cr_face_means", 1e-13);
  Rng rng(cfg.seed + 2);
  const EdgeRule& rule = edge_rule(2);
  const Mesh m = refine_uniform(build_structured_square(4, named_layout("checkerboard4", Rectangle{}, 1, 1e6).geometry));
  auto space = make_space(m, SpaceKind::crouzeix_raviart());
  for (int trial = 0; trial < 5; ++trial) {
    const FeFunction v(space, random_vector(space->n_dofs(), rng));
    for (int f = 0; f < m.num_faces(); ++f) {
      const Face& face = m.face(f);
      if (face.is_boundary()) {
        continue;
      }
      double mean = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Point x = (1 - rule.points[q]) * m.vertex(face.vertices[0]) + rule.points[q] * m.vertex(face.vertices[1]);
        mean += rule.weights[q] * (v.value(face.k_minus, space->geometry(face.k_minus).barycentric(x)) -
                                   v.value(face.k_plus, space->geometry(face.k_plus).barycentric(x)));
      }
      c.below(std::abs(mean), fmt::format("face {}", f));
    }
  }
  return c.r;
}

InvariantResult rt0_normal_continuity(const StudyConfig& cfg) {
  Check c("rt0_normal_continuity", 1e-12);
  Rng rng(cfg.seed + 3);
  const Mesh m = refine_uniform(build_structured_square(4, named_layout("checkerboard4", Rectangle{}, 1, 1e6).geometry));
  auto space = make_space(m, SpaceKind::raviart_thomas());
  for (int trial = 0; trial < 5; ++trial) {
    const FeFunction tau(space, random_vector(space->n_dofs(), rng));
    for (int f = 0; f < m.num_faces(); ++f) {
      const Face& face = m.face(f);
      if (face.is_boundary()) {
        continue;
      }
      for (double t : {0.0, 0.3, 1.0}) {
        const Point x = (1 - t) * m.vertex(face.vertices[0]) + t * m.vertex(face.vertices[1]);
        const double a = tau.vector_value(face.k_minus, space->geometry(face.k_minus).barycentric(x)).dot(face.normal);
        const double b = tau.vector_value(face.k_plus, space->geometry(face.k_plus).barycentric(x)).dot(face.normal);
        c.below(std::abs(a - b) / (1.0 + std::abs(a)), fmt::format("face {}", f));
      }
    }
  }
  return c.r;
}

InvariantResult matrix_symmetry(const StudyConfig& cfg) {
  Check c("matrix_symmetry", 1e-13);
  const ScalarField f = [](const Point& p) { return 1.0 + p.x(); };
  for (const auto& l : test_layouts()) {
    const TestMesh t = test_mesh(l, 8);
    c.below(assemble_conforming(t.mesh, t.alpha, f, 1).system.matrix.symmetry_defect(), l.name + " conforming1");
    c.below(assemble_conforming(t.mesh, t.alpha, f, 2).system.matrix.symmetry_defect(), l.name + " conforming2");
    c.below(assemble_cr(t.mesh, t.alpha, f).system.matrix.symmetry_defect(), l.name + " cr");
    c.below(assemble_mixed(t.mesh, t.alpha, f).system.matrix.symmetry_defect(), l.name + " mixed0");
    for (int k = 1; k <= 2; ++k) {
      c.below(assemble_dg(t.mesh, t.alpha, f, k, cfg.dg_parameters(k)).system.matrix.symmetry_defect(),
              fmt::format("{} dg{}", l.name, k));
    }
  }
  return c.r;
}

// a_dg(v, v) / |||v|||_dg^2 over random coefficient vectors and random continuous functions.
InvariantResult dg_coercivity(const StudyConfig& cfg) {
  Check c("dg_coercivity", 0.05);
  Rng rng(cfg.seed + 4);
  const TestMesh t = test_mesh({"checkerboard4", 1e6}, 8);
  const auto fcs = face_coefficients(t.mesh, t.alpha);
  const ScalarField zero = [](const Point&) { return 0.0; };
  const VectorField zero_grad = [](const Point&) { return Point(0.0, 0.0); };
  bool first = true;
  for (int k = 1; k <= 2; ++k) {
    DgParameters params = cfg.dg_parameters(k);
    if (!cfg.gamma && k == 1) {
      params.gamma = 10.0;
    }
    auto space = make_space(t.mesh, SpaceKind::discontinuous(k));
    auto p1 = make_space(t.mesh, SpaceKind::conforming(1));
    for (int s = 0; s < 200; ++s) {
      Eigen::VectorXd x;
      if (s % 2 == 0) {
        x = random_vector(space->n_dofs(), rng);
      } else {
        // continuous piecewise linear plus a small discontinuous perturbation
        const FeFunction cont(p1, random_vector(p1->n_dofs(), rng));
        x = Eigen::VectorXd::Zero(space->n_dofs());
        for (int e = 0; e < t.mesh.num_triangles(); ++e) {
          const auto dofs = space->dofs().element(e);
          const std::array<Barycentric, 6> nodes{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, .5, .5}, {.5, 0, .5}, {.5, .5, 0}}};
          for (std::size_t i = 0; i < dofs.size(); ++i) {
            x[dofs[i]] = cont.value(e, nodes[i]);
          }
        }
        x += 1e-3 * random_vector(space->n_dofs(), rng);
      }
      const FeFunction v(space, x);
      const double a = apply_dg_form(t.mesh, t.alpha, params, v, v);
      const DgError norm = dg_norm_error(t.mesh, t.alpha, fcs, zero, zero_grad, v);
      c.above(a / (norm.dg * norm.dg), fmt::format("dg{} sample {}", k, s), first);
      first = false;
    }
  }
  return c.r;
}

InvariantResult mixed_conservation(const StudyConfig&) {
  Check c("mixed_conservation", 1e-8);
  for (double jump : {1.0, 1e6}) {
    const auto p = problem_interface_1d(jump);
    for (int n : {8, 16}) {
      const Mesh m = p.mesh(n);
      const auto alpha = p.coefficients(m);
      const auto sys = assemble_mixed(m, alpha, p.f);
      const auto r = solve(sys.system);
      if (!r.report.converged) {
        c.below(INFINITY, fmt::format("jump {:g} n={} solver", jump, n));
        continue;
      }
      const auto [sigma, u] = sys.split(r.x);
      for (int k = 0; k < m.num_triangles(); ++k) {
        const double q0f = sys.system.rhs[sys.system.n_flux + k] / m.triangle(k).area;
        c.below(std::abs(sigma.divergence(k) - q0f), fmt::format("jump {:g} n={} element {}", jump, n, k));
      }
    }
  }
  return c.r;
}

InvariantResult problem_catalog(const StudyConfig& cfg) {
  Check c("problem_catalog", 1e-8);
  std::vector<ProblemSpec> problems{problem_smooth_unit(),         problem_interface_1d(1.0), problem_interface_1d(1e2),
                                    problem_interface_1d(1e4),     problem_interface_1d(1e6), problem_piecewise_linear(1e3),
                                    problem_kellogg(0.5),          problem_kellogg(0.25)};
  for (const auto& p : problems) {
    const auto check = verify_problem(p, 200, cfg.seed);
    c.below(check.worst_relative, p.name + " " + check.message);
  }
  return c.r;
}

// Galerkin optimality: conforming energy error <= nodal interpolant error.
InvariantResult galerkin_sandwich(const StudyConfig&) {
  Check c("galerkin_sandwich", 1.0 + 1e-10);
  std::vector<ProblemSpec> problems{problem_smooth_unit(), problem_interface_1d(1e4), problem_kellogg(0.5)};
  for (const auto& p : problems) {
    const Mesh m = p.mesh(8);
    const auto alpha = p.coefficients(m);
    for (int k = 1; k <= 2; ++k) {
      const auto sys = assemble_conforming(m, alpha, p.f, k, p.dirichlet);
      const auto r = solve(sys.system);
      const auto uh = sys.expand(r.x);
      const double e = energy_error(m, alpha, p.grad_exact, uh, p.error_quadrature());
      const double i = energy_error(m, alpha, p.grad_exact, interpolate_nodal(p.u_exact, sys.space), p.error_quadrature());
      c.below(e / i, fmt::format("{} conforming{}", p.name, k));
    }
  }
  return c.r;
}

InvariantResult quadrature_exactness(const StudyConfig&) {
  Check c("quadrature_exactness", 1e-13);
  for (int d = 1; d <= kMaxQuadratureDegree; ++d) {
    const TriangleRule& r = triangle_rule(d);
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.points.size(); ++q) {
          s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
        }
        const double exact = std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
        c.below(std::abs(s - exact), fmt::format("degree {} x^{} y^{}", d, a, b));
      }
    }
  }
  return c.r;
}

using Invariant = std::function<InvariantResult(const StudyConfig&)>;

const std::vector<std::pair<std::string, Invariant>>& registry() {
  static const std::vector<std::pair<std::string, Invariant>> r{
      {"commutativity", commutativity},
      {"jump_identity", jump_identity},
      {"average_bounds", average_bounds},
      {"weight_normalization", weight_normalization},
      {"weight_bound", weight_bound},
      {"cr_face_means", cr_face_means},
      {"rt0_normal_continuity", rt0_normal_continuity},
      {"matrix_symmetry", matrix_symmetry},
      {"dg_coercivity", dg_coercivity},
      {"mixed_conservation", mixed_conservation},
      {"problem_catalog", problem_catalog},
      {"galerkin_sandwich", galerkin_sandwich},
      {"quadrature_exactness", quadrature_exactness},
  };
  return r;
}

}  // namespace

std::vector<std::string> invariant_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) {
    out.push_back(name);
  }
  return out;
}

VerifyReport run_verify(const StudyConfig& cfg) {
  VerifyReport report;
  for (const auto& [name, fn] : registry()) {
    const auto start = std::chrono::steady_clock::now();
    InvariantResult r;
    try {
      r = fn(cfg);
    } catch (const std::exception& e) {
      r.name = name;
      r.passed = false;
      r.worst = INFINITY;
      r.detail = fmt::format("threw: {}", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.invariants.push_back(std::move(r));
  }
  return report;
}

}  // namespace ifem
