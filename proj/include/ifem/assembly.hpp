#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "ifem/coefficients.hpp"
#include "ifem/mesh.hpp"
#include "ifem/sparse.hpp"
#include "ifem/spaces.hpp"

namespace ifem {

/// SPD system on the free (non-Dirichlet) dofs of a conforming or CR space.
struct ConstrainedSystem {
  SparseSystem system;
  std::shared_ptr<const FeSpace> space;
  std::vector<int> free_dofs;        // system row -> global dof
  Eigen::VectorXd boundary_values;   // global vector, nonzero only on Dirichlet dofs

  /// Global function from a solution of `system`.
  FeFunction expand(const Eigen::VectorXd& x) const;
};

/// Saddle-point system [[M, B^T], [B, 0]] for (RT0 flux, piecewise-constant scalar).
/// M is the alpha^{-1}-weighted RT0 mass matrix and B_{K,F} = int_K div(phi_F).
/// The scalar block of the solution holds -u_h.
struct MixedSystem {
  SparseSystem system;
  std::shared_ptr<const FeSpace> flux_space;
  std::shared_ptr<const FeSpace> scalar_space;

  /// (sigma_h, u_h) from a solution of `system`.
  std::pair<FeFunction, FeFunction> split(const Eigen::VectorXd& x) const;
};

struct DgSystem {
  SparseSystem system;
  std::shared_ptr<const FeSpace> space;

  FeFunction expand(const Eigen::VectorXd& x) const;
};

enum class FaceAverage { harmonic, arithmetic };

/// Symmetric interior penalty parameters. The penalty is gamma * alpha_{F,H} / h_F
/// and the consistency terms use the harmonic weights. The arithmetic variants
/// exist only as negative controls for the robustness checks.
struct DgParameters {
  static constexpr double gamma_min = 4.0;

  double gamma = 10.0;
  FaceAverage penalty = FaceAverage::harmonic;
  FaceAverage weights = FaceAverage::harmonic;

  /// gamma = 10 for k = 1, 20 for k = 2.
  static DgParameters for_degree(int k);
};

/// Continuous Pk (k = 1, 2). Dirichlet data g (empty means zero) is interpolated at boundary nodes.
ConstrainedSystem assemble_conforming(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f,
                                      int k, const ScalarField& g = {});

/// Crouzeix-Raviart; boundary face means fixed to the face means of g.
ConstrainedSystem assemble_cr(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f,
                              const ScalarField& g = {});

/// RT0 x P0 mixed method with homogeneous (natural) Dirichlet condition.
MixedSystem assemble_mixed(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f);

/// Weighted SIPG in D_k (k = 1, 2); Dirichlet data g enters through the boundary-face terms.
/// Throws ParameterError for gamma <= 0.
DgSystem assemble_dg(const Mesh& mesh, const CoefficientField& alpha, const ScalarField& f, int k,
                     const DgParameters& params, const ScalarField& g = {});

/// a_dg(u, v) evaluated directly from the two functions by quadrature.
double apply_dg_form(const Mesh& mesh, const CoefficientField& alpha, const DgParameters& params,
                     const FeFunction& u, const FeFunction& v);

/// Per-face penalty coefficient and flux weights actually used by the DG form.
struct DgFaceData {
  double penalty_alpha;
  double w_minus;
  double w_plus;
};
DgFaceData dg_face_data(const FaceCoefficient& fc, const DgParameters& params);

}  // namespace ifem
