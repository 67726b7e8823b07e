#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "ifem/sparse.hpp"

namespace ifem {

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // ||b - A x|| / ||b||, recomputed from x
  bool converged = false;
};

struct SolveResult {
  Eigen::VectorXd x;
  SolveReport report;
};

struct SolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 0;  // 0 means 20 * n
};

/// Jacobi-preconditioned conjugate gradients from x0 = 0.
SolveResult solve_spd(const SparseSystem& sys, const SolverOptions& options = {});

/// Preconditioned MINRES from x0 = 0 with the block-diagonal preconditioner
/// diag(diag(M), diag(B diag(M)^{-1} B^T)). The preconditioned residual norm is
/// nonincreasing; termination is decided on the true relative residual.
SolveResult solve_saddle(const SparseSystem& sys, const SolverOptions& options = {});

/// Dispatches on sys.structure.
SolveResult solve(const SparseSystem& sys, const SolverOptions& options = {});

/// Dense LU solve for n <= 2000, used as an independent reference.
Eigen::VectorXd solve_dense(const SparseSystem& sys);

double relative_residual(const CsrMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Smallest v^T A v / v^T v over `samples` random vectors (positive for SPD matrices).
double positivity_probe(const CsrMatrix& a, int samples, std::uint64_t seed);

}  // namespace ifem
