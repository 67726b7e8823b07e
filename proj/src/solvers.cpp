#include "ifem/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace ifem {

namespace {

int iteration_cap(const SparseSystem& sys, const SolverOptions& options) {
  return options.max_iterations > 0 ? options.max_iterations : 20 * std::max(1, sys.size());
}

}  // namespace

double relative_residual(const CsrMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const Eigen::VectorXd r = b - a * x;
  return nb > 0.0 ? r.norm() / nb : r.norm();
}

SolveResult solve_spd(const SparseSystem& sys, const SolverOptions& options) {
  const CsrMatrix& a = sys.matrix;
  const Eigen::VectorXd& b = sys.rhs;
  const int n = sys.size();
  SolveResult out{Eigen::VectorXd::Zero(n), {}};
  const double nb = b.norm();
  if (nb == 0.0) {
    out.report.converged = true;
    return out;
  }
  const Eigen::VectorXd dinv = a.diagonal().cwiseInverse();
  Eigen::VectorXd& x = out.x;
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = dinv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(n);
  double rz = r.dot(z);
  const int cap = iteration_cap(sys, options);
  int it = 0;
  while (it < cap) {
    ++it;
    a.multiply(p, ap);
    const double step = rz / p.dot(ap);
    x += step * p;
    r -= step * ap;
    if (r.norm() <= options.tolerance * nb) {
      // guard against drift of the recursive residual
      r = b - a * x;
      if (r.norm() <= options.tolerance * nb) {
        break;
      }
      z = dinv.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
      continue;
    }
    z = dinv.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  out.report.iterations = it;
  out.report.final_residual = relative_residual(a, x, b);
  out.report.converged = out.report.final_residual <= options.tolerance;
  return out;
}

SolveResult solve_saddle(const SparseSystem& sys, const SolverOptions& options) {
  const CsrMatrix& a = sys.matrix;
  const Eigen::VectorXd& b = sys.rhs;
  const int n = sys.size();
  SolveResult out{Eigen::VectorXd::Zero(n), {}};
  const double nb = b.norm();
  if (nb == 0.0) {
    out.report.converged = true;
    return out;
  }

  // block-diagonal preconditioner: diag(M) and the diagonal Schur estimate
  const int nf = sys.n_flux;
  Eigen::VectorXd pdiag = a.diagonal();
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_index();
  const auto& val = a.values();
  for (int i = nf; i < n; ++i) {
    double s = 0.0;
    for (int q = rp[i]; q < rp[i + 1]; ++q) {
      if (ci[q] < nf) {
        s += val[q] * val[q] / pdiag[ci[q]];
      }
    }
    pdiag[i] = s;
  }
  if ((pdiag.array() <= 0.0).any()) {
    throw std::invalid_argument("saddle-point preconditioner has a non-positive diagonal entry");
  }
  const Eigen::VectorXd pinv = pdiag.cwiseInverse();

  Eigen::VectorXd& x = out.x;
  Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = b;
  Eigen::VectorXd z = pinv.cwiseProduct(v);
  double gamma = std::sqrt(v.dot(z));
  double gamma_prev = 1.0;
  double eta = gamma;
  const double eta0 = gamma;
  double s_prev = 0.0, s = 0.0, c_prev = 1.0, c = 1.0;
  Eigen::VectorXd w_prev = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd az(n), v_next(n), z_next(n), w_next(n);

  // ratio between the true residual and the preconditioned estimate, refined on each check
  double scale = 1.0;
  const int cap = iteration_cap(sys, options);
  int it = 0;
  bool done = false;
  while (it < cap && !done) {
    ++it;
    z /= gamma;
    a.multiply(z, az);
    const double delta = az.dot(z);
    v_next = az - (delta / gamma) * v - (gamma / gamma_prev) * v_prev;
    z_next = pinv.cwiseProduct(v_next);
    const double gamma_next = std::sqrt(std::max(0.0, v_next.dot(z_next)));

    const double a0 = c * delta - c_prev * s * gamma;
    const double a1 = std::sqrt(a0 * a0 + gamma_next * gamma_next);
    const double a2 = s * delta + c_prev * c * gamma;
    const double a3 = s_prev * gamma;
    const double c_next = a0 / a1;
    const double s_next = gamma_next / a1;
    w_next = (z - a3 * w_prev - a2 * w) / a1;
    x += c_next * eta * w_next;
    eta = -s_next * eta;

    if (gamma_next == 0.0 || std::abs(eta) / eta0 * scale <= options.tolerance) {
      const double true_res = relative_residual(a, x, b);
      if (true_res <= options.tolerance || gamma_next == 0.0) {
        done = true;
      } else if (std::abs(eta) > 0.0) {
        scale = std::max(scale, 1.1 * true_res * eta0 / std::abs(eta));
      }
    }

    v_prev.swap(v);
    v.swap(v_next);
    z.swap(z_next);
    w_prev.swap(w);
    w.swap(w_next);
    gamma_prev = gamma;
    gamma = gamma_next;
    s_prev = s;
    s = s_next;
    c_prev = c;
    c = c_next;
  }
  out.report.iterations = it;
  out.report.final_residual = relative_residual(a, x, b);
  out.report.converged = out.report.final_residual <= options.tolerance;
  return out;
}

SolveResult solve(const SparseSystem& sys, const SolverOptions& options) {
  return sys.structure == Structure::spd ? solve_spd(sys, options) : solve_saddle(sys, options);
}

Eigen::VectorXd solve_dense(const SparseSystem& sys) {
  if (sys.size() > 2000) {
    throw std::invalid_argument(fmt::format("dense reference solve limited to n <= 2000, got {}", sys.size()));
  }
  return sys.matrix.to_dense().partialPivLu().solve(sys.rhs);
}

double positivity_probe(const CsrMatrix& a, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double lowest = INFINITY;
  Eigen::VectorXd v(a.rows());
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < v.size(); ++i) {
      v[i] = normal(rng);
    }
    lowest = std::min(lowest, v.dot(a * v) / v.squaredNorm());
  }
  return lowest;
}

}  // namespace ifem
