#pragma once

#include <vector>

#include <Eigen/Core>

namespace ifem {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Duplicates are summed in insertion order, so the result does not depend
  /// on anything but the triplet sequence.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static CsrMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_index() const { return col_index_; }
  const std::vector<double>& values() const { return values_; }

  /// Entry (i, j), zero if not stored.
  double at(int i, int j) const;
  Eigen::VectorXd diagonal() const;
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  /// max |a_ij - a_ji| / max |a_ij|.
  double symmetry_defect() const;
  Eigen::MatrixXd to_dense() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_index_;
  std::vector<double> values_;
};

enum class Structure { spd, saddle_point };

/// Symmetric linear system. For saddle points the unknowns are ordered
/// (flux block of size n_flux, scalar block of size n_scalar).
struct SparseSystem {
  CsrMatrix matrix;
  Eigen::VectorXd rhs;
  Structure structure = Structure::spd;
  int n_flux = 0;
  int n_scalar = 0;

  int size() const { return matrix.rows(); }
};

}  // namespace ifem
