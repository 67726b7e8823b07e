#include "ifem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ifem {

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::out_of_range("triplet index outside the matrix");
    }
  }
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& l = triplets[a];
    const auto& r = triplets[b];
    return l.row != r.row ? l.row < r.row : l.col < r.col;
  });

  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(rows + 1, 0);
  for (std::size_t n = 0; n < order.size();) {
    const Triplet& first = triplets[order[n]];
    double sum = 0.0;
    std::size_t e = n;
    while (e < order.size() && triplets[order[e]].row == first.row && triplets[order[e]].col == first.col) {
      sum += triplets[order[e]].value;
      ++e;
    }
    m.col_index_.push_back(first.col);
    m.values_.push_back(sum);
    ++m.row_ptr_[first.row + 1];
    n = e;
  }
  for (int i = 0; i < rows; ++i) {
    m.row_ptr_[i + 1] += m.row_ptr_[i];
  }
  return m;
}

CsrMatrix CsrMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 1.0});
  }
  return from_triplets(n, n, std::move(t));
}

double CsrMatrix::at(int i, int j) const {
  const auto begin = col_index_.begin() + row_ptr_[i];
  const auto end = col_index_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return it != end && *it == j ? values_[it - col_index_.begin()] : 0.0;
}

Eigen::VectorXd CsrMatrix::diagonal() const {
  Eigen::VectorXd d(std::min(rows_, cols_));
  for (int i = 0; i < d.size(); ++i) {
    d[i] = at(i, i);
  }
  return d;
}

void CsrMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.resize(rows_);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      s += values_[p] * x[col_index_[p]];
    }
    y[i] = s;
  }
}

Eigen::VectorXd CsrMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  multiply(x, y);
  return y;
}

double CsrMatrix::symmetry_defect() const {
  if (rows_ != cols_) {
    return INFINITY;
  }
  double scale = 0.0, defect = 0.0;
  for (int i = 0; i < rows_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      scale = std::max(scale, std::abs(values_[p]));
      defect = std::max(defect, std::abs(values_[p] - at(col_index_[p], i)));
    }
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      d(i, col_index_[p]) = values_[p];
    }
  }
  return d;
}

}  // namespace ifem
