#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

namespace oscad {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;
using Field = Eigen::VectorXd;

/// One operator row in active-unknown numbering.
struct SparseRow {
  std::vector<int> cols;
  std::vector<double> vals;

  void add(int col, double v) {
    cols.push_back(col);
    vals.push_back(v);
  }
  double apply(const Field& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) s += vals[k] * x[cols[k]];
    return s;
  }
};

/// Copy of A with the listed rows emptied.
SparseMatrix mask_rows(const SparseMatrix& A, const std::vector<char>& mask);
/// Copy of A with the listed rows replaced by the given rows.
SparseMatrix replace_rows(const SparseMatrix& A, const std::vector<int>& rows, const std::vector<SparseRow>& repl);
SparseMatrix identity(int n);
double inf_norm(const SparseMatrix& A);

}  // namespace oscad
