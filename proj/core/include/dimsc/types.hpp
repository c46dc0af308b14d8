#ifndef DIMSC_TYPES_HPP
#define DIMSC_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace dimsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sparse 0/1 matrix stored as a row-major sorted list of 1-coordinates.
/// Round-trips with the dense representation exactly.
struct BinaryAdjacency {
  Index rows = 0;
  Index cols = 0;
  std::vector<std::pair<Index, Index>> ones;  // sorted, unique

  static BinaryAdjacency from_dense(const Matrix& dense);
  Matrix to_dense() const;
  BinaryAdjacency transposed() const;

  Index nnz() const { return static_cast<Index>(ones.size()); }
  std::vector<Index> row_sums() const;
  std::vector<Index> col_sums() const;

  bool operator==(const BinaryAdjacency& other) const = default;
};

/// Top-K compact SVD: u has orthonormal columns (n_r x K), sigma holds the
/// positive singular values in non-increasing order, v has orthonormal
/// columns (n_c x K).
struct SpectralDecomposition {
  Matrix u;
  Vector sigma;
  Matrix v;

  Matrix lambda() const { return Matrix(sigma.asDiagonal()); }
};

using CornerIndexSet = std::vector<Index>;

}  // namespace dimsc

#endif
