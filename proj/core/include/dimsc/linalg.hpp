#ifndef DIMSC_LINALG_HPP
#define DIMSC_LINALG_HPP

#include "dimsc/types.hpp"

namespace dimsc {

/// Deterministic top-K singular value decomposition.
///
/// Below the dense cutoff (min dimension <= 5000) the full matrix is
/// decomposed by dense bidiagonalization and truncated; above it a seeded
/// block power iteration runs to `tol` with at most 500 sweeps. Singular
/// vector signs are canonicalized so the first entry of each left vector
/// with magnitude above 1e-12 is positive, making the result a pure
/// function of the input.
///
/// Throws DimensionError when K exceeds min(rows, cols) and
/// RankDeficiencyError when sigma_K falls below 1e-12. Singular values tied
/// within 1e-12 keep the underlying solver's subspace order, which is not
/// canonical across platforms.
SpectralDecomposition truncated_svd(const Matrix& m, Index k,
                                    double tol = 1e-10);

struct RowNormalized {
  Matrix rows;
  std::vector<Index> degenerate;  // indices of zero rows, kept as zero
};

/// Scale every nonzero row to unit Euclidean norm. Zero rows stay zero and
/// are reported, not thrown.
RowNormalized row_normalize(const Matrix& u);

/// X * X' with exact symmetry.
Matrix gram_rows(const Matrix& x);

namespace detail {

// Block power iteration path, exposed for direct testing. Start subspace is
// drawn from a fixed internal seed so repeated calls are bit-identical.
SpectralDecomposition truncated_svd_power(const Matrix& m, Index k,
                                          double tol, int max_iter);

void canonicalize_signs(Matrix& u, Matrix& v);

}  // namespace detail

}  // namespace dimsc

#endif
