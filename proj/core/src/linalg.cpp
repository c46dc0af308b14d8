#include "dimsc/linalg.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "dimsc/errors.hpp"
#include "dimsc/rng.hpp"

namespace dimsc {

namespace {

constexpr double kRankFloor = 1e-12;
constexpr Index kDenseCutoff = 5000;

void check_finite(const Matrix& m, const char* who) {
  if (!m.allFinite()) {
    throw DomainError(std::string(who) + ": input has non-finite entries");
  }
}

SpectralDecomposition truncate(const Matrix& u_full, const Vector& s_full,
                               const Matrix& v_full, Index k) {
  for (Index i = 0; i < k; ++i) {
    if (s_full(i) < kRankFloor) {
      throw RankDeficiencyError(
          "truncated_svd: singular value at index " + std::to_string(i) +
          " is " + std::to_string(s_full(i)) + ", below the 1e-12 rank floor");
    }
  }
  SpectralDecomposition d;
  d.u = u_full.leftCols(k);
  d.sigma = s_full.head(k);
  d.v = v_full.leftCols(k);
  detail::canonicalize_signs(d.u, d.v);
  return d;
}

}  // namespace

namespace detail {

void canonicalize_signs(Matrix& u, Matrix& v) {
  for (Index k = 0; k < u.cols(); ++k) {
    for (Index i = 0; i < u.rows(); ++i) {
      if (std::abs(u(i, k)) > 1e-12) {
        if (u(i, k) < 0) {
          u.col(k) = -u.col(k);
          v.col(k) = -v.col(k);
        }
        break;
      }
    }
  }
}

SpectralDecomposition truncated_svd_power(const Matrix& m, Index k,
                                          double tol, int max_iter) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  const bool tall = rows >= cols;
  const Index dim = tall ? cols : rows;  // side carrying the iteration

  // Fixed-seed start so the whole routine is a pure function of (m, k).
  Rng rng(0x5eedf00dULL);
  Matrix block(dim, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < dim; ++i) {
      block(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  block = Eigen::HouseholderQR<Matrix>(block).householderQ() *
          Matrix::Identity(dim, k);

  Vector ritz_prev = Vector::Zero(k);
  for (int it = 0; it < max_iter; ++it) {
    // One sweep of the Gram operator on the smaller side.
    Matrix next = tall ? Matrix(m.transpose() * (m * block))
                       : Matrix(m * (m.transpose() * block));
    block = Eigen::HouseholderQR<Matrix>(next).householderQ() *
            Matrix::Identity(dim, k);
    Matrix proj = tall ? Matrix(m * block) : Matrix(m.transpose() * block);
    Vector ritz = proj.colwise().norm();
    double change = (ritz - ritz_prev).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, ritz.maxCoeff());
    ritz_prev = ritz;
    if (change <= tol * scale) {
      break;
    }
  }

  // Rotate within the converged subspace by a small dense SVD.
  Matrix proj = tall ? Matrix(m * block) : Matrix(m.transpose() * block);
  Eigen::JacobiSVD<Matrix> small(proj,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix u_full, v_full;
  if (tall) {
    u_full = small.matrixU();
    v_full = block * small.matrixV();
  } else {
    v_full = small.matrixU();
    u_full = block * small.matrixV();
  }
  return truncate(u_full, small.singularValues(), v_full, k);
}

}  // namespace detail

SpectralDecomposition truncated_svd(const Matrix& m, Index k, double tol) {
  check_finite(m, "truncated_svd");
  if (k < 1 || k > std::min(m.rows(), m.cols())) {
    throw DimensionError("truncated_svd: K=" + std::to_string(k) +
                         " exceeds matrix dimensions " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  if (std::min(m.rows(), m.cols()) > kDenseCutoff) {
    return detail::truncated_svd_power(m, k, tol, 500);
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return truncate(svd.matrixU(), svd.singularValues(), svd.matrixV(), k);
}

RowNormalized row_normalize(const Matrix& u) {
  check_finite(u, "row_normalize");
  RowNormalized out;
  out.rows = u;
  for (Index i = 0; i < u.rows(); ++i) {
    double norm = u.row(i).norm();
    if (norm == 0.0) {
      out.degenerate.push_back(i);
    } else {
      out.rows.row(i) /= norm;
    }
  }
  return out;
}

Matrix gram_rows(const Matrix& x) {
  check_finite(x, "gram_rows");
  Matrix g = Matrix::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x);
  g.triangularView<Eigen::StrictlyUpper>() =
      g.transpose().triangularView<Eigen::StrictlyUpper>();
  return g;
}

}  // namespace dimsc
