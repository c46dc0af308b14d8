#include "dimsc/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dimsc/corners.hpp"
#include "dimsc/errors.hpp"
#include "dimsc/linalg.hpp"

namespace dimsc {

namespace {

constexpr double kCondLimit = 1e8;

Matrix select_rows(const Matrix& m, const CornerIndexSet& idx) {
  Matrix out(static_cast<Index>(idx.size()), m.cols());
  for (size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Index>(i)) = m.row(idx[i]);
  }
  return out;
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return svd.singularValues()(0) / smin;
}

struct ClipOutcome {
  Matrix pi;
  Vector l1;  // row l1 norms after clipping
  Index clipped = 0;
  Index uniform_rows = 0;
};

// max(0, z) row-wise, then divide each row by its l1 norm. Rows that clip
// to zero get the uniform PMF and are counted.
ClipOutcome clip_and_normalize(const Matrix& z) {
  const Index n = z.rows();
  const Index k = z.cols();
  ClipOutcome out;
  out.pi.resize(n, k);
  out.l1.resize(n);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Index j = 0; j < k; ++j) {
      double v = z(i, j);
      if (v < 0.0) {
        ++out.clipped;
        v = 0.0;
      }
      out.pi(i, j) = v;
      sum += v;
    }
    out.l1(i) = sum;
    if (sum > 0.0) {
      out.pi.row(i) /= sum;
    } else {
      ++out.uniform_rows;
      out.pi.row(i).setConstant(1.0 / static_cast<double>(k));
    }
  }
  return out;
}

}  // namespace

RowRecovery recover_row_memberships(const Matrix& u, const Vector& sigma,
                                    const Matrix& v, const Matrix& u_star,
                                    const CornerIndexSet& i_r,
                                    const CornerIndexSet& i_c) {
  const Index k = u.cols();
  Matrix corners = select_rows(u_star, i_r);  // K x K

  RowRecovery out;
  out.corner_cond = condition_number(corners);
  if (!(out.corner_cond <= kCondLimit)) {
    throw IllConditionedError(
        "recover_row_memberships: corner matrix condition number " +
        std::to_string(out.corner_cond) + " exceeds 1e8");
  }

  Vector j_diag =
      (corners * sigma.asDiagonal() * select_rows(v, i_c).transpose())
          .diagonal();
  for (Index a = 0; a < k; ++a) {
    if (j_diag(a) < 0.0) {
      j_diag(a) = 0.0;
      ++out.clamped_j_diag;
    }
  }

  // Y* = U * corners^{-1} via a direct K x K solve.
  Matrix y_star =
      corners.transpose().partialPivLu().solve(u.transpose()).transpose();
  out.z_raw = y_star * j_diag.asDiagonal();

  ClipOutcome clipped = clip_and_normalize(out.z_raw);
  out.pi_r = std::move(clipped.pi);
  out.theta = std::move(clipped.l1);
  out.clipped_entries = clipped.clipped;
  out.uniform_rows = clipped.uniform_rows;
  return out;
}

ColRecovery recover_col_memberships(const Matrix& v,
                                    const CornerIndexSet& i_c) {
  Matrix corners = select_rows(v, i_c);  // K x K

  ColRecovery out;
  out.corner_cond = condition_number(corners);
  if (!(out.corner_cond <= kCondLimit)) {
    throw IllConditionedError(
        "recover_col_memberships: corner matrix condition number " +
        std::to_string(out.corner_cond) + " exceeds 1e8");
  }

  out.z_raw =
      corners.transpose().partialPivLu().solve(v.transpose()).transpose();
  ClipOutcome clipped = clip_and_normalize(out.z_raw);
  out.pi_c = std::move(clipped.pi);
  out.clipped_entries = clipped.clipped;
  out.uniform_rows = clipped.uniform_rows;
  return out;
}

ThetaCorners recover_theta_corners(const Matrix& u, const Vector& sigma,
                                   const Matrix& v, const CornerIndexSet& i_r,
                                   const CornerIndexSet& i_c) {
  ThetaCorners out;
  out.values = (select_rows(u, i_r) * sigma.asDiagonal() *
                select_rows(v, i_c).transpose())
                   .diagonal();
  out.identifiability_warning = (out.values.array() < 0).any();
  return out;
}

namespace {

// The k-th row corner and k-th column corner must be pure in the same
// community for J* = diag(U*(I_r,:) Lambda V'(I_c,:)) to carry the unit
// diagonal of P; the two hunts return their sets in unrelated orders.
// The pairing is a gauge of the model (every pairing admits an eligible
// parameter set reproducing Omega), so reorder i_c by the pairing that
// maximizes the product of matched entries of W = U*(I_r,:) Lambda V'(I_c,:).
// When every off-diagonal of P is below its unit diagonal this selects the
// generating pairing; when the off-diagonals tie above 1 the maximizer is a
// derangement whose uniform column scale cancels in row normalization.
CornerIndexSet align_column_corners(const Matrix& u, const Vector& sigma,
                                    const Matrix& v, const Matrix& u_star,
                                    const CornerIndexSet& i_r,
                                    const CornerIndexSet& i_c) {
  const Index k = u.cols();
  if (k == 1 || k > 8) {
    return i_c;  // single pairing, or beyond the exhaustive range
  }

  Matrix corners_r = select_rows(u_star, i_r);  // K x K
  Matrix corners_c = select_rows(v, i_c);       // K x K
  Matrix w = corners_r * sigma.asDiagonal() * corners_c.transpose();

  std::vector<Index> perm(k), best_perm(k);
  for (Index i = 0; i < k; ++i) perm[i] = i;
  best_perm = perm;
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    double score = 0.0;
    bool usable = true;
    for (Index a = 0; a < k && usable; ++a) {
      double matched = w(a, perm[a]);
      if (matched <= 0.0) {
        usable = false;
      } else {
        score += std::log(matched);
      }
    }
    // Strict improvement keeps the lexicographically first maximizer; the
    // identity pairing is the overall fallback when none is usable.
    if (usable && score > best_score) {
      best_score = score;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  CornerIndexSet aligned(k);
  for (Index a = 0; a < k; ++a) {
    aligned[a] = i_c[best_perm[a]];
  }
  return aligned;
}

MembershipEstimate fit_from_svd(const SpectralDecomposition& dec, Index k,
                                std::uint64_t seed) {
  RowNormalized normalized = row_normalize(dec.u);
  if (!normalized.degenerate.empty()) {
    throw DegenerateNetworkError(
        "fit: " + std::to_string(normalized.degenerate.size()) +
        " zero rows survive into normalization (first: " +
        std::to_string(normalized.degenerate.front()) + "); prune first");
  }

  MembershipEstimate est;
  est.i_c = successive_projection(dec.v, k);
  est.i_r = svm_cone(normalized.rows, k, seed);
  est.i_c = align_column_corners(dec.u, dec.sigma, dec.v, normalized.rows,
                                 est.i_r, est.i_c);

  ColRecovery col = recover_col_memberships(dec.v, est.i_c);
  RowRecovery row = recover_row_memberships(dec.u, dec.sigma, dec.v,
                                            normalized.rows, est.i_r, est.i_c);

  est.pi_r = std::move(row.pi_r);
  est.pi_c = std::move(col.pi_c);
  est.theta_r = std::move(row.theta);
  est.z_r_raw = std::move(row.z_raw);
  est.z_c_raw = std::move(col.z_raw);
  est.diag.corner_cond_r = row.corner_cond;
  est.diag.corner_cond_c = col.corner_cond;
  est.diag.clipped_entries_r = row.clipped_entries;
  est.diag.clipped_entries_c = col.clipped_entries;
  est.diag.uniform_rows_r = row.uniform_rows;
  est.diag.uniform_rows_c = col.uniform_rows;
  est.diag.clamped_j_diag = row.clamped_j_diag;
  return est;
}

}  // namespace

MembershipEstimate fit_ideal(const Matrix& omega, Index k) {
  SpectralDecomposition dec = truncated_svd(omega, k);
  return fit_from_svd(dec, k, /*seed=*/0);
}

MembershipEstimate fit_dimsc(const BinaryAdjacency& a, Index k,
                             std::uint64_t seed) {
  auto rsums = a.row_sums();
  for (Index i = 0; i < a.rows; ++i) {
    if (rsums[i] == 0) {
      throw DegenerateNetworkError(
          "fit_dimsc: row " + std::to_string(i) +
          " has zero degree and would reach normalization; prune first");
    }
  }
  SpectralDecomposition dec = truncated_svd(a.to_dense(), k);
  return fit_from_svd(dec, k, seed);
}

MembershipEstimate fit_dimsc_equivalence(const BinaryAdjacency& a, Index k,
                                         std::uint64_t seed) {
  auto rsums = a.row_sums();
  for (Index i = 0; i < a.rows; ++i) {
    if (rsums[i] == 0) {
      throw DegenerateNetworkError(
          "fit_dimsc_equivalence: row " + std::to_string(i) +
          " has zero degree and would reach normalization; prune first");
    }
  }
  SpectralDecomposition dec = truncated_svd(a.to_dense(), k);

  Matrix u2 = gram_rows(dec.u);  // U U'
  Matrix v2 = gram_rows(dec.v);  // V V'
  RowNormalized u_star2 = row_normalize(u2);
  RowNormalized u_star = row_normalize(dec.u);
  if (!u_star2.degenerate.empty() || !u_star.degenerate.empty()) {
    throw DegenerateNetworkError(
        "fit_dimsc_equivalence: zero rows survive into normalization");
  }

  MembershipEstimate est;
  est.i_c = successive_projection(v2, k);
  est.i_r = svm_cone(u_star2.rows, k, seed);
  // The pairing depends only on base-SVD quantities, so both pipelines
  // align identically.
  est.i_c = align_column_corners(dec.u, dec.sigma, dec.v, u_star.rows,
                                 est.i_r, est.i_c);

  // Z_c = V2 V2(Ic,:)' (V2(Ic,:) V2(Ic,:)')^{-1}
  Matrix bc = select_rows(v2, est.i_c);  // K x n_c
  Matrix gram_c = bc * bc.transpose();
  double cond_c = std::sqrt(condition_number(gram_c));
  if (!(cond_c <= kCondLimit)) {
    throw IllConditionedError(
        "fit_dimsc_equivalence: column corner condition number " +
        std::to_string(cond_c) + " exceeds 1e8");
  }
  est.z_c_raw =
      (gram_c.partialPivLu().solve(bc * v2.transpose())).transpose();

  // Y* = U2 U*2(Ir,:)' (U*2(Ir,:) U*2(Ir,:)')^{-1},
  // J* = diag(U*(Ir,:) Lambda V(Ic,:)')
  Matrix br = select_rows(u_star2.rows, est.i_r);  // K x n_r
  Matrix gram_r = br * br.transpose();
  double cond_r = std::sqrt(condition_number(gram_r));
  if (!(cond_r <= kCondLimit)) {
    throw IllConditionedError(
        "fit_dimsc_equivalence: row corner condition number " +
        std::to_string(cond_r) + " exceeds 1e8");
  }
  Vector j_diag = (select_rows(u_star.rows, est.i_r) * dec.sigma.asDiagonal() *
                   select_rows(dec.v, est.i_c).transpose())
                      .diagonal();
  for (Index c = 0; c < k; ++c) {
    if (j_diag(c) < 0.0) {
      j_diag(c) = 0.0;
      ++est.diag.clamped_j_diag;
    }
  }
  Matrix y_star =
      (gram_r.partialPivLu().solve(br * u2.transpose())).transpose();
  est.z_r_raw = y_star * j_diag.asDiagonal();

  ClipOutcome row = clip_and_normalize(est.z_r_raw);
  ClipOutcome col = clip_and_normalize(est.z_c_raw);
  est.pi_r = std::move(row.pi);
  est.pi_c = std::move(col.pi);
  est.theta_r = std::move(row.l1);
  est.diag.corner_cond_r = cond_r;
  est.diag.corner_cond_c = cond_c;
  est.diag.clipped_entries_r = row.clipped;
  est.diag.clipped_entries_c = col.clipped;
  est.diag.uniform_rows_r = row.uniform_rows;
  est.diag.uniform_rows_c = col.uniform_rows;
  return est;
}

}  // namespace dimsc
