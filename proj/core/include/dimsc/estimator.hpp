#ifndef DIMSC_ESTIMATOR_HPP
#define DIMSC_ESTIMATOR_HPP

#include <cstdint>

#include "dimsc/types.hpp"

namespace dimsc {

struct EstimatorDiagnostics {
  double corner_cond_r = 0.0;   // condition number of U*(I_r,:)
  double corner_cond_c = 0.0;   // condition number of V(I_c,:)
  Index clipped_entries_r = 0;  // negative Z_r entries set to zero
  Index clipped_entries_c = 0;
  Index uniform_rows_r = 0;     // all-zero rows given the uniform PMF
  Index uniform_rows_c = 0;
  Index clamped_j_diag = 0;     // negative J* diagonal entries clamped
};

struct MembershipEstimate {
  Matrix pi_r;  // n_r x K, PMF rows
  Matrix pi_c;  // n_c x K, PMF rows
  CornerIndexSet i_r;
  CornerIndexSet i_c;
  Vector theta_r;  // diagnostic; exact only in the ideal case
  Matrix z_r_raw;  // pre-clip barycentric coordinates
  Matrix z_c_raw;
  EstimatorDiagnostics diag;
};

/// Ideal pipeline on the population matrix: compact SVD, SP on V, SVM-cone
/// on the normalized left vectors, then exact membership recovery. Under
/// conditions (I1)/(I2) this returns the generating memberships up to one
/// column permutation.
MembershipEstimate fit_ideal(const Matrix& omega, Index k);

/// The empirical pipeline on an observed adjacency matrix. Deterministic
/// per (a, k, seed); the seed only drives the K-means step inside SVM-cone.
/// Rows with zero degree must be pruned beforehand and raise
/// DegenerateNetworkError here.
MembershipEstimate fit_dimsc(const BinaryAdjacency& a, Index k,
                             std::uint64_t seed);

/// Variant operating on the projector matrices U U' and V V'. Provably
/// returns the same estimates as fit_dimsc; kept as a cross-check oracle.
MembershipEstimate fit_dimsc_equivalence(const BinaryAdjacency& a, Index k,
                                         std::uint64_t seed);

struct RowRecovery {
  Matrix pi_r;
  Matrix z_raw;
  Vector theta;
  double corner_cond = 0.0;
  Index clipped_entries = 0;
  Index uniform_rows = 0;
  Index clamped_j_diag = 0;
};

/// Z_r = max(0, U U*(I_r,:)^{-1} diag(U*(I_r,:) Lambda V(I_c,:)')),
/// Pi_r row i = Z_r(i,:) / ||Z_r(i,:)||_1, theta(i) = ||Z_r(i,:)||_1.
/// Throws IllConditionedError when cond(U*(I_r,:)) exceeds 1e8. Rows that
/// clip to all-zero fall back to the uniform PMF and are counted.
RowRecovery recover_row_memberships(const Matrix& u, const Vector& sigma,
                                    const Matrix& v, const Matrix& u_star,
                                    const CornerIndexSet& i_r,
                                    const CornerIndexSet& i_c);

struct ColRecovery {
  Matrix pi_c;
  Matrix z_raw;
  double corner_cond = 0.0;
  Index clipped_entries = 0;
  Index uniform_rows = 0;
};

/// Z_c = max(0, V V(I_c,:)^{-1}) with the same clip-then-normalize rule.
ColRecovery recover_col_memberships(const Matrix& v,
                                    const CornerIndexSet& i_c);

struct ThetaCorners {
  Vector values;  // diag(U(I_r,:) Lambda V(I_c,:)')
  bool identifiability_warning = false;  // some recovered value negative
};

/// Degree recovery at the pure indices; equals theta_r(I_r) in the ideal
/// case when condition (I1) holds.
ThetaCorners recover_theta_corners(const Matrix& u, const Vector& sigma,
                                   const Matrix& v, const CornerIndexSet& i_r,
                                   const CornerIndexSet& i_c);

}  // namespace dimsc

#endif
