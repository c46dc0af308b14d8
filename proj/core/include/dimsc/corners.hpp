#ifndef DIMSC_CORNERS_HPP
#define DIMSC_CORNERS_HPP

#include <cstdint>

#include "dimsc/types.hpp"

namespace dimsc {

/// Greedy corner hunting for the simplex: pick the max-norm row, deflate
/// every row against its direction, repeat K times. Ties break to the
/// lowest index; the returned indices are sorted ascending.
/// Throws CornerDeficiencyError if the residual collapses early.
CornerIndexSet successive_projection(const Matrix& x, Index k);

/// Supporting hyperplane of a unit-row point cloud: direction w with
/// ||w|| <= 1 and margin b = min_i S(i,:) * w maximized.
struct ConeSolution {
  Vector w;
  double b = 0.0;
};

/// Solve max b s.t. S(i,:) * w >= b, ||w|| <= 1 as the minimum-norm point
/// of the convex hull of the rows (Wolfe's algorithm, duality gap 1e-10,
/// iteration cap 10n). Rows must be unit norm within 1e-8.
/// Throws DegenerateConeError when the hull contains the origin.
ConeSolution one_class_svm(const Matrix& s);

/// Closed form for a K x d corner matrix with unit rows:
///   b = 1 / sqrt(1' (Sc Sc')^{-1} 1),  w = Sc' (Sc Sc')^{-1} 1 * b.
/// Requires (Sc Sc')^{-1} 1 > 0 elementwise; throws ConeConditionError
/// listing the nonpositive components otherwise.
ConeSolution ideal_cone_solution(const Matrix& corners);

struct KmeansResult {
  std::vector<Index> labels;
  Matrix centers;  // K x d
  double cost = 0.0;
};

/// Seeded K-means: greedy farthest-point initialization, 10 restarts of at
/// most 100 Lloyd sweeps, best (cost, restart index) wins. Deterministic
/// for a fixed seed. Throws InsufficientPointsError when m < K.
KmeansResult kmeans(const Matrix& points, Index k, std::uint64_t seed);

/// SVM-cone corner hunting: one-class SVM for the supporting hyperplane,
/// then K-means over the rows within gamma of it, one representative per
/// cluster (nearest to its center, ties to the lowest index). The gamma
/// schedule is gamma_t = b * (2^t - 1) / 100 for t = 0..20, stopping at the
/// first t that yields >= K candidates and K nonempty clusters with centers
/// pairwise >= 1e-6 apart. Returned indices are sorted ascending.
/// Throws ConeHuntingError with a margin histogram when the schedule runs
/// out.
CornerIndexSet svm_cone(const Matrix& s_hat, Index k, std::uint64_t seed);

}  // namespace dimsc

#endif
