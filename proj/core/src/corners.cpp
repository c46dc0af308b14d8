#include "dimsc/corners.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "dimsc/errors.hpp"
#include "dimsc/rng.hpp"

namespace dimsc {

namespace {

constexpr double kResidualFloor = 1e-12;
constexpr double kGapTol = 1e-10;
constexpr double kUnitRowTol = 1e-8;
constexpr double kCenterSeparation = 1e-6;
constexpr double kMarginSlack = 1e-8;  // fp guard on the gamma-0 candidate cut

void check_unit_rows(const Matrix& s, const char* who) {
  for (Index i = 0; i < s.rows(); ++i) {
    double norm = s.row(i).norm();
    if (std::abs(norm - 1.0) > kUnitRowTol) {
      throw DomainError(std::string(who) + ": row " + std::to_string(i) +
                        " has norm " + std::to_string(norm) + ", expected 1");
    }
  }
}

}  // namespace

CornerIndexSet successive_projection(const Matrix& x, Index k) {
  if (k < 1 || k > std::min(x.rows(), x.cols())) {
    throw DimensionError("successive_projection: K=" + std::to_string(k) +
                         " exceeds input dimensions");
  }
  if (!x.allFinite()) {
    throw DomainError("successive_projection: input has non-finite entries");
  }

  Matrix residual = x;
  CornerIndexSet picks;
  picks.reserve(k);
  for (Index step = 0; step < k; ++step) {
    Index best = 0;
    double best_sq = -1.0;
    for (Index i = 0; i < residual.rows(); ++i) {
      double sq = residual.row(i).squaredNorm();
      if (sq > best_sq) {  // ties keep the lowest index
        best_sq = sq;
        best = i;
      }
    }
    if (std::sqrt(best_sq) < kResidualFloor) {
      throw CornerDeficiencyError(
          "successive_projection: residual collapsed after " +
          std::to_string(step) + " of " + std::to_string(k) + " picks");
    }
    picks.push_back(best);
    Vector direction = residual.row(best).transpose();
    residual -= (residual * direction) * (direction.transpose() / best_sq);
  }
  std::sort(picks.begin(), picks.end());
  return picks;
}

ConeSolution one_class_svm(const Matrix& s) {
  const Index n = s.rows();
  if (n < 1) {
    throw DimensionError("one_class_svm: need at least one row");
  }
  check_unit_rows(s, "one_class_svm");

  // Wolfe's minimum-norm-point algorithm over the convex hull of the rows:
  // the optimal (w, b) is x / ||x|| and ||x|| for the min-norm point x.
  std::vector<Index> corral;
  std::vector<double> weights;
  corral.push_back(0);  // all rows unit norm, so row 0 is a minimal start
  weights.push_back(1.0);
  Vector x = s.row(0).transpose();

  auto affine_minimizer = [&](Vector* alpha) {
    const Index m = static_cast<Index>(corral.size());
    Matrix kkt = Matrix::Zero(m + 1, m + 1);
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) {
        kkt(a, b) = s.row(corral[a]).dot(s.row(corral[b]));
      }
      kkt(a, m) = 1.0;
      kkt(m, a) = 1.0;
    }
    Vector rhs = Vector::Zero(m + 1);
    rhs(m) = 1.0;
    Vector sol = kkt.partialPivLu().solve(rhs);
    *alpha = sol.head(m);
  };

  const long cap = 10 * static_cast<long>(n);
  for (long iter = 0; iter < cap; ++iter) {
    Vector margins = s * x;
    Index entering = 0;
    double min_margin = margins(0);
    for (Index j = 1; j < n; ++j) {
      if (margins(j) < min_margin) {
        min_margin = margins(j);
        entering = j;
      }
    }
    if (x.squaredNorm() - min_margin <= kGapTol) {
      break;
    }
    if (std::find(corral.begin(), corral.end(), entering) != corral.end()) {
      break;  // fp stall: the best improving point is already in the corral
    }
    corral.push_back(entering);
    weights.push_back(0.0);

    for (;;) {
      Vector alpha;
      affine_minimizer(&alpha);
      if ((alpha.array() >= -1e-12).all()) {
        for (size_t i = 0; i < corral.size(); ++i) {
          weights[i] = std::max(alpha(static_cast<Index>(i)), 0.0);
        }
        break;
      }
      // Step toward the affine minimizer until a weight hits zero.
      double theta = 1.0;
      for (size_t i = 0; i < corral.size(); ++i) {
        double a = alpha(static_cast<Index>(i));
        if (a < 0.0) {
          theta = std::min(theta, weights[i] / (weights[i] - a));
        }
      }
      for (size_t i = 0; i < corral.size(); ++i) {
        weights[i] =
            (1.0 - theta) * weights[i] + theta * alpha(static_cast<Index>(i));
      }
      for (Index i = static_cast<Index>(corral.size()) - 1; i >= 0; --i) {
        if (weights[i] <= 1e-12) {
          corral.erase(corral.begin() + i);
          weights.erase(weights.begin() + i);
        }
      }
    }

    double total = 0.0;
    for (double wgt : weights) total += wgt;
    x.setZero();
    for (size_t i = 0; i < corral.size(); ++i) {
      x += (weights[i] / total) * s.row(corral[i]).transpose();
    }
  }

  double b = x.norm();
  if (b < 1e-10) {
    throw DegenerateConeError(
        "one_class_svm: convex hull of the rows contains the origin");
  }
  ConeSolution sol;
  sol.w = x / b;
  sol.b = b;
  return sol;
}

ConeSolution ideal_cone_solution(const Matrix& corners) {
  check_unit_rows(corners, "ideal_cone_solution");
  Matrix gram = corners * corners.transpose();
  Vector y = gram.partialPivLu().solve(Vector::Ones(corners.rows()));
  std::string negatives;
  for (Index i = 0; i < y.size(); ++i) {
    if (!(y(i) > 0)) {
      negatives += (negatives.empty() ? "" : ", ") + std::to_string(i) + "=" +
                   std::to_string(y(i));
    }
  }
  if (!negatives.empty()) {
    throw ConeConditionError(
        "ideal_cone_solution: (Sc Sc')^{-1} 1 > 0 fails at components " +
        negatives);
  }
  double total = y.sum();
  ConeSolution sol;
  sol.b = 1.0 / std::sqrt(total);
  sol.w = corners.transpose() * y / std::sqrt(total);
  return sol;
}

KmeansResult kmeans(const Matrix& points, Index k, std::uint64_t seed) {
  const Index m = points.rows();
  if (m < k) {
    throw InsufficientPointsError("kmeans: " + std::to_string(m) +
                                  " points for K=" + std::to_string(k));
  }

  constexpr int kRestarts = 10;
  constexpr int kMaxSweeps = 100;

  KmeansResult best;
  best.cost = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < kRestarts; ++restart) {
    Rng rng(derive_seed(seed, 0x6b6d65616e73ULL, restart));

    // Greedy farthest-point initialization from a random first pick.
    Matrix centers(k, points.cols());
    centers.row(0) = points.row(static_cast<Index>(rng.below(m)));
    Vector nearest_sq =
        (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (Index c = 1; c < k; ++c) {
      Index far = 0;
      for (Index i = 1; i < m; ++i) {
        if (nearest_sq(i) > nearest_sq(far)) {
          far = i;
        }
      }
      centers.row(c) = points.row(far);
      nearest_sq = nearest_sq.cwiseMin(
          (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<Index> labels(m, 0);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      bool changed = false;
      for (Index i = 0; i < m; ++i) {
        Index best_c = labels[i];
        double best_sq = (points.row(i) - centers.row(best_c)).squaredNorm();
        for (Index c = 0; c < k; ++c) {
          double sq = (points.row(i) - centers.row(c)).squaredNorm();
          if (sq < best_sq) {  // ties keep the current label
            best_sq = sq;
            best_c = c;
          }
        }
        if (best_c != labels[i]) {
          labels[i] = best_c;
          changed = true;
        }
      }

      std::vector<Index> counts(k, 0);
      for (Index i = 0; i < m; ++i) ++counts[labels[i]];
      for (Index c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        // Move the point farthest from its center out of a multi-member
        // cluster.
        Index donor = -1;
        double worst = -1.0;
        for (Index i = 0; i < m; ++i) {
          if (counts[labels[i]] <= 1) continue;
          double sq = (points.row(i) - centers.row(labels[i])).squaredNorm();
          if (sq > worst) {
            worst = sq;
            donor = i;
          }
        }
        if (donor < 0) break;
        --counts[labels[donor]];
        labels[donor] = c;
        ++counts[c];
        changed = true;
      }

      centers.setZero();
      std::vector<Index> counts2(k, 0);
      for (Index i = 0; i < m; ++i) {
        centers.row(labels[i]) += points.row(i);
        ++counts2[labels[i]];
      }
      for (Index c = 0; c < k; ++c) {
        if (counts2[c] > 0) {
          centers.row(c) /= static_cast<double>(counts2[c]);
        }
      }
      if (!changed) break;
    }

    double cost = 0.0;
    for (Index i = 0; i < m; ++i) {
      cost += (points.row(i) - centers.row(labels[i])).squaredNorm();
    }
    if (cost < best.cost) {  // ties keep the earlier restart
      best.cost = cost;
      best.labels = labels;
      best.centers = centers;
    }
  }
  return best;
}

CornerIndexSet svm_cone(const Matrix& s_hat, Index k, std::uint64_t seed) {
  const Index n = s_hat.rows();
  if (n < k) {
    throw InsufficientPointsError("svm_cone: " + std::to_string(n) +
                                  " rows for K=" + std::to_string(k));
  }
  ConeSolution svm = one_class_svm(s_hat);
  Vector margins = s_hat * svm.w;

  for (int t = 0; t <= 20; ++t) {
    double gamma = svm.b * (std::pow(2.0, t) - 1.0) / 100.0;
    double cut = svm.b + gamma + kMarginSlack * svm.b;
    std::vector<Index> candidates;
    for (Index i = 0; i < n; ++i) {
      if (margins(i) <= cut) {
        candidates.push_back(i);
      }
    }
    if (static_cast<Index>(candidates.size()) < k) continue;

    Matrix cloud(candidates.size(), s_hat.cols());
    for (size_t i = 0; i < candidates.size(); ++i) {
      cloud.row(static_cast<Index>(i)) = s_hat.row(candidates[i]);
    }
    KmeansResult km = kmeans(cloud, k, seed);

    std::vector<Index> counts(k, 0);
    for (Index label : km.labels) ++counts[label];
    bool ok = *std::min_element(counts.begin(), counts.end()) >= 1;
    for (Index a = 0; ok && a < k; ++a) {
      for (Index b = a + 1; ok && b < k; ++b) {
        if ((km.centers.row(a) - km.centers.row(b)).norm() <
            kCenterSeparation) {
          ok = false;
        }
      }
    }
    if (!ok) continue;

    CornerIndexSet picks;
    for (Index c = 0; c < k; ++c) {
      Index rep = -1;
      double best_sq = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < candidates.size(); ++i) {
        if (km.labels[i] != c) continue;
        double sq =
            (cloud.row(static_cast<Index>(i)) - km.centers.row(c)).squaredNorm();
        if (sq < best_sq) {  // ties keep the lowest candidate index
          best_sq = sq;
          rep = candidates[i];
        }
      }
      picks.push_back(rep);
    }
    std::sort(picks.begin(), picks.end());
    return picks;
  }

  // Diagnostics: histogram of margins above the hyperplane, in units of b.
  std::ostringstream msg;
  msg << "svm_cone: gamma schedule exhausted without " << k
      << " distinct clusters; margin histogram ((m-b)/b):";
  const double edges[] = {0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1e-1, 1.0};
  for (size_t e = 0; e + 1 < sizeof(edges) / sizeof(edges[0]); ++e) {
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
      double rel = (margins(i) - svm.b) / svm.b;
      if (rel >= edges[e] && rel < edges[e + 1]) ++count;
    }
    msg << " [" << edges[e] << "," << edges[e + 1] << "):" << count;
  }
  throw ConeHuntingError(msg.str());
}

}  // namespace dimsc
