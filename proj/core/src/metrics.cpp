#include "dimsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dimsc/errors.hpp"

namespace dimsc {

namespace {

// Per-column-pair l1 costs: cost(a, b) = || pi_hat(:,a) - pi(:,b) ||_1.
Matrix column_costs(const Matrix& pi_hat, const Matrix& pi) {
  const Index k = pi_hat.cols();
  Matrix cost(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      cost(a, b) = (pi_hat.col(a) - pi.col(b)).cwiseAbs().sum();
    }
  }
  return cost;
}

// Sum the chosen costs in ascending value order so the total does not
// depend on which column carries which label; this keeps the value exactly
// invariant under permutations of pi_hat's columns.
double assignment_total(const Matrix& cost, const std::vector<Index>& perm) {
  std::vector<double> picked(perm.size());
  for (size_t a = 0; a < perm.size(); ++a) {
    picked[a] = cost(static_cast<Index>(a), perm[a]);
  }
  std::sort(picked.begin(), picked.end());
  double total = 0.0;
  for (double c : picked) total += c;
  return total;
}

void check_shapes(const Matrix& pi_hat, const Matrix& pi, const char* who) {
  if (pi_hat.rows() != pi.rows() || pi_hat.cols() != pi.cols()) {
    throw DimensionError(std::string(who) + ": shape mismatch " +
                         std::to_string(pi_hat.rows()) + "x" +
                         std::to_string(pi_hat.cols()) + " vs " +
                         std::to_string(pi.rows()) + "x" +
                         std::to_string(pi.cols()));
  }
}

// Classic Hungarian algorithm (potentials + augmenting paths), O(K^3).
std::vector<Index> solve_assignment(const Matrix& cost) {
  const Index k = cost.rows();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<Index> match(k + 1, 0);  // match[col 1-based] = row 1-based
  for (Index row = 1; row <= k; ++row) {
    std::vector<double> min_slack(k + 1,
                                  std::numeric_limits<double>::infinity());
    std::vector<Index> prev(k + 1, 0);
    std::vector<bool> used(k + 1, false);
    Index col0 = 0;
    match[0] = row;
    do {
      used[col0] = true;
      Index row0 = match[col0];
      double delta = std::numeric_limits<double>::infinity();
      Index col1 = 0;
      for (Index col = 1; col <= k; ++col) {
        if (used[col]) continue;
        double slack = cost(row0 - 1, col - 1) - u[row0] - v[col];
        if (slack < min_slack[col]) {
          min_slack[col] = slack;
          prev[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (Index col = 0; col <= k; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    while (col0 != 0) {
      Index col1 = prev[col0];
      match[col0] = match[col1];
      col0 = col1;
    }
  }
  std::vector<Index> perm(k);
  for (Index col = 1; col <= k; ++col) {
    perm[match[col] - 1] = col - 1;
  }
  return perm;
}

}  // namespace

namespace detail {

MixedHamming mixed_hamming_exhaustive(const Matrix& pi_hat, const Matrix& pi) {
  check_shapes(pi_hat, pi, "mixed_hamming");
  const Index k = pi_hat.cols();
  Matrix cost = column_costs(pi_hat, pi);

  std::vector<Index> perm(k);
  std::iota(perm.begin(), perm.end(), Index{0});
  MixedHamming best;
  best.value = std::numeric_limits<double>::infinity();
  // Lexicographic iteration with strict improvement keeps the smallest
  // permutation among exact ties.
  do {
    double total = assignment_total(cost, perm);
    if (total < best.value) {
      best.value = total;
      best.perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.value /= static_cast<double>(std::max<Index>(pi_hat.rows(), 1));
  return best;
}

MixedHamming mixed_hamming_assignment(const Matrix& pi_hat, const Matrix& pi) {
  check_shapes(pi_hat, pi, "mixed_hamming");
  Matrix cost = column_costs(pi_hat, pi);
  std::vector<Index> perm = solve_assignment(cost);

  // Polish toward the lexicographically smallest optimum: a pairwise swap
  // that keeps the total unchanged but lowers the earlier position wins.
  const Index k = cost.rows();
  double best_total = assignment_total(cost, perm);
  bool improved = true;
  while (improved) {
    improved = false;
    for (Index a = 0; a < k && !improved; ++a) {
      for (Index b = a + 1; b < k && !improved; ++b) {
        if (perm[b] >= perm[a]) continue;
        std::vector<Index> swapped = perm;
        std::swap(swapped[a], swapped[b]);
        if (assignment_total(cost, swapped) == best_total) {
          perm = swapped;
          improved = true;
        }
      }
    }
  }

  MixedHamming out;
  out.perm = perm;
  out.value =
      best_total / static_cast<double>(std::max<Index>(pi_hat.rows(), 1));
  return out;
}

}  // namespace detail

MixedHamming mixed_hamming(const Matrix& pi_hat, const Matrix& pi) {
  if (pi_hat.cols() <= 8) {
    return detail::mixed_hamming_exhaustive(pi_hat, pi);
  }
  return detail::mixed_hamming_assignment(pi_hat, pi);
}

std::vector<Index> align_permutation(const Matrix& pi_hat, const Matrix& pi) {
  return mixed_hamming(pi_hat, pi).perm;
}

ErrorReport make_error_report(const Matrix& pi_r_hat, const Matrix& pi_r,
                              const Matrix& pi_c_hat, const Matrix& pi_c) {
  ErrorReport report;
  MixedHamming row = mixed_hamming(pi_r_hat, pi_r);
  MixedHamming col = mixed_hamming(pi_c_hat, pi_c);
  report.row_mhamm = row.value;
  report.col_mhamm = col.value;
  report.best_perm_r = std::move(row.perm);
  report.best_perm_c = std::move(col.perm);
  return report;
}

ErrorReport make_error_report(const Matrix& pi_r_hat, const Matrix& pi_r,
                              const Matrix& pi_c_hat, const Matrix& pi_c,
                              const Matrix& u_hat, const Matrix& u,
                              const Matrix& v_hat, const Matrix& v) {
  ErrorReport report = make_error_report(pi_r_hat, pi_r, pi_c_hat, pi_c);
  report.subspace_dev_u = subspace_deviation(u_hat, u);
  report.subspace_dev_v = subspace_deviation(v_hat, v);
  return report;
}

double subspace_deviation(const Matrix& u_hat, const Matrix& u) {
  if (u_hat.rows() != u.rows() || u_hat.cols() != u.cols()) {
    throw DimensionError("subspace_deviation: shape mismatch");
  }
  const Index n = u.rows();
  constexpr Index kBlock = 1000;
  double worst = 0.0;
  for (Index start = 0; start < n; start += kBlock) {
    Index len = std::min(kBlock, n - start);
    // (U_hat U_hat' - U U')(block,:) without forming the n x n projectors.
    Matrix diff = u_hat.middleRows(start, len) * u_hat.transpose() -
                  u.middleRows(start, len) * u.transpose();
    worst = std::max(worst, diff.rowwise().norm().maxCoeff());
  }
  return worst;
}

}  // namespace dimsc
