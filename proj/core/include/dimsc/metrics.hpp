#ifndef DIMSC_METRICS_HPP
#define DIMSC_METRICS_HPP

#include "dimsc/types.hpp"

namespace dimsc {

struct MixedHamming {
  double value = 0.0;
  // perm[a] = truth column matched to estimate column a; among optimal
  // matchings the lexicographically smallest one.
  std::vector<Index> perm;
};

/// min over K x K permutations of the entrywise l1 difference divided by
/// the node count. Exhaustive for K <= 8, linear-assignment reduction above
/// (exactly equivalent: the objective splits into per-column costs).
MixedHamming mixed_hamming(const Matrix& pi_hat, const Matrix& pi);

/// The argmin permutation of mixed_hamming.
std::vector<Index> align_permutation(const Matrix& pi_hat, const Matrix& pi);

/// max over rows of ||(U_hat U_hat' - U U')(i,:)||_2, evaluated in row
/// blocks so the n x n projectors are never materialized.
double subspace_deviation(const Matrix& u_hat, const Matrix& u);

struct ErrorReport {
  double row_mhamm = 0.0;
  double col_mhamm = 0.0;
  std::vector<Index> best_perm_r;
  std::vector<Index> best_perm_c;
  double subspace_dev_u = 0.0;
  double subspace_dev_v = 0.0;
};

/// Score both membership estimates against their truths. The subspace
/// deviation fields stay zero unless the singular vector pairs are given.
ErrorReport make_error_report(const Matrix& pi_r_hat, const Matrix& pi_r,
                              const Matrix& pi_c_hat, const Matrix& pi_c);
ErrorReport make_error_report(const Matrix& pi_r_hat, const Matrix& pi_r,
                              const Matrix& pi_c_hat, const Matrix& pi_c,
                              const Matrix& u_hat, const Matrix& u,
                              const Matrix& v_hat, const Matrix& v);

namespace detail {

// Both routes, exposed so tests can cross-check them on the same input.
MixedHamming mixed_hamming_exhaustive(const Matrix& pi_hat, const Matrix& pi);
MixedHamming mixed_hamming_assignment(const Matrix& pi_hat, const Matrix& pi);

}  // namespace detail

}  // namespace dimsc

#endif
