#ifndef DIMSC_MODEL_HPP
#define DIMSC_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dimsc/types.hpp"

namespace dimsc {

/// A DiDCMM instance: edge (i,j) is Bernoulli with probability
/// theta_r(i) * pi_r(i,:) * p * pi_c(j,:)'.
struct ModelParams {
  Index n_r = 0;
  Index n_c = 0;
  Index k = 0;
  Matrix p;        // K x K mixing matrix, unit diagonal, full rank
  Matrix pi_r;     // n_r x K, PMF rows
  Matrix pi_c;     // n_c x K, PMF rows
  Vector theta_r;  // n_r, positive row degree parameters
};

/// One pure node per community, canonicalized to the lowest index.
struct PureNodeIndex {
  std::vector<Index> rows;
  std::vector<Index> cols;
};

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> violations;
  PureNodeIndex pure;  // filled when the pure-node scan succeeds
};

/// Check the model invariants: PMF rows, condition (I1) (unit diagonal,
/// rank K), condition (I2) (a pure node per community on both sides),
/// positive theta, and max edge probability <= 1. Report-style: never
/// throws, lists every violation with offending indices.
ValidationReport validate(const ModelParams& params);

/// Omega = Theta_r * Pi_r * P * Pi_c'. Throws ProbabilityOverflowError
/// naming the first offending entry when any probability exceeds 1.
Matrix population_matrix(const ModelParams& params);

/// Independent Bernoulli(omega(i,j)) draws in row-major order from a seeded
/// mt19937_64; bit-identical for a fixed (omega, seed).
BinaryAdjacency sample_adjacency(const Matrix& omega, std::uint64_t seed);

struct PrunedNetwork {
  BinaryAdjacency a;
  Matrix pi_r;
  Matrix pi_c;
  std::vector<Index> kept_rows;  // old index of each surviving row
  std::vector<Index> kept_cols;
};

/// Drop zero-sum rows and zero-sum columns, filtering the membership
/// matrices consistently. Throws DegenerateNetworkError when nothing
/// survives on either side.
PrunedNetwork prune_isolated(const BinaryAdjacency& a, const Matrix& pi_r,
                             const Matrix& pi_c);

/// theta_r <- theta_r / max(P), then recheck the probability invariant.
ModelParams scale_theta_for_pmax(ModelParams params);

}  // namespace dimsc

#endif
