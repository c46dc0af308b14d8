#include "dimsc/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "dimsc/errors.hpp"
#include "dimsc/rng.hpp"

namespace dimsc {

namespace {

constexpr double kPmfTol = 1e-12;
constexpr double kProbSlack = 1e-12;  // fp headroom on the <= 1 invariant

bool is_pure_row(const Matrix& pi, Index i, Index* community) {
  for (Index k = 0; k < pi.cols(); ++k) {
    if (std::abs(pi(i, k) - 1.0) <= kPmfTol) {
      *community = k;
      return true;
    }
  }
  return false;
}

void check_pmf_rows(const Matrix& pi, const char* name,
                    std::vector<std::string>* violations) {
  for (Index i = 0; i < pi.rows(); ++i) {
    if ((pi.row(i).array() < 0).any()) {
      violations->push_back(std::string(name) + " row " + std::to_string(i) +
                            " has a negative weight");
    }
    double sum = pi.row(i).sum();
    if (std::abs(sum - 1.0) > kPmfTol) {
      violations->push_back(std::string(name) + " row " + std::to_string(i) +
                            " sums to " + std::to_string(sum) + ", not 1");
    }
  }
}

// Lowest pure index per community, or a violation per missing community.
std::vector<Index> scan_pure(const Matrix& pi, const char* side,
                             std::vector<std::string>* violations) {
  const Index k = pi.cols();
  std::vector<Index> pure(k, -1);
  for (Index i = 0; i < pi.rows(); ++i) {
    Index community = -1;
    if (is_pure_row(pi, i, &community) && pure[community] < 0) {
      pure[community] = i;
    }
  }
  for (Index c = 0; c < k; ++c) {
    if (pure[c] < 0) {
      violations->push_back("(I2) no pure " + std::string(side) +
                            " node in community " + std::to_string(c));
    }
  }
  return pure;
}

}  // namespace

ValidationReport validate(const ModelParams& params) {
  ValidationReport report;
  auto& v = report.violations;

  if (params.k < 1) {
    v.push_back("K must be at least 1");
  }
  if (params.pi_r.rows() != params.n_r || params.pi_r.cols() != params.k) {
    v.push_back("Pi_r shape mismatch");
  }
  if (params.pi_c.rows() != params.n_c || params.pi_c.cols() != params.k) {
    v.push_back("Pi_c shape mismatch");
  }
  if (params.p.rows() != params.k || params.p.cols() != params.k) {
    v.push_back("P shape mismatch");
  }
  if (params.theta_r.size() != params.n_r) {
    v.push_back("theta_r length mismatch");
  }
  if (!v.empty()) {
    return report;
  }

  check_pmf_rows(params.pi_r, "Pi_r", &v);
  check_pmf_rows(params.pi_c, "Pi_c", &v);

  if ((params.p.array() < 0).any()) {
    v.push_back("P has a negative entry");
  }
  for (Index k = 0; k < params.k; ++k) {
    if (std::abs(params.p(k, k) - 1.0) > kPmfTol) {
      v.push_back("(I1) unit diagonal violated at k=" + std::to_string(k) +
                  " (P(k,k)=" + std::to_string(params.p(k, k)) + ")");
    }
  }
  Eigen::JacobiSVD<Matrix> psvd(params.p);
  if (psvd.singularValues()(params.k - 1) <= 1e-10) {
    v.push_back("(I1) rank(P) < K: sigma_K(P) = " +
                std::to_string(psvd.singularValues()(params.k - 1)));
  }

  report.pure.rows = scan_pure(params.pi_r, "row", &v);
  report.pure.cols = scan_pure(params.pi_c, "column", &v);

  for (Index i = 0; i < params.n_r; ++i) {
    if (!(params.theta_r(i) > 0)) {
      v.push_back("theta_r(" + std::to_string(i) + ") is not positive");
    }
  }

  // Max edge probability over all (i, j).
  Matrix rates = params.pi_r * params.p * params.pi_c.transpose();
  double max_prob = 0.0;
  for (Index i = 0; i < params.n_r; ++i) {
    max_prob = std::max(max_prob, params.theta_r(i) * rates.row(i).maxCoeff());
  }
  if (max_prob > 1.0 + kProbSlack) {
    v.push_back("max edge probability " + std::to_string(max_prob) +
                " exceeds 1");
  }

  report.ok = v.empty();
  return report;
}

Matrix population_matrix(const ModelParams& params) {
  Matrix omega = params.theta_r.asDiagonal() *
                 (params.pi_r * params.p * params.pi_c.transpose());
  for (Index i = 0; i < omega.rows(); ++i) {
    for (Index j = 0; j < omega.cols(); ++j) {
      if (omega(i, j) > 1.0 + kProbSlack) {
        throw ProbabilityOverflowError(
            "population_matrix: probability " + std::to_string(omega(i, j)) +
            " > 1 at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  return omega;
}

BinaryAdjacency sample_adjacency(const Matrix& omega, std::uint64_t seed) {
  BinaryAdjacency a;
  a.rows = omega.rows();
  a.cols = omega.cols();
  Rng rng(seed);
  for (Index i = 0; i < omega.rows(); ++i) {
    for (Index j = 0; j < omega.cols(); ++j) {
      double p = omega(i, j);
      if (p < 0.0 || p > 1.0 + kProbSlack) {
        throw DomainError("sample_adjacency: probability " +
                          std::to_string(p) + " outside [0, 1] at (" +
                          std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      if (rng.bernoulli(p)) {
        a.ones.emplace_back(i, j);
      }
    }
  }
  return a;
}

PrunedNetwork prune_isolated(const BinaryAdjacency& a, const Matrix& pi_r,
                             const Matrix& pi_c) {
  auto rsum = a.row_sums();
  auto csum = a.col_sums();

  PrunedNetwork out;
  std::vector<Index> row_map(a.rows, -1);
  std::vector<Index> col_map(a.cols, -1);
  for (Index i = 0; i < a.rows; ++i) {
    if (rsum[i] > 0) {
      row_map[i] = static_cast<Index>(out.kept_rows.size());
      out.kept_rows.push_back(i);
    }
  }
  for (Index j = 0; j < a.cols; ++j) {
    if (csum[j] > 0) {
      col_map[j] = static_cast<Index>(out.kept_cols.size());
      out.kept_cols.push_back(j);
    }
  }
  if (out.kept_rows.empty() || out.kept_cols.empty()) {
    throw DegenerateNetworkError(
        "prune_isolated: nothing left after removing isolated nodes");
  }

  out.a.rows = static_cast<Index>(out.kept_rows.size());
  out.a.cols = static_cast<Index>(out.kept_cols.size());
  out.a.ones.reserve(a.ones.size());
  for (const auto& [i, j] : a.ones) {
    out.a.ones.emplace_back(row_map[i], col_map[j]);
  }

  out.pi_r.resize(out.a.rows, pi_r.cols());
  for (Index i = 0; i < out.a.rows; ++i) {
    out.pi_r.row(i) = pi_r.row(out.kept_rows[i]);
  }
  out.pi_c.resize(out.a.cols, pi_c.cols());
  for (Index j = 0; j < out.a.cols; ++j) {
    out.pi_c.row(j) = pi_c.row(out.kept_cols[j]);
  }
  return out;
}

ModelParams scale_theta_for_pmax(ModelParams params) {
  double pmax = params.p.maxCoeff();
  if (!(pmax > 0)) {
    throw DomainError("scale_theta_for_pmax: max(P) must be positive");
  }
  params.theta_r /= pmax;
  Matrix rates = params.pi_r * params.p * params.pi_c.transpose();
  for (Index i = 0; i < params.n_r; ++i) {
    double row_max = params.theta_r(i) * rates.row(i).maxCoeff();
    if (row_max > 1.0 + kProbSlack) {
      throw ProbabilityOverflowError(
          "scale_theta_for_pmax: probability still exceeds 1 after scaling");
    }
  }
  return params;
}

// --- BinaryAdjacency -------------------------------------------------------

BinaryAdjacency BinaryAdjacency::from_dense(const Matrix& dense) {
  BinaryAdjacency a;
  a.rows = dense.rows();
  a.cols = dense.cols();
  for (Index i = 0; i < dense.rows(); ++i) {
    for (Index j = 0; j < dense.cols(); ++j) {
      double x = dense(i, j);
      if (x == 1.0) {
        a.ones.emplace_back(i, j);
      } else if (x != 0.0) {
        throw DomainError("BinaryAdjacency: entry at (" + std::to_string(i) +
                          ", " + std::to_string(j) + ") is not 0 or 1");
      }
    }
  }
  return a;
}

Matrix BinaryAdjacency::to_dense() const {
  Matrix dense = Matrix::Zero(rows, cols);
  for (const auto& [i, j] : ones) {
    dense(i, j) = 1.0;
  }
  return dense;
}

BinaryAdjacency BinaryAdjacency::transposed() const {
  BinaryAdjacency t;
  t.rows = cols;
  t.cols = rows;
  t.ones.reserve(ones.size());
  for (const auto& [i, j] : ones) {
    t.ones.emplace_back(j, i);
  }
  std::sort(t.ones.begin(), t.ones.end());
  return t;
}

std::vector<Index> BinaryAdjacency::row_sums() const {
  std::vector<Index> sums(rows, 0);
  for (const auto& [i, j] : ones) {
    (void)j;
    ++sums[i];
  }
  return sums;
}

std::vector<Index> BinaryAdjacency::col_sums() const {
  std::vector<Index> sums(cols, 0);
  for (const auto& [i, j] : ones) {
    (void)i;
    ++sums[j];
  }
  return sums;
}

}  // namespace dimsc
