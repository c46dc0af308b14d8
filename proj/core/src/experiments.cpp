#include "dimsc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dimsc/errors.hpp"
#include "dimsc/estimator.hpp"
#include "dimsc/metrics.hpp"
#include "dimsc/rng.hpp"

namespace dimsc {

namespace {

constexpr std::uint64_t kTagTheta = 0x7468657461ULL;    // "theta"
constexpr std::uint64_t kTagSample = 0x73616d706cULL;   // "sampl"
constexpr std::uint64_t kTagFit = 0x666974ULL;          // "fit"

Matrix block_memberships(Index n, Index k, Index pure_per_community,
                         const Matrix& mixed_rows, bool strict_split,
                         const char* side) {
  const Index pure_total = k * pure_per_community;
  const Index mixed_total = n - pure_total;
  if (mixed_total < 0) {
    throw ConfigError(std::string("block layout: ") + side + " side has " +
                      std::to_string(n) + " nodes but needs " +
                      std::to_string(pure_total) + " pure nodes");
  }
  const Index blocks = mixed_rows.rows();
  if (mixed_total > 0 && blocks == 0) {
    throw ConfigError(std::string("block layout: ") + side +
                      " side has mixed nodes but no mixed membership rows");
  }
  if (strict_split && blocks > 0 && mixed_total % blocks != 0) {
    throw ConfigError(std::string("block layout: (") + std::to_string(n) +
                      " - " + std::to_string(k) + "*" +
                      std::to_string(pure_per_community) + ") = " +
                      std::to_string(mixed_total) + " not divisible by " +
                      std::to_string(blocks) + " mixed blocks");
  }

  Matrix pi = Matrix::Zero(n, k);
  Index at = 0;
  for (Index c = 0; c < k; ++c) {
    for (Index i = 0; i < pure_per_community; ++i) {
      pi(at++, c) = 1.0;
    }
  }
  if (blocks > 0) {
    const Index base = mixed_total / blocks;
    const Index extra = mixed_total % blocks;  // zero under strict_split
    for (Index b = 0; b < blocks; ++b) {
      Index len = base + (b < extra ? 1 : 0);
      for (Index i = 0; i < len; ++i) {
        pi.row(at++) = mixed_rows.row(b);
      }
    }
  }
  return pi;
}

}  // namespace

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::pure_fraction:
      return "pure_fraction";
    case ExperimentId::degree_heterogeneity:
      return "degree_heterogeneity";
    case ExperimentId::connectivity:
      return "connectivity";
    case ExperimentId::sparsity:
      return "sparsity";
  }
  return "unknown";
}

ExperimentId experiment_id_from_string(const std::string& name) {
  if (name == "pure_fraction") return ExperimentId::pure_fraction;
  if (name == "degree_heterogeneity") return ExperimentId::degree_heterogeneity;
  if (name == "connectivity") return ExperimentId::connectivity;
  if (name == "sparsity") return ExperimentId::sparsity;
  throw ConfigError("unknown experiment id '" + name + "'");
}

Matrix default_mixing_matrix() {
  Matrix p(3, 3);
  p << 1.0, 0.1, 0.3,  //
      0.2, 1.0, 0.4,   //
      0.5, 0.2, 1.0;
  return p;
}

Matrix default_mixed_rows() {
  Matrix rows(4, 3);
  rows << 0.4, 0.4, 0.2,              //
      0.4, 0.2, 0.4,                  //
      0.2, 0.4, 0.4,                  //
      1.0 / 3, 1.0 / 3, 1.0 / 3;
  return rows;
}

Vector sample_theta(double z, double rho, Index n_r, std::uint64_t seed) {
  if (z < 1.0) {
    throw ConfigError("sample_theta: z must be >= 1, got " +
                      std::to_string(z));
  }
  if (!(rho > 0.0)) {
    throw ConfigError("sample_theta: rho must be positive");
  }
  Rng rng(seed);
  Vector theta(n_r);
  for (Index i = 0; i < n_r; ++i) {
    theta(i) = rho / rng.uniform(1.0, z);
  }
  return theta;
}

ModelParams build_block_params(const BlockDesign& design,
                               std::uint64_t theta_seed) {
  if (design.k < 1 || design.pure_per_community < 1) {
    throw ConfigError("build_block_params: need K >= 1 and at least one pure "
                      "node per community");
  }
  ModelParams params;
  params.n_r = design.n_r;
  params.n_c = design.n_c;
  params.k = design.k;
  params.p = design.p.size() > 0 ? design.p : default_mixing_matrix();
  params.pi_r =
      block_memberships(design.n_r, design.k, design.pure_per_community,
                        design.mixed_rows, design.strict_split, "row");
  params.pi_c =
      block_memberships(design.n_c, design.k, design.pure_per_community,
                        design.mixed_rows, design.strict_split, "column");
  params.theta_r = sample_theta(design.z, design.rho, design.n_r, theta_seed);
  return params;
}

ModelParams make_paper_params(ExperimentId id, double knob,
                              std::uint64_t theta_seed,
                              const ExperimentOverrides& overrides) {
  BlockDesign design;
  design.mixed_rows = default_mixed_rows();
  design.p = default_mixing_matrix();
  if (overrides.n_r) design.n_r = *overrides.n_r;
  if (overrides.n_c) design.n_c = *overrides.n_c;
  if (overrides.pure_per_community) {
    design.pure_per_community = *overrides.pure_per_community;
  }
  if (overrides.z) design.z = *overrides.z;
  if (overrides.rho) design.rho = *overrides.rho;

  switch (id) {
    case ExperimentId::pure_fraction: {
      double rounded = std::round(knob);
      if (std::abs(knob - rounded) > 1e-9 || rounded < 1) {
        throw ConfigError("pure_fraction knob must be a positive integer, "
                          "got " + std::to_string(knob));
      }
      design.pure_per_community = static_cast<Index>(rounded);
      break;
    }
    case ExperimentId::degree_heterogeneity:
      design.z = knob;
      break;
    case ExperimentId::connectivity: {
      if (knob < 1.0) {
        throw ConfigError("connectivity knob beta must be >= 1");
      }
      design.p = (2.0 - knob) * Matrix::Identity(design.k, design.k) +
                 (knob - 1.0) * Matrix::Ones(design.k, design.k);
      break;
    }
    case ExperimentId::sparsity:
      if (!(knob > 0.0 && knob <= 1.0)) {
        throw ConfigError("sparsity knob rho must be in (0, 1]");
      }
      design.rho = knob;
      break;
  }

  ModelParams params = build_block_params(design, theta_seed);
  if (id == ExperimentId::connectivity) {
    params = scale_theta_for_pmax(std::move(params));
  }
  return params;
}

std::vector<std::string> check_experiment_config(const ExperimentConfig& cfg) {
  if (cfg.knobs.empty()) {
    throw ConfigError("experiment: knob list is empty");
  }
  if (cfg.repetitions < 1) {
    throw ConfigError("experiment: repetitions must be >= 1");
  }
  std::vector<std::string> warnings;
  for (double knob : cfg.knobs) {
    switch (cfg.id) {
      case ExperimentId::pure_fraction:
        if (std::abs(knob - std::round(knob)) > 1e-9 || knob < 1) {
          throw ConfigError("pure_fraction knobs must be positive integers");
        }
        break;
      case ExperimentId::degree_heterogeneity:
        if (knob < 1.0) {
          throw ConfigError("degree_heterogeneity knobs must be >= 1");
        }
        break;
      case ExperimentId::connectivity:
        if (knob < 1.0) {
          throw ConfigError("connectivity knobs must be >= 1");
        }
        if (std::abs(knob - 2.0) < 0.05) {
          warnings.push_back("beta=" + std::to_string(knob) +
                             " is near-singular (|beta-2| < 0.05)");
        }
        break;
      case ExperimentId::sparsity:
        if (!(knob > 0.0 && knob <= 1.0)) {
          throw ConfigError("sparsity knobs must be in (0, 1]");
        }
        break;
    }
  }
  return warnings;
}

std::uint64_t theta_seed_for(std::uint64_t base_seed, Index knob_index) {
  return derive_seed(base_seed, kTagTheta, static_cast<std::uint64_t>(knob_index));
}

std::uint64_t sample_seed_for(std::uint64_t base_seed, Index knob_index,
                              int repetition) {
  return derive_seed(base_seed ^ kTagSample,
                     static_cast<std::uint64_t>(knob_index),
                     static_cast<std::uint64_t>(repetition));
}

std::uint64_t fit_seed_for(std::uint64_t base_seed, Index knob_index,
                           int repetition) {
  return derive_seed(base_seed ^ kTagFit,
                     static_cast<std::uint64_t>(knob_index),
                     static_cast<std::uint64_t>(repetition));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  check_experiment_config(cfg);

  ExperimentResult result;
  result.config = cfg;
  result.per_knob.reserve(cfg.knobs.size());

  for (size_t q = 0; q < cfg.knobs.size(); ++q) {
    const Index knob_index = static_cast<Index>(q);
    KnobResult knob_result;
    knob_result.knob = cfg.knobs[q];

    ModelParams params =
        make_paper_params(cfg.id, cfg.knobs[q],
                          theta_seed_for(cfg.base_seed, knob_index),
                          cfg.overrides);
    Matrix omega = population_matrix(params);

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      RepetitionOutcome outcome;
      try {
        BinaryAdjacency a = sample_adjacency(
            omega, sample_seed_for(cfg.base_seed, knob_index, rep));
        PrunedNetwork pruned = prune_isolated(a, params.pi_r, params.pi_c);
        outcome.n_r_pruned = pruned.a.rows;
        outcome.n_c_pruned = pruned.a.cols;
        MembershipEstimate est = fit_dimsc(
            pruned.a, params.k, fit_seed_for(cfg.base_seed, knob_index, rep));
        ErrorReport report =
            make_error_report(est.pi_r, pruned.pi_r, est.pi_c, pruned.pi_c);
        outcome.row_mhamm = report.row_mhamm;
        outcome.col_mhamm = report.col_mhamm;
        outcome.ok = true;
      } catch (const Error& e) {
        outcome.ok = false;
        outcome.error = e.what();
      }
      knob_result.reps.push_back(std::move(outcome));
    }

    double sum_row = 0.0, sum_col = 0.0, sum_nra = 0.0, sum_nca = 0.0;
    for (const auto& rep : knob_result.reps) {
      if (rep.ok) {
        ++knob_result.reps_ok;
        sum_row += rep.row_mhamm;
        sum_col += rep.col_mhamm;
        sum_nra += static_cast<double>(rep.n_r_pruned);
        sum_nca += static_cast<double>(rep.n_c_pruned);
      } else {
        ++knob_result.reps_failed;
      }
    }
    if (knob_result.reps_ok > 0) {
      double m = static_cast<double>(knob_result.reps_ok);
      knob_result.mean_row_mhamm = sum_row / m;
      knob_result.mean_col_mhamm = sum_col / m;
      knob_result.mean_nra = sum_nra / m;
      knob_result.mean_nca = sum_nca / m;
      if (knob_result.reps_ok > 1) {
        double var_row = 0.0, var_col = 0.0;
        for (const auto& rep : knob_result.reps) {
          if (!rep.ok) continue;
          var_row += (rep.row_mhamm - knob_result.mean_row_mhamm) *
                     (rep.row_mhamm - knob_result.mean_row_mhamm);
          var_col += (rep.col_mhamm - knob_result.mean_col_mhamm) *
                     (rep.col_mhamm - knob_result.mean_col_mhamm);
        }
        knob_result.se_row = std::sqrt(var_row / (m - 1.0) / m);
        knob_result.se_col = std::sqrt(var_col / (m - 1.0) / m);
      }
    }
    result.per_knob.push_back(std::move(knob_result));
  }
  return result;
}

}  // namespace dimsc
