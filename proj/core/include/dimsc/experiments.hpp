#ifndef DIMSC_EXPERIMENTS_HPP
#define DIMSC_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimsc/model.hpp"
#include "dimsc/types.hpp"

namespace dimsc {

enum class ExperimentId {
  pure_fraction,         // knob: n0, pure nodes per community
  degree_heterogeneity,  // knob: z, with 1/theta_bar ~ U(1, z)
  connectivity,          // knob: beta, P = (2-beta) I + (beta-1) 11'
  sparsity,              // knob: rho, theta_r = rho * theta_bar
};

std::string to_string(ExperimentId id);
ExperimentId experiment_id_from_string(const std::string& name);

/// Block layout for membership matrices: K pure blocks of n0 nodes each,
/// then one contiguous block per mixed membership row. With strict_split
/// the mixed nodes must divide evenly across the blocks; otherwise the
/// remainder goes one extra node per leading block.
struct BlockDesign {
  Index n_r = 500;
  Index n_c = 600;
  Index k = 3;
  Index pure_per_community = 80;
  Matrix mixed_rows;  // B x K, PMF rows; empty means no mixed nodes
  Matrix p;
  double z = 5.0;
  double rho = 1.0;
  bool strict_split = true;
};

ModelParams build_block_params(const BlockDesign& design,
                               std::uint64_t theta_seed);

/// Simulation defaults: n_r = 500, n_c = 600, K = 3, n0 = 80 pure nodes per
/// community, mixed memberships (0.4,0.4,0.2), (0.4,0.2,0.4), (0.2,0.4,0.4),
/// (1/3,1/3,1/3) in equal blocks, 1/theta_bar ~ U(1,5), rho = 1, and
///   P = [1 0.1 0.3; 0.2 1 0.4; 0.5 0.2 1].
Matrix default_mixing_matrix();
Matrix default_mixed_rows();

struct ExperimentOverrides {
  std::optional<Index> n_r;
  std::optional<Index> n_c;
  std::optional<Index> pure_per_community;
  std::optional<double> z;
  std::optional<double> rho;
};

/// The fully specified parameters for one grid point of the four
/// simulation experiments. The connectivity experiment rescales theta by
/// max(P) after construction. Throws ConfigError when the mixed-node count
/// does not divide evenly.
ModelParams make_paper_params(ExperimentId id, double knob,
                              std::uint64_t theta_seed = 0,
                              const ExperimentOverrides& overrides = {});

/// theta(i) = rho / u_i with u_i uniform on [1, z].
Vector sample_theta(double z, double rho, Index n_r, std::uint64_t seed);

struct ExperimentConfig {
  ExperimentId id = ExperimentId::sparsity;
  std::vector<double> knobs;
  int repetitions = 10;  // reference value 50; 10 preserves the trends
  std::uint64_t base_seed = 0;
  ExperimentOverrides overrides;
};

/// Range checks plus the near-singular connectivity flag (|beta - 2| <
/// 0.05). Violations throw ConfigError; flags come back as warnings.
std::vector<std::string> check_experiment_config(const ExperimentConfig& cfg);

struct RepetitionOutcome {
  bool ok = false;
  double row_mhamm = 0.0;
  double col_mhamm = 0.0;
  Index n_r_pruned = 0;
  Index n_c_pruned = 0;
  std::string error;  // set when !ok
};

struct KnobResult {
  double knob = 0.0;
  double mean_row_mhamm = 0.0;
  double se_row = 0.0;
  double mean_col_mhamm = 0.0;
  double se_col = 0.0;
  int reps_ok = 0;
  int reps_failed = 0;
  double mean_nra = 0.0;
  double mean_nca = 0.0;
  std::vector<RepetitionOutcome> reps;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<KnobResult> per_knob;
};

/// The full (a)-(e) loop: build params per knob, then per repetition sample,
/// prune, fit, score; failed repetitions are recorded and excluded from the
/// means with a count. A pure function of the config.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Seed streams, exposed so external drivers can reproduce single
// repetitions byte-for-byte.
std::uint64_t theta_seed_for(std::uint64_t base_seed, Index knob_index);
std::uint64_t sample_seed_for(std::uint64_t base_seed, Index knob_index,
                              int repetition);
std::uint64_t fit_seed_for(std::uint64_t base_seed, Index knob_index,
                           int repetition);

}  // namespace dimsc

#endif
