#ifndef DIMSC_IO_HPP
#define DIMSC_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "dimsc/estimator.hpp"
#include "dimsc/experiments.hpp"
#include "dimsc/model.hpp"
#include "dimsc/types.hpp"

namespace dimsc {

// ---------------------------------------------------------------------------
// Edge lists: header "#dims n_r n_c", then one "i<TAB>j" line per edge with
// 0-based indices. '#' starts a comment line. Duplicates are rejected.
// ---------------------------------------------------------------------------

BinaryAdjacency read_edge_list(const std::string& path);
void write_edge_list(const BinaryAdjacency& a, const std::string& path);

// ---------------------------------------------------------------------------
// Membership CSV: header "node,k1,...,kK", one row per node, weights at 12
// significant digits.
// ---------------------------------------------------------------------------

Matrix read_membership_csv(const std::string& path);
void write_membership_csv(const Matrix& pi, const std::string& path);

/// pi_r.csv, pi_c.csv and diagnostics.txt (corner indices, theta summary,
/// condition numbers, clip counts) under dir.
void write_memberships(const MembershipEstimate& estimate,
                       const std::string& dir);

// ---------------------------------------------------------------------------
// Experiment CSV: one row per knob value.
// ---------------------------------------------------------------------------

void write_experiment_csv(const ExperimentResult& result,
                          const std::string& path);

// ---------------------------------------------------------------------------
// Run configuration: "[section]" headers and "key = value" lines, '#'
// comments. Parsing is strict: unknown sections or keys are errors. Numbers
// accept plain decimals and p/q fractions.
// ---------------------------------------------------------------------------

struct RunConfig {
  // section -> key -> raw value string
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section,
                         const std::string& key) const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "<string>");

/// [model] section -> ModelParams via the block layout of
/// build_block_params. Required keys: n_r, n_c, k, p, pure_per_community,
/// mixed_rows; optional: theta_z, theta_rho, theta_seed, theta (explicit
/// list), strict_split, scale_theta_by_pmax.
ModelParams params_from_config(const RunConfig& cfg);

/// [experiment] section -> ExperimentConfig. Required: id, knobs; optional:
/// repetitions, base_seed, and the override knobs n_r, n_c,
/// pure_per_community, theta_z, theta_rho.
ExperimentConfig experiment_from_config(const RunConfig& cfg);

// 12-significant-digit decimal formatting used by every writer.
std::string format_sig12(double x);

// Write-temp-then-rename so partial files never land at the target path.
void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace dimsc

#endif
