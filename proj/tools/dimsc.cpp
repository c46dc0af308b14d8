// Command-line frontend: simulate DiDCMM networks, fit DiMSC memberships,
// evaluate against ground truth, and run the simulation experiment grids.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "dimsc/errors.hpp"
#include "dimsc/estimator.hpp"
#include "dimsc/experiments.hpp"
#include "dimsc/io.hpp"
#include "dimsc/metrics.hpp"
#include "dimsc/model.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

void check_sections(const dimsc::RunConfig& cfg,
                    const std::set<std::string>& allowed) {
  for (const auto& [name, keys] : cfg.sections) {
    (void)keys;
    if (!allowed.count(name)) {
      throw dimsc::ConfigError("config: unknown section [" + name + "]");
    }
  }
}

std::string output_dir(const dimsc::RunConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (cfg.has("output", "dir")) return cfg.get("output", "dir");
  return ".";
}

int print_validation(const dimsc::ValidationReport& report) {
  if (report.ok) {
    std::cout << "valid\n";
    std::cout << "pure row nodes:";
    for (auto i : report.pure.rows) std::cout << " " << i;
    std::cout << "\npure column nodes:";
    for (auto j : report.pure.cols) std::cout << " " << j;
    std::cout << "\n";
    return 0;
  }
  std::cout << "invalid (" << report.violations.size() << " violations)\n";
  for (const auto& v : report.violations) {
    std::cout << "  " << v << "\n";
  }
  return 2;
}

int run_simulate(const std::string& config_path, const std::string& out_flag,
                 std::uint64_t seed, bool validate_only) {
  dimsc::RunConfig cfg = dimsc::parse_config_file(config_path);
  check_sections(cfg, {"model", "output"});
  dimsc::ModelParams params = dimsc::params_from_config(cfg);
  auto report = dimsc::validate(params);
  if (!report.ok || validate_only) {
    return print_validation(report);
  }

  dimsc::Matrix omega = dimsc::population_matrix(params);
  dimsc::BinaryAdjacency a = dimsc::sample_adjacency(omega, seed);
  dimsc::PrunedNetwork pruned =
      dimsc::prune_isolated(a, params.pi_r, params.pi_c);

  fs::path dir(output_dir(cfg, out_flag));
  dimsc::write_edge_list(pruned.a, (dir / "edges.tsv").string());
  dimsc::write_membership_csv(pruned.pi_r, (dir / "true_pi_r.csv").string());
  dimsc::write_membership_csv(pruned.pi_c, (dir / "true_pi_c.csv").string());
  std::cout << "wrote " << (dir / "edges.tsv").string() << " ("
            << pruned.a.rows << "x" << pruned.a.cols << ", " << pruned.a.nnz()
            << " edges; pruned " << (a.rows - pruned.a.rows) << " rows, "
            << (a.cols - pruned.a.cols) << " columns)\n";
  return 0;
}

int run_fit(const std::string& edges_path, dimsc::Index k, std::uint64_t seed,
            const std::string& out_dir, bool equivalence) {
  dimsc::BinaryAdjacency a = dimsc::read_edge_list(edges_path);
  dimsc::MembershipEstimate est =
      equivalence ? dimsc::fit_dimsc_equivalence(a, k, seed)
                  : dimsc::fit_dimsc(a, k, seed);
  dimsc::write_memberships(est, out_dir);
  std::cout << "wrote " << (fs::path(out_dir) / "pi_r.csv").string() << ", "
            << (fs::path(out_dir) / "pi_c.csv").string() << ", "
            << (fs::path(out_dir) / "diagnostics.txt").string() << "\n";
  return 0;
}

int run_eval(const std::string& est_path, const std::string& truth_path) {
  dimsc::Matrix est = dimsc::read_membership_csv(est_path);
  dimsc::Matrix truth = dimsc::read_membership_csv(truth_path);
  dimsc::MixedHamming mh = dimsc::mixed_hamming(est, truth);
  nlohmann::json out;
  out["mhamm"] = mh.value;
  out["permutation"] = mh.perm;
  std::cout << out.dump() << "\n";
  return 0;
}

int run_experiment_cmd(const std::string& config_path,
                       const std::string& out_flag, int reps_override,
                       bool validate_only) {
  dimsc::RunConfig cfg = dimsc::parse_config_file(config_path);
  check_sections(cfg, {"experiment", "output"});
  dimsc::ExperimentConfig ec = dimsc::experiment_from_config(cfg);
  if (reps_override > 0) {
    ec.repetitions = reps_override;
  }
  auto warnings = dimsc::check_experiment_config(ec);
  for (const auto& w : warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (validate_only) {
    std::cout << "valid experiment config: " << dimsc::to_string(ec.id) << ", "
              << ec.knobs.size() << " knobs, " << ec.repetitions
              << " repetitions\n";
    return 0;
  }

  std::string out_path = !out_flag.empty()         ? out_flag
                         : cfg.has("output", "csv") ? cfg.get("output", "csv")
                                                    : "experiment_results.csv";
  dimsc::ExperimentResult result = dimsc::run_experiment(ec);
  dimsc::write_experiment_csv(result, out_path);
  int failed = 0;
  for (const auto& knob : result.per_knob) failed += knob.reps_failed;
  std::cout << "wrote " << out_path << " (" << result.per_knob.size()
            << " knobs x " << ec.repetitions << " repetitions";
  if (failed > 0) std::cout << ", " << failed << " failed repetitions";
  std::cout << ")\n";
  return 0;
}

int run_validate(const std::string& config_path) {
  dimsc::RunConfig cfg = dimsc::parse_config_file(config_path);
  check_sections(cfg, {"model", "output"});
  dimsc::ModelParams params = dimsc::params_from_config(cfg);
  return print_validation(dimsc::validate(params));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DiDCMM network simulation and DiMSC membership estimation"};
  app.require_subcommand(1);

  std::string config_path, edges_path, est_path, truth_path;
  std::string out_dir, out_csv;
  std::uint64_t seed = 0;
  dimsc::Index k = 0;
  int reps = 0;
  bool equivalence = false;
  bool validate_only = false;

  auto* simulate = app.add_subcommand(
      "simulate", "Sample a network from a model config (edge list + truth)");
  simulate->add_option("--config", config_path, "model config file")
      ->required();
  simulate->add_option("--out-dir", out_dir, "output directory");
  simulate->add_option("--seed", seed, "adjacency sampling seed");
  simulate->add_flag("--validate-only", validate_only,
                     "validate the config and exit");

  auto* fit = app.add_subcommand(
      "fit", "Estimate memberships from an edge list with K communities");
  fit->add_option("--edges", edges_path, "edge list file")->required();
  fit->add_option("--k", k, "number of communities")->required();
  fit->add_option("--seed", seed, "K-means seed");
  fit->add_option("--out-dir", out_dir, "output directory")->required();
  fit->add_flag("--equivalence", equivalence,
                "use the projector-matrix pipeline");

  auto* eval = app.add_subcommand(
      "eval", "Mixed-Hamming error between estimated and true memberships");
  eval->add_option("--est", est_path, "estimated membership CSV")->required();
  eval->add_option("--truth", truth_path, "true membership CSV")->required();

  auto* experiment = app.add_subcommand(
      "experiment", "Run a simulation experiment grid to a CSV");
  experiment->add_option("--config", config_path, "experiment config file")
      ->required();
  experiment->add_option("--out", out_csv, "output CSV path");
  experiment->add_option("--reps", reps, "override repetition count");
  experiment->add_flag("--validate-only", validate_only,
                       "validate the config and exit");

  auto* validate = app.add_subcommand(
      "validate", "Check model invariants for a config file");
  validate->add_option("--config", config_path, "model config file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (simulate->parsed()) {
      return run_simulate(config_path, out_dir, seed, validate_only);
    }
    if (fit->parsed()) {
      return run_fit(edges_path, k, seed, out_dir, equivalence);
    }
    if (eval->parsed()) {
      return run_eval(est_path, truth_path);
    }
    if (experiment->parsed()) {
      return run_experiment_cmd(config_path, out_csv, reps, validate_only);
    }
    if (validate->parsed()) {
      return run_validate(config_path);
    }
  } catch (const dimsc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
