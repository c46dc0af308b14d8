#include <filesystem>
#include <fstream>

#include "dimsc/errors.hpp"
#include "dimsc/estimator.hpp"
#include "dimsc/experiments.hpp"
#include "dimsc/io.hpp"
#include "dimsc/model.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace dimsc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dimsc_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("edge list round trip is lossless") {
  TempDir tmp;
  ModelParams params = test::fixed_seed_instance();
  auto a = sample_adjacency(population_matrix(params), 33);
  write_edge_list(a, tmp.file("net.tsv"));
  auto back = read_edge_list(tmp.file("net.tsv"));
  CHECK(back == a);
  CHECK(!fs::exists(tmp.file("net.tsv.tmp")));
}

TEST_CASE("edge list parsing") {
  TempDir tmp;
  write_text(tmp.file("ok.tsv"), "# a comment\n#dims 2 2\n0\t1\n");
  auto a = read_edge_list(tmp.file("ok.tsv"));
  CHECK(a.rows == 2);
  CHECK(a.cols == 2);
  REQUIRE(a.nnz() == 1);
  CHECK(a.ones[0] == std::pair<Index, Index>{0, 1});

  write_text(tmp.file("dup.tsv"), "#dims 2 2\n0\t1\n0\t1\n");
  CHECK_THROWS_WITH_AS(read_edge_list(tmp.file("dup.tsv")),
                       doctest::Contains(":3"), ParseError);

  write_text(tmp.file("range.tsv"), "#dims 2 2\n0\t5\n");
  CHECK_THROWS_AS(read_edge_list(tmp.file("range.tsv")), ParseError);

  write_text(tmp.file("nohdr.tsv"), "0\t1\n");
  CHECK_THROWS_AS(read_edge_list(tmp.file("nohdr.tsv")), ParseError);

  write_text(tmp.file("bad.tsv"), "#dims 2 2\n0 1\n");
  CHECK_THROWS_WITH_AS(read_edge_list(tmp.file("bad.tsv")),
                       doctest::Contains("i<TAB>j"), ParseError);

  CHECK_THROWS_AS(read_edge_list(tmp.file("missing.tsv")), IoError);
}

TEST_CASE("membership csv round trip at declared precision") {
  TempDir tmp;
  ModelParams params = test::fixed_seed_instance();
  auto est = fit_ideal(population_matrix(params), params.k);
  write_membership_csv(est.pi_r, tmp.file("pi.csv"));
  Matrix back = read_membership_csv(tmp.file("pi.csv"));
  REQUIRE(back.rows() == est.pi_r.rows());
  CHECK((back - est.pi_r).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("membership csv writes K=1 weights as exactly 1") {
  TempDir tmp;
  write_membership_csv(Matrix::Ones(3, 1), tmp.file("one.csv"));
  std::string text = read_text(tmp.file("one.csv"));
  CHECK(text == "node,k1\n0,1\n1,1\n2,1\n");
}

TEST_CASE("membership csv with zero rows is header-only") {
  TempDir tmp;
  write_membership_csv(Matrix(0, 3), tmp.file("empty.csv"));
  CHECK(read_text(tmp.file("empty.csv")) == "node,k1,k2,k3\n");
  Matrix back = read_membership_csv(tmp.file("empty.csv"));
  CHECK(back.rows() == 0);
  CHECK(back.cols() == 3);
}

TEST_CASE("membership csv rejects malformed content") {
  TempDir tmp;
  write_text(tmp.file("hdr.csv"), "id,k1,k2\n0,0.5,0.5\n");
  CHECK_THROWS_AS(read_membership_csv(tmp.file("hdr.csv")), ParseError);

  write_text(tmp.file("sum.csv"), "node,k1,k2\n0,0.6,0.6\n");
  CHECK_THROWS_AS(read_membership_csv(tmp.file("sum.csv")), ParseError);

  write_text(tmp.file("order.csv"), "node,k1,k2\n1,0.5,0.5\n");
  CHECK_THROWS_AS(read_membership_csv(tmp.file("order.csv")), ParseError);
}

TEST_CASE("write_memberships emits the three artifact files") {
  TempDir tmp;
  ModelParams params = test::fixed_seed_instance();
  auto est = fit_ideal(population_matrix(params), params.k);
  write_memberships(est, tmp.file("out"));
  CHECK(fs::exists(tmp.file("out") + "/pi_r.csv"));
  CHECK(fs::exists(tmp.file("out") + "/pi_c.csv"));
  std::string diag = read_text(tmp.file("out") + "/diagnostics.txt");
  CHECK(diag.find("i_r:") != std::string::npos);
  CHECK(diag.find("corner_cond_r:") != std::string::npos);
  CHECK(diag.find("theta_mean:") != std::string::npos);
}

TEST_CASE("format_sig12") {
  CHECK(format_sig12(1.0) == "1");
  CHECK(format_sig12(0.4) == "0.4");
  CHECK(format_sig12(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("experiment csv is deterministic bytes") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.id = ExperimentId::sparsity;
  cfg.knobs = {0.6, 1.0};
  cfg.repetitions = 2;
  cfg.base_seed = 77;
  cfg.overrides.n_r = 120;
  cfg.overrides.n_c = 144;
  cfg.overrides.pure_per_community = 20;

  auto result = run_experiment(cfg);
  write_experiment_csv(result, tmp.file("a.csv"));
  write_experiment_csv(run_experiment(cfg), tmp.file("b.csv"));
  std::string a = read_text(tmp.file("a.csv"));
  CHECK(a == read_text(tmp.file("b.csv")));
  CHECK(a.rfind("knob,mean_row_mhamm,se_row,mean_col_mhamm,se_col,reps_ok,"
                "reps_failed,mean_nrA,mean_ncA\n", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 3);  // header + 2 knobs
}

TEST_CASE("config parsing is strict") {
  auto cfg = parse_config_text(
      "# comment\n"
      "[model]\n"
      "n_r = 20\n"
      "n_c = 16\n"
      "k = 2\n"
      "p = 1 0.2 ; 0.3 1\n"
      "pure_per_community = 4\n"
      "mixed_rows = 1/2 1/2 ; 0.7 0.3\n"
      "theta_z = 2\n"
      "theta_rho = 0.8\n"
      "theta_seed = 5\n");
  ModelParams params = params_from_config(cfg);
  CHECK(params.n_r == 20);
  CHECK(params.k == 2);
  CHECK(params.pi_r(8, 0) == 0.5);  // first mixed block, fraction syntax
  CHECK(validate(params).ok);

  // Matches the library construction with the same pieces.
  BlockDesign design;
  design.n_r = 20;
  design.n_c = 16;
  design.k = 2;
  design.pure_per_community = 4;
  design.mixed_rows = Matrix(2, 2);
  design.mixed_rows << 0.5, 0.5, 0.7, 0.3;
  design.p = Matrix(2, 2);
  design.p << 1, 0.2, 0.3, 1;
  design.z = 2;
  design.rho = 0.8;
  ModelParams direct = build_block_params(design, 5);
  CHECK((params.pi_r - direct.pi_r).cwiseAbs().maxCoeff() == 0.0);
  CHECK((params.theta_r - direct.theta_r).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(params_from_config(parse_config_text(
                      "[model]\nn_r = 10\ntypo_key = 3\n")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\nk = 2\nk = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("k = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text("[model\nk = 2\n"), ParseError);
}

TEST_CASE("experiment config parsing") {
  auto cfg = parse_config_text(
      "[experiment]\n"
      "id = sparsity\n"
      "knobs = 0.2 0.6 1\n"
      "repetitions = 4\n"
      "base_seed = 11\n"
      "n_r = 100\n"
      "n_c = 120\n"
      "pure_per_community = 16\n");
  ExperimentConfig ec = experiment_from_config(cfg);
  CHECK(ec.id == ExperimentId::sparsity);
  CHECK(ec.knobs == std::vector<double>{0.2, 0.6, 1.0});
  CHECK(ec.repetitions == 4);
  CHECK(ec.base_seed == 11);
  CHECK(*ec.overrides.n_r == 100);

  CHECK_THROWS_AS(
      experiment_from_config(parse_config_text("[experiment]\nid = bogus\n"
                                               "knobs = 1\n")),
      ConfigError);
}

TEST_CASE("explicit theta list overrides sampling") {
  auto cfg = parse_config_text(
      "[model]\n"
      "n_r = 4\n"
      "n_c = 4\n"
      "k = 1\n"
      "p = 1\n"
      "pure_per_community = 4\n"
      "theta = 0.1 0.2 0.3 0.4\n");
  ModelParams params = params_from_config(cfg);
  CHECK(params.theta_r(0) == 0.1);
  CHECK(params.theta_r(3) == 0.4);

  CHECK_THROWS_AS(params_from_config(parse_config_text(
                      "[model]\nn_r = 4\nn_c = 4\nk = 1\np = 1\n"
                      "pure_per_community = 4\ntheta = 0.1 0.2\n")),
                  ConfigError);
}
