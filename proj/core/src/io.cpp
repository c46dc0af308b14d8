#include "dimsc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dimsc/errors.hpp"

namespace dimsc {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  size_t first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  size_t last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream stream(s);
  std::string token;
  while (stream >> token) out.push_back(token);
  return out;
}

// Plain decimal or p/q fraction.
double parse_number(const std::string& raw, const std::string& where) {
  std::string s = trim(raw);
  auto slash = s.find('/');
  try {
    size_t used = 0;
    if (slash != std::string::npos) {
      std::string num = trim(s.substr(0, slash));
      std::string den = trim(s.substr(slash + 1));
      double p = std::stod(num, &used);
      if (used != num.size()) throw std::invalid_argument(num);
      double q = std::stod(den, &used);
      if (used != den.size()) throw std::invalid_argument(den);
      if (q == 0.0) throw std::invalid_argument("zero denominator");
      return p / q;
    }
    double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ParseError(where + ": cannot parse number '" + raw + "'");
  }
}

long long parse_int(const std::string& raw, const std::string& where) {
  std::string s = trim(raw);
  try {
    size_t used = 0;
    long long x = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ParseError(where + ": cannot parse integer '" + raw + "'");
  }
}

std::uint64_t parse_u64(const std::string& raw, const std::string& where) {
  std::string s = trim(raw);
  try {
    size_t used = 0;
    unsigned long long x = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ParseError(where + ": cannot parse seed '" + raw + "'");
  }
}

bool parse_bool(const std::string& raw, const std::string& where) {
  std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError(where + ": cannot parse boolean '" + raw + "'");
}

// Rows separated by ';', entries by whitespace.
Matrix parse_matrix(const std::string& raw, const std::string& where) {
  std::vector<std::vector<double>> rows;
  std::string piece;
  std::istringstream stream(raw);
  while (std::getline(stream, piece, ';')) {
    std::vector<double> row;
    for (const auto& token : split_ws(piece)) {
      row.push_back(parse_number(token, where));
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError(where + ": empty matrix");
  }
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw ParseError(where + ": ragged matrix rows");
    }
    for (size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::vector<double> parse_number_list(const std::string& raw,
                                      const std::string& where) {
  std::vector<double> out;
  for (const auto& token : split_ws(raw)) {
    out.push_back(parse_number(token, where));
  }
  return out;
}

void reject_unknown_keys(const RunConfig& cfg, const std::string& section,
                         const std::set<std::string>& known) {
  auto it = cfg.sections.find(section);
  if (it == cfg.sections.end()) return;
  for (const auto& [key, value] : it->second) {
    (void)value;
    if (!known.count(key)) {
      throw ConfigError("config: unknown key '" + key + "' in [" + section +
                        "]");
    }
  }
}

}  // namespace

std::string format_sig12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out << contents;
    if (!out.flush()) {
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw IoError("cannot rename '" + tmp.string() + "' to '" +
                  target.string() + "': " + ec.message());
  }
}

// --- edge lists --------------------------------------------------------------

BinaryAdjacency read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open edge list '" + path + "'");
  }
  BinaryAdjacency a;
  bool have_dims = false;
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string where = path + ":" + std::to_string(line_no);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (t.rfind("#dims", 0) == 0) {
        if (have_dims) {
          throw ParseError(where + ": repeated #dims header");
        }
        auto tokens = split_ws(t.substr(5));
        if (tokens.size() != 2) {
          throw ParseError(where + ": #dims needs exactly n_r and n_c");
        }
        a.rows = parse_int(tokens[0], where);
        a.cols = parse_int(tokens[1], where);
        if (a.rows < 0 || a.cols < 0) {
          throw ParseError(where + ": negative dimensions");
        }
        have_dims = true;
      }
      continue;  // other '#' lines are comments
    }
    if (!have_dims) {
      throw ParseError(where + ": edge before the #dims header");
    }
    auto tab = t.find('\t');
    if (tab == std::string::npos || t.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(where + ": expected 'i<TAB>j'");
    }
    Index i = parse_int(t.substr(0, tab), where);
    Index j = parse_int(t.substr(tab + 1), where);
    if (i < 0 || i >= a.rows || j < 0 || j >= a.cols) {
      throw ParseError(where + ": edge (" + std::to_string(i) + ", " +
                       std::to_string(j) + ") outside declared dims " +
                       std::to_string(a.rows) + "x" + std::to_string(a.cols));
    }
    std::uint64_t key = static_cast<std::uint64_t>(i) *
                            static_cast<std::uint64_t>(a.cols) +
                        static_cast<std::uint64_t>(j);
    if (!seen.insert(key).second) {
      throw ParseError(where + ": duplicate edge (" + std::to_string(i) +
                       ", " + std::to_string(j) + ")");
    }
    a.ones.emplace_back(i, j);
  }
  if (!have_dims) {
    throw ParseError(path + ": missing #dims header");
  }
  std::sort(a.ones.begin(), a.ones.end());
  return a;
}

void write_edge_list(const BinaryAdjacency& a, const std::string& path) {
  std::ostringstream out;
  out << "#dims " << a.rows << " " << a.cols << "\n";
  std::vector<std::pair<Index, Index>> sorted = a.ones;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [i, j] : sorted) {
    out << i << "\t" << j << "\n";
  }
  atomic_write_file(path, out.str());
}

// --- membership CSVs ---------------------------------------------------------

Matrix read_membership_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open membership CSV '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path + ": empty file");
  }
  std::vector<std::string> header;
  {
    std::istringstream stream(trim(line));
    std::string cell;
    while (std::getline(stream, cell, ',')) header.push_back(trim(cell));
  }
  if (header.size() < 2 || header[0] != "node") {
    throw ParseError(path + ": header must be node,k1,...,kK");
  }
  const Index k = static_cast<Index>(header.size()) - 1;
  for (Index c = 0; c < k; ++c) {
    if (header[c + 1] != "k" + std::to_string(c + 1)) {
      throw ParseError(path + ": header must be node,k1,...,kK");
    }
  }

  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    std::string where = path + ":" + std::to_string(line_no);
    std::vector<std::string> cells;
    std::istringstream stream(t);
    std::string cell;
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (static_cast<Index>(cells.size()) != k + 1) {
      throw ParseError(where + ": expected " + std::to_string(k + 1) +
                       " fields");
    }
    long long node = parse_int(cells[0], where);
    if (node != static_cast<long long>(rows.size())) {
      throw ParseError(where + ": node indices must run 0,1,2,...");
    }
    std::vector<double> w(k);
    double sum = 0.0;
    for (Index c = 0; c < k; ++c) {
      w[c] = parse_number(cells[c + 1], where);
      sum += w[c];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ParseError(where + ": weights sum to " + std::to_string(sum) +
                       ", not 1");
    }
    rows.push_back(std::move(w));
  }

  Matrix pi(static_cast<Index>(rows.size()), k);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (Index c = 0; c < k; ++c) {
      pi(static_cast<Index>(i), c) = rows[i][c];
    }
  }
  return pi;
}

void write_membership_csv(const Matrix& pi, const std::string& path) {
  std::ostringstream out;
  out << "node";
  for (Index c = 0; c < pi.cols(); ++c) {
    out << ",k" << (c + 1);
  }
  out << "\n";
  for (Index i = 0; i < pi.rows(); ++i) {
    out << i;
    for (Index c = 0; c < pi.cols(); ++c) {
      out << "," << format_sig12(pi(i, c));
    }
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

void write_memberships(const MembershipEstimate& estimate,
                       const std::string& dir) {
  fs::path base(dir);
  std::error_code ec;
  fs::create_directories(base, ec);

  write_membership_csv(estimate.pi_r, (base / "pi_r.csv").string());
  write_membership_csv(estimate.pi_c, (base / "pi_c.csv").string());

  std::ostringstream diag;
  diag << "n_r: " << estimate.pi_r.rows() << "\n";
  diag << "n_c: " << estimate.pi_c.rows() << "\n";
  diag << "k: " << estimate.pi_r.cols() << "\n";
  diag << "i_r:";
  for (Index i : estimate.i_r) diag << " " << i;
  diag << "\n";
  diag << "i_c:";
  for (Index i : estimate.i_c) diag << " " << i;
  diag << "\n";
  if (estimate.theta_r.size() > 0) {
    diag << "theta_min: " << format_sig12(estimate.theta_r.minCoeff()) << "\n";
    diag << "theta_mean: " << format_sig12(estimate.theta_r.mean()) << "\n";
    diag << "theta_max: " << format_sig12(estimate.theta_r.maxCoeff()) << "\n";
  }
  diag << "corner_cond_r: " << format_sig12(estimate.diag.corner_cond_r)
       << "\n";
  diag << "corner_cond_c: " << format_sig12(estimate.diag.corner_cond_c)
       << "\n";
  diag << "clipped_entries_r: " << estimate.diag.clipped_entries_r << "\n";
  diag << "clipped_entries_c: " << estimate.diag.clipped_entries_c << "\n";
  diag << "uniform_rows_r: " << estimate.diag.uniform_rows_r << "\n";
  diag << "uniform_rows_c: " << estimate.diag.uniform_rows_c << "\n";
  diag << "clamped_j_diag: " << estimate.diag.clamped_j_diag << "\n";
  atomic_write_file((base / "diagnostics.txt").string(), diag.str());
}

// --- experiment CSV ----------------------------------------------------------

void write_experiment_csv(const ExperimentResult& result,
                          const std::string& path) {
  std::ostringstream out;
  out << "knob,mean_row_mhamm,se_row,mean_col_mhamm,se_col,reps_ok,"
         "reps_failed,mean_nrA,mean_ncA\n";
  for (const auto& knob : result.per_knob) {
    out << format_sig12(knob.knob) << "," << format_sig12(knob.mean_row_mhamm)
        << "," << format_sig12(knob.se_row) << ","
        << format_sig12(knob.mean_col_mhamm) << ","
        << format_sig12(knob.se_col) << "," << knob.reps_ok << ","
        << knob.reps_failed << "," << format_sig12(knob.mean_nra) << ","
        << format_sig12(knob.mean_nca) << "\n";
  }
  atomic_write_file(path, out.str());
}

// --- run configuration -------------------------------------------------------

bool RunConfig::has(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

const std::string& RunConfig::get(const std::string& section,
                                  const std::string& key) const {
  auto it = sections.find(section);
  if (it == sections.end()) {
    throw ConfigError("config: missing section [" + section + "]");
  }
  auto kit = it->second.find(key);
  if (kit == it->second.end()) {
    throw ConfigError("config: missing key '" + key + "' in [" + section +
                      "]");
  }
  return kit->second;
}

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string where = origin + ":" + std::to_string(line_no);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ParseError(where + ": malformed section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) {
        throw ParseError(where + ": empty section name");
      }
      if (cfg.sections.count(section)) {
        throw ConfigError(where + ": duplicate section [" + section + "]");
      }
      cfg.sections[section] = {};
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError(where + ": expected 'key = value'");
    }
    if (section.empty()) {
      throw ParseError(where + ": key outside any [section]");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(where + ": empty key");
    }
    if (cfg.sections[section].count(key)) {
      throw ConfigError(where + ": duplicate key '" + key + "' in [" +
                        section + "]");
    }
    cfg.sections[section][key] = value;
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

ModelParams params_from_config(const RunConfig& cfg) {
  reject_unknown_keys(cfg, "model",
                      {"n_r", "n_c", "k", "p", "pure_per_community",
                       "mixed_rows", "theta_z", "theta_rho", "theta_seed",
                       "theta", "strict_split", "scale_theta_by_pmax"});

  BlockDesign design;
  design.n_r = parse_int(cfg.get("model", "n_r"), "[model] n_r");
  design.n_c = parse_int(cfg.get("model", "n_c"), "[model] n_c");
  design.k = parse_int(cfg.get("model", "k"), "[model] k");
  design.p = parse_matrix(cfg.get("model", "p"), "[model] p");
  design.pure_per_community =
      parse_int(cfg.get("model", "pure_per_community"),
                "[model] pure_per_community");
  if (cfg.has("model", "mixed_rows")) {
    design.mixed_rows =
        parse_matrix(cfg.get("model", "mixed_rows"), "[model] mixed_rows");
  }
  if (cfg.has("model", "theta_z")) {
    design.z = parse_number(cfg.get("model", "theta_z"), "[model] theta_z");
  }
  if (cfg.has("model", "theta_rho")) {
    design.rho =
        parse_number(cfg.get("model", "theta_rho"), "[model] theta_rho");
  }
  if (cfg.has("model", "strict_split")) {
    design.strict_split =
        parse_bool(cfg.get("model", "strict_split"), "[model] strict_split");
  }
  std::uint64_t theta_seed = 0;
  if (cfg.has("model", "theta_seed")) {
    theta_seed =
        parse_u64(cfg.get("model", "theta_seed"), "[model] theta_seed");
  }

  ModelParams params = build_block_params(design, theta_seed);
  if (cfg.has("model", "theta")) {
    auto values = parse_number_list(cfg.get("model", "theta"), "[model] theta");
    if (static_cast<Index>(values.size()) != params.n_r) {
      throw ConfigError("config: theta list has " +
                        std::to_string(values.size()) + " entries, expected " +
                        std::to_string(params.n_r));
    }
    for (Index i = 0; i < params.n_r; ++i) {
      params.theta_r(i) = values[i];
    }
  }
  if (cfg.has("model", "scale_theta_by_pmax") &&
      parse_bool(cfg.get("model", "scale_theta_by_pmax"),
                 "[model] scale_theta_by_pmax")) {
    params = scale_theta_for_pmax(std::move(params));
  }
  return params;
}

ExperimentConfig experiment_from_config(const RunConfig& cfg) {
  reject_unknown_keys(cfg, "experiment",
                      {"id", "knobs", "repetitions", "base_seed", "n_r", "n_c",
                       "pure_per_community", "theta_z", "theta_rho"});

  ExperimentConfig out;
  out.id = experiment_id_from_string(trim(cfg.get("experiment", "id")));
  out.knobs =
      parse_number_list(cfg.get("experiment", "knobs"), "[experiment] knobs");
  if (cfg.has("experiment", "repetitions")) {
    out.repetitions = static_cast<int>(parse_int(
        cfg.get("experiment", "repetitions"), "[experiment] repetitions"));
  }
  if (cfg.has("experiment", "base_seed")) {
    out.base_seed =
        parse_u64(cfg.get("experiment", "base_seed"), "[experiment] base_seed");
  }
  if (cfg.has("experiment", "n_r")) {
    out.overrides.n_r =
        parse_int(cfg.get("experiment", "n_r"), "[experiment] n_r");
  }
  if (cfg.has("experiment", "n_c")) {
    out.overrides.n_c =
        parse_int(cfg.get("experiment", "n_c"), "[experiment] n_c");
  }
  if (cfg.has("experiment", "pure_per_community")) {
    out.overrides.pure_per_community =
        parse_int(cfg.get("experiment", "pure_per_community"),
                  "[experiment] pure_per_community");
  }
  if (cfg.has("experiment", "theta_z")) {
    out.overrides.z =
        parse_number(cfg.get("experiment", "theta_z"), "[experiment] theta_z");
  }
  if (cfg.has("experiment", "theta_rho")) {
    out.overrides.rho = parse_number(cfg.get("experiment", "theta_rho"),
                                     "[experiment] theta_rho");
  }
  return out;
}

}  // namespace dimsc
