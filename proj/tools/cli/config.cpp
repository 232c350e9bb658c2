#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace minimax_cubic::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": invalid JSON: " + e.what());
  }
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

double get_double(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return j.get<double>();
}

std::int64_t get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
  return j.get<std::int64_t>();
}

std::uint64_t get_seed(const json& j, const std::string& key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ConfigError("config: '" + key + "' must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::vector<std::vector<double>> read_csv_rows(const fs::path& path, const std::string& key) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: '" + key + "': cannot open CSV '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "': bad CSV cell '" + cell + "' in " + path.string());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<double>> read_rows(const json& j, const std::string& key, const fs::path& base) {
  if (j.is_object()) {
    reject_unknown(j, key, {"csv"});
    if (!j.contains("csv") || !j["csv"].is_string()) {
      throw ConfigError("config: '" + key + "' must be an array or {\"csv\": path}");
    }
    fs::path p = j["csv"].get<std::string>();
    if (p.is_relative()) p = base / p;
    return read_csv_rows(p, key);
  }
  if (!j.is_array()) throw ConfigError("config: '" + key + "' must be an array or {\"csv\": path}");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (r.is_number()) {
      rows.push_back({r.get<double>()});
      continue;
    }
    if (!r.is_array()) throw ConfigError("config: '" + key + "' rows must be arrays of numbers");
    std::vector<double> row;
    for (const auto& v : r) row.push_back(get_double(v, key));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix get_matrix(const json& j, const std::string& key, const fs::path& base) {
  const auto rows = read_rows(j, key, base);
  if (rows.empty()) throw ConfigError("config: '" + key + "' is empty");
  const size_t n = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) throw ConfigError("config: '" + key + "' has ragged rows");
    for (size_t k = 0; k < n; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return m;
}

Vector get_vector(const json& j, const std::string& key, const fs::path& base) {
  const Matrix m = get_matrix(j, key, base);
  if (m.rows() != 1 && m.cols() != 1) throw ConfigError("config: '" + key + "' must be a vector");
  return Eigen::Map<const Vector>(m.data(), m.size());
}

QuadraticSpec parse_quadratic(const json& j, const fs::path& base) {
  reject_unknown(j, "problem", {"kind", "A", "B", "C", "a", "b", "ell", "mu", "rho"});
  for (const char* k : {"A", "B", "C"}) {
    if (!j.contains(k)) throw ConfigError(std::string("config: missing key 'problem.") + k + "'");
  }
  QuadraticSpec s;
  s.A = get_matrix(j["A"], "problem.A", base);
  s.B = get_matrix(j["B"], "problem.B", base);
  s.C = get_matrix(j["C"], "problem.C", base);
  s.a = j.contains("a") ? get_vector(j["a"], "problem.a", base) : Vector::Zero(s.A.rows());
  s.b = j.contains("b") ? get_vector(j["b"], "problem.b", base) : Vector::Zero(s.C.rows());
  if (j.contains("ell")) s.ell = get_double(j["ell"], "problem.ell");
  if (j.contains("mu")) s.mu = get_double(j["mu"], "problem.mu");
  if (j.contains("rho")) s.rho = get_double(j["rho"], "problem.rho");
  return s;
}

SaddleSpec parse_saddle(const json& j, const fs::path& base) {
  reject_unknown(j, "problem",
                 {"kind", "dim_x", "dim_y", "coupling", "mu", "well", "box_radius", "ell", "rho"});
  SaddleSpec s;
  if (j.contains("dim_x")) s.dim_x = static_cast<int>(get_int(j["dim_x"], "problem.dim_x"));
  if (j.contains("dim_y")) s.dim_y = static_cast<int>(get_int(j["dim_y"], "problem.dim_y"));
  if (j.contains("coupling")) s.coupling = get_matrix(j["coupling"], "problem.coupling", base);
  if (j.contains("mu")) s.mu = get_double(j["mu"], "problem.mu");
  if (j.contains("well")) {
    if (!j["well"].is_string() || j["well"].get<std::string>() != "quartic") {
      throw ConfigError("config: 'problem.well' must be \"quartic\"");
    }
  }
  if (j.contains("box_radius")) s.box_radius = get_double(j["box_radius"], "problem.box_radius");
  if (j.contains("ell")) s.ell = get_double(j["ell"], "problem.ell");
  if (j.contains("rho")) s.rho = get_double(j["rho"], "problem.rho");
  return s;
}

void parse_solver(const json& j, ExperimentConfig& cfg, const fs::path& base) {
  require_object(j, "solver");
  reject_unknown(j, "solver",
                 {"algorithm", "eps", "delta", "C_g", "C_H", "C_sigma", "T_max", "seed",
                  "y0_radius_estimate", "P_star", "Kp", "gd_budget", "x0", "inner_tol",
                  "log_primal"});
  SolverConfig& s = cfg.solver;
  if (j.contains("algorithm")) {
    if (!j["algorithm"].is_string()) throw ConfigError("config: 'solver.algorithm' must be a string");
    try {
      cfg.algorithm = parse_algorithm(j["algorithm"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: 'solver.algorithm': ") + e.what());
    }
  }
  if (j.contains("eps")) s.eps = get_double(j["eps"], "solver.eps");
  if (j.contains("delta")) s.delta = get_double(j["delta"], "solver.delta");
  if (j.contains("C_g")) s.C_g = get_double(j["C_g"], "solver.C_g");
  if (j.contains("C_H")) s.C_H = get_double(j["C_H"], "solver.C_H");
  if (j.contains("C_sigma")) s.C_sigma = get_double(j["C_sigma"], "solver.C_sigma");
  if (j.contains("T_max")) s.T_max = get_int(j["T_max"], "solver.T_max");
  if (j.contains("seed")) s.rng_seed = get_seed(j["seed"], "solver.seed");
  if (j.contains("y0_radius_estimate")) {
    s.y0_radius_estimate = get_double(j["y0_radius_estimate"], "solver.y0_radius_estimate");
  }
  if (j.contains("P_star")) s.P_star = get_double(j["P_star"], "solver.P_star");
  if (j.contains("Kp")) s.Kp = static_cast<int>(get_int(j["Kp"], "solver.Kp"));
  if (j.contains("gd_budget")) s.gd_budget = get_int(j["gd_budget"], "solver.gd_budget");
  if (j.contains("x0")) cfg.x0 = get_vector(j["x0"], "solver.x0", base);
  if (j.contains("inner_tol")) cfg.inner_tol = get_double(j["inner_tol"], "solver.inner_tol");
  if (j.contains("log_primal")) {
    if (!j["log_primal"].is_boolean()) throw ConfigError("config: 'solver.log_primal' must be a boolean");
    s.log_primal = j["log_primal"].get<bool>();
  }
  if (!(s.eps > 0.0)) throw ConfigError("config: 'solver.eps' must be positive");
  if (!(cfg.inner_tol > 0.0)) throw ConfigError("config: 'solver.inner_tol' must be positive");
}

void parse_output(const json& j, OutputSpec& out) {
  require_object(j, "output");
  reject_unknown(j, "output", {"trace", "summary", "verbosity"});
  for (const char* k : {"trace", "summary"}) {
    if (!j.contains(k)) continue;
    if (!j[k].is_string()) throw ConfigError(std::string("config: 'output.") + k + "' must be a string");
    (std::string(k) == "trace" ? out.trace : out.summary) = fs::path(j[k].get<std::string>());
  }
  if (j.contains("verbosity")) {
    const std::string v = j["verbosity"].is_string() ? j["verbosity"].get<std::string>() : "";
    if (v == "quiet") out.verbosity = Verbosity::quiet;
    else if (v == "normal") out.verbosity = Verbosity::normal;
    else if (v == "verbose") out.verbosity = Verbosity::verbose;
    else throw ConfigError("config: 'output.verbosity' must be quiet, normal or verbose");
  }
}

}  // namespace

int ExperimentConfig::dim_x() const {
  if (const auto* q = std::get_if<QuadraticSpec>(&problem)) return static_cast<int>(q->A.rows());
  return std::get<SaddleSpec>(problem).dim_x;
}

std::string ExperimentConfig::problem_kind() const {
  return std::holds_alternative<QuadraticSpec>(problem) ? "quadratic" : "saddle";
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
  const json j = parse_json(text, "config");
  require_object(j, "<root>");
  reject_unknown(j, "", {"version", "problem", "solver", "output"});
  if (!j.contains("version")) throw ConfigError("config: missing key 'version'");
  if (!j["version"].is_string() || j["version"].get<std::string>() != "v1") {
    throw ConfigError("config: 'version' must be \"v1\"");
  }
  if (!j.contains("problem")) throw ConfigError("config: missing key 'problem'");
  const json& pj = j["problem"];
  require_object(pj, "problem");
  if (!pj.contains("kind") || !pj["kind"].is_string()) {
    throw ConfigError("config: missing key 'problem.kind'");
  }
  ExperimentConfig cfg;
  const std::string kind = pj["kind"].get<std::string>();
  if (kind == "quadratic") {
    cfg.problem = parse_quadratic(pj, base_dir);
  } else if (kind == "saddle") {
    cfg.problem = parse_saddle(pj, base_dir);
  } else {
    throw ConfigError("config: 'problem.kind' must be quadratic or saddle, got '" + kind + "'");
  }
  if (j.contains("solver")) parse_solver(j["solver"], cfg, base_dir);
  if (j.contains("output")) parse_output(j["output"], cfg.output);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  ExperimentConfig cfg = parse_config(read_file(path), path.parent_path());
  cfg.source = path;
  return cfg;
}

ProblemInstance build_problem(const ExperimentConfig& cfg) {
  if (const auto* q = std::get_if<QuadraticSpec>(&cfg.problem)) return make_quadratic_problem(*q);
  return make_saddle_problem(std::get<SaddleSpec>(cfg.problem));
}

Vector start_point(const ExperimentConfig& cfg) {
  const int d = cfg.dim_x();
  if (!cfg.x0) return Vector::Zero(d);
  if (cfg.x0->size() != d) {
    std::ostringstream msg;
    msg << "config: 'solver.x0' has length " << cfg.x0->size() << ", expected " << d;
    throw ConfigError(msg.str());
  }
  return *cfg.x0;
}

SuiteSpec load_suite(const fs::path& path) {
  const json j = parse_json(read_file(path), "suite");
  if (!j.is_object()) throw ConfigError("suite: root must be an object");
  reject_unknown(j, "", {"version", "configs", "eps", "seeds", "csv"});
  if (j.contains("version") && (!j["version"].is_string() || j["version"].get<std::string>() != "v1")) {
    throw ConfigError("suite: 'version' must be \"v1\"");
  }
  SuiteSpec s;
  const fs::path base = path.parent_path();
  if (j.contains("configs")) {
    if (!j["configs"].is_array()) throw ConfigError("suite: 'configs' must be an array of paths");
    for (const auto& c : j["configs"]) {
      if (!c.is_string()) throw ConfigError("suite: 'configs' entries must be strings");
      fs::path p = c.get<std::string>();
      s.configs.push_back(p.is_relative() ? base / p : p);
    }
  }
  if (j.contains("eps")) {
    if (!j["eps"].is_array()) throw ConfigError("suite: 'eps' must be an array");
    for (const auto& e : j["eps"]) s.eps.push_back(get_double(e, "eps"));
  }
  if (j.contains("seeds")) {
    if (!j["seeds"].is_array()) throw ConfigError("suite: 'seeds' must be an array");
    for (const auto& e : j["seeds"]) s.seeds.push_back(get_seed(e, "seeds"));
  }
  if (j.contains("csv")) {
    if (!j["csv"].is_string()) throw ConfigError("suite: 'csv' must be a string");
    s.csv = fs::path(j["csv"].get<std::string>());
  }
  return s;
}

Vector load_point(const fs::path& path) {
  std::string text = read_file(path);
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(text);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("point: cannot parse '" + tok + "' in " + path.string());
    }
  }
  if (vals.empty()) throw ConfigError("point: no values in " + path.string());
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace minimax_cubic::cli
