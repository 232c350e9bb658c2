#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <minimax_cubic/drivers.hpp>
#include <minimax_cubic/problem.hpp>

namespace minimax_cubic::cli {

/// Raised for any schema or value problem in a config, suite or point file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verbosity { quiet, normal, verbose };

struct OutputSpec {
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> summary;
  Verbosity verbosity = Verbosity::normal;
};

struct ExperimentConfig {
  std::filesystem::path source;
  std::variant<QuadraticSpec, SaddleSpec> problem;
  Algorithm algorithm = Algorithm::mcn;
  SolverConfig solver;
  std::optional<Vector> x0;  // defaults to zero
  double inner_tol = 1e-10;  // accuracy of the inner maximization when certifying
  OutputSpec output;

  int dim_x() const;
  std::string problem_kind() const;
};

/// Reads and validates a "v1" config. Relative CSV paths resolve against the
/// directory of the config file.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

ProblemInstance build_problem(const ExperimentConfig& cfg);

/// Starting point, checked against the problem dimension.
Vector start_point(const ExperimentConfig& cfg);

struct SuiteSpec {
  std::vector<std::filesystem::path> configs;
  std::vector<double> eps;               // empty: use each config's eps
  std::vector<std::uint64_t> seeds;      // empty: use each config's seed
  std::optional<std::filesystem::path> csv;  // default: stdout
};

SuiteSpec load_suite(const std::filesystem::path& path);

/// Whitespace- or comma-separated numbers.
Vector load_point(const std::filesystem::path& path);

}  // namespace minimax_cubic::cli
