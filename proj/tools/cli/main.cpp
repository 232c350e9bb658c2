#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace minimax_cubic::cli;
  CLI::App app{"Cubic-Newton solvers for nonconvex-strongly-concave minimax problems"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::optional<std::uint64_t> seed;
  std::string trace;
  app.add_option("--seed", seed, "Override the solver RNG seed");
  app.add_option("--trace", trace, "Write the JSON-lines trace to this path");
  app.add_flag("--quiet", opts.quiet, "Suppress stdout output");

  std::string config;
  std::string point;
  std::string suite;
  auto* run = app.add_subcommand("run", "Run the configured solver");
  run->add_option("config", config, "Config file (schema v1)")->required();
  auto* verify = app.add_subcommand("verify", "Certify stationarity of a point");
  verify->add_option("config", config, "Config file (schema v1)")->required();
  verify->add_option("point", point, "Point file with d_x numbers")->required();
  auto* bench = app.add_subcommand("bench", "Run a suite and print CSV");
  bench->add_option("suite", suite, "Suite file")->required();
  for (auto* sub : {run, verify, bench}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }
  opts.seed = seed;
  if (!trace.empty()) opts.trace = trace;

  if (*run) return cmd_run(config, opts, std::cout, std::cerr);
  if (*verify) return cmd_verify(config, point, opts, std::cout, std::cerr);
  return cmd_bench(suite, opts, std::cout, std::cerr);
}
