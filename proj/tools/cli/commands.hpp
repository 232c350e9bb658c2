#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace minimax_cubic::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> trace;
  bool quiet = false;
};

/// Runs the configured solver. Exit 0 when the output passes the
/// second-order check, 2 when it does not, 1 on error.
int cmd_run(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
            std::ostream& err);

/// Certifies a point read from a file. Same exit convention as cmd_run.
int cmd_verify(const std::filesystem::path& config, const std::filesystem::path& point,
               const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Runs every (config, eps, seed) combination of a suite and writes one CSV
/// row per run. Exit 1 if any run failed or the suite is empty.
int cmd_bench(const std::filesystem::path& suite, const CommandOptions& opts, std::ostream& out,
              std::ostream& err);

/// Worker count for bench: MINIMAX_CUBIC_THREADS if set, else the hardware
/// concurrency, never more than the number of jobs.
unsigned bench_threads(std::size_t jobs);

}  // namespace minimax_cubic::cli
