#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace cli = minimax_cubic::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("minimax_cubic_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

const char* kQuadratic = R"({
  "version": "v1",
  "problem": {"kind": "quadratic", "A": [[1.0, 0.2], [0.2, 0.8]], "B": [[0.5], [0.1]],
              "C": [[2.0]], "a": [1.0, -0.5], "b": [0.2]},
  "solver": {"algorithm": "mcn", "eps": 1e-3, "x0": [1.0, -1.0]}
})";

const char* kSaddleImcn = R"({
  "version": "v1",
  "problem": {"kind": "saddle", "mu": 24.0},
  "solver": {"algorithm": "imcn", "eps": 1e-2, "x0": [0.0], "seed": 3}
})";

std::string error_of(const std::string& text) {
  try {
    cli::parse_config(text, ".");
  } catch (const cli::ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ConfigParse, UnknownKeysAreNamed) {
  EXPECT_NE(error_of(R"({"version": "v1", "problem": {"kind": "saddle"}, "solver": {"eps": 1e-3, "tolerance": 1}})")
                .find("solver.tolerance"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"version": "v1", "problem": {"kind": "saddle", "size": 2}})").find("problem.size"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"version": "v1", "problem": {"kind": "saddle"}, "extra": 1})").find("extra"),
            std::string::npos);
}

TEST(ConfigParse, MissingAndBadValues) {
  EXPECT_NE(error_of(R"({"problem": {"kind": "saddle"}})").find("version"), std::string::npos);
  EXPECT_NE(error_of(R"({"version": "v1", "problem": {"kind": "cubic"}})").find("problem.kind"), std::string::npos);
  EXPECT_NE(error_of(R"({"version": "v1", "problem": {"kind": "saddle"}, "solver": {"eps": -1}})").find("solver.eps"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"version": "v1", "problem": {"kind": "saddle"}, "solver": {"algorithm": "newton"}})")
                .find("solver.algorithm"),
            std::string::npos);
  EXPECT_NE(error_of("{not json").find("invalid JSON"), std::string::npos);
}

TEST(ConfigParse, DefaultsAndOverrides) {
  const auto cfg = cli::parse_config(kSaddleImcn, ".");
  EXPECT_EQ(cfg.algorithm, minimax_cubic::Algorithm::imcn);
  EXPECT_EQ(cfg.solver.rng_seed, 3u);
  EXPECT_EQ(cfg.problem_kind(), "saddle");
  EXPECT_EQ(cfg.dim_x(), 1);
}

TEST_F(CliTest, CsvMatricesResolveAgainstConfigDir) {
  write("A.csv", "1.0,0.2\n0.2,0.8\n");
  const auto cfg_path = write("c.json", R"({"version": "v1", "problem": {"kind": "quadratic", "A": {"csv": "A.csv"},
      "B": [[0.5], [0.1]], "C": [[2.0]], "a": [1.0, -0.5], "b": [0.2]}})");
  const auto cfg = cli::load_config(cfg_path);
  const auto& q = std::get<minimax_cubic::QuadraticSpec>(cfg.problem);
  EXPECT_EQ(q.A(0, 1), 0.2);
}

TEST_F(CliTest, RunWritesSummaryAndPasses) {
  const auto cfg = write("q.json", kQuadratic);
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(cfg, {}, out, err), cli::kExitPass) << err.str();
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["algorithm"], "mcn");
  EXPECT_EQ(j["reason"], "break-smallstep");
  EXPECT_TRUE(j["stationarity"]["ssp_pass"].get<bool>());
  EXPECT_EQ(j["counters"]["n_hess"], j["iterations"]);
}

TEST_F(CliTest, QuietSuppressesStdout) {
  const auto cfg = write("q.json", kQuadratic);
  std::ostringstream out, err;
  cli::CommandOptions o;
  o.quiet = true;
  EXPECT_EQ(cli::cmd_run(cfg, o, out, err), cli::kExitPass);
  EXPECT_TRUE(out.str().empty());
}

TEST_F(CliTest, TraceIsByteIdenticalAcrossRuns) {
  const auto cfg = write("s.json", kSaddleImcn);
  std::ostringstream out, err;
  cli::CommandOptions o;
  o.quiet = true;
  o.trace = dir_ / "a.jsonl";
  ASSERT_EQ(cli::cmd_run(cfg, o, out, err), cli::kExitPass) << err.str();
  o.trace = dir_ / "b.jsonl";
  ASSERT_EQ(cli::cmd_run(cfg, o, out, err), cli::kExitPass) << err.str();
  const std::string a = read(dir_ / "a.jsonl");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read(dir_ / "b.jsonl"));

  std::istringstream lines(a);
  std::string line, last;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("type"));
    last = line;
  }
  EXPECT_EQ(nlohmann::json::parse(last)["type"], "terminal");
}

TEST_F(CliTest, SeedFlagOverridesConfig) {
  const auto cfg = write("s.json", kSaddleImcn);
  std::ostringstream out, err;
  cli::CommandOptions o;
  o.seed = 11;
  cli::cmd_run(cfg, o, out, err);
  EXPECT_EQ(nlohmann::json::parse(out.str())["seed"], 11);
}

TEST_F(CliTest, InconsistentConstantsExitOne) {
  const auto cfg = write("bad.json", R"({"version": "v1", "problem": {"kind": "saddle", "mu": 2.0, "ell": 1.0}})");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(cfg, {}, out, err), cli::kExitError);
  EXPECT_FALSE(err.str().empty());
}

TEST_F(CliTest, MissingConfigExitOne) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(dir_ / "nope.json", {}, out, err), cli::kExitError);
}

TEST_F(CliTest, VerifyExitCodes) {
  const auto cfg = write("s.json", R"({"version": "v1", "problem": {"kind": "saddle", "mu": 24.0}, "solver": {"eps": 1e-4}})");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(cfg, write("min.txt", "1.0\n"), {}, out, err), cli::kExitPass);
  EXPECT_EQ(cli::cmd_verify(cfg, write("saddle.txt", "0.0\n"), {}, out, err), cli::kExitFail);
  EXPECT_EQ(cli::cmd_verify(cfg, write("wide.txt", "0.0, 1.0\n"), {}, out, err), cli::kExitError);
  EXPECT_EQ(cli::cmd_verify(cfg, write("junk.txt", "abc\n"), {}, out, err), cli::kExitError);
}

TEST_F(CliTest, BenchWritesHeaderAndRows) {
  write("q.json", kQuadratic);
  const auto suite = write("suite.json", R"({"version": "v1", "configs": ["q.json"], "eps": [1e-2, 1e-3]})");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_bench(suite, {}, out, err), cli::kExitPass) << err.str();
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header.rfind("config,algorithm,eps,seed,iterations", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST_F(CliTest, BenchEmptySuiteExitsOne) {
  const auto suite = write("suite.json", R"({"version": "v1", "configs": []})");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_bench(suite, {}, out, err), cli::kExitError);
}

TEST_F(CliTest, BenchFailingMemberStillReportsRow) {
  write("q.json", kQuadratic);
  write("bad.json", R"({"version": "v1", "problem": {"kind": "saddle", "mu": 2.0, "ell": 1.0}})");
  const auto suite = write("suite.json", R"({"version": "v1", "configs": ["q.json", "bad.json"]})");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_bench(suite, {}, out, err), cli::kExitError);
  EXPECT_NE(out.str().find("q.json,mcn"), std::string::npos);
  EXPECT_NE(out.str().find("error:"), std::string::npos);
}

TEST(BenchThreads, EnvironmentCapsWorkers) {
  ::setenv("MINIMAX_CUBIC_THREADS", "2", 1);
  EXPECT_EQ(cli::bench_threads(10), 2u);
  EXPECT_EQ(cli::bench_threads(1), 1u);
  ::unsetenv("MINIMAX_CUBIC_THREADS");
  EXPECT_GE(cli::bench_threads(10), 1u);
}
