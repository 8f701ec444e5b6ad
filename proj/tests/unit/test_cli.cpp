#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("marginsel_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(MARGINSEL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST(Cli, BinomialFloorWritesOneRowPerN) {
  const auto dir = scratch("floor");
  ASSERT_EQ(run("binomial-floor --n-list 16,64,256,1024 --a 1 --b 1 --c 0.4 --out-dir " + dir.string()), 0);
  const auto csv = slurp(dir / "binomial-floor.csv");
  EXPECT_EQ(count_lines(csv), 5u); // header + 4
  const auto j = nlohmann::json::parse(slurp(dir / "binomial-floor.json"));
  EXPECT_EQ(j.at("schema"), 1);
  EXPECT_EQ(j.at("floors").size(), 4u);
  fs::remove_all(dir);
}

TEST(Cli, CounterexampleTwoBlocks) {
  const auto dir = scratch("ce");
  ASSERT_EQ(run("counterexample --n 64,256 --reps 200 --seed 1 --format both --out-dir " + dir.string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "counterexample.json"));
  EXPECT_EQ(j.at("blocks").size(), 2u);
  EXPECT_EQ(count_lines(slurp(dir / "counterexample.csv")), 401u);
  fs::remove_all(dir);
}

TEST(Cli, CsvIsReproducible) {
  const auto a = scratch("rep_a");
  const auto b = scratch("rep_b");
  ASSERT_EQ(run("counterexample --n 32 --reps 300 --seed 5 --threads 1 --out-dir " + a.string()), 0);
  ASSERT_EQ(run("counterexample --n 32 --reps 300 --seed 5 --threads 4 --out-dir " + b.string()), 0);
  EXPECT_EQ(slurp(a / "counterexample.csv"), slurp(b / "counterexample.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, NestedResolvesAutoConfidence) {
  const auto dir = scratch("nested");
  ASSERT_EQ(run("nested --family odd-chain --kappa 2 --n 512 --t auto --reps 5 --format json --export " +
                (dir / "instance.json").string() + " --out-dir " + dir.string()),
            0);
  const auto j = nlohmann::json::parse(slurp(dir / "nested.json"));
  EXPECT_NEAR(j.at("blocks")[0].at("t").get<double>(), std::log(4.0) + 3 * std::log(512.0), 1e-12);
  const auto inst = nlohmann::json::parse(slurp(dir / "instance.json"));
  EXPECT_EQ(inst.at("family").at("models").size(), 4u);
  fs::remove_all(dir);
}

TEST(Cli, CoverageAcceptsLogConfidence) {
  const auto dir = scratch("cov");
  ASSERT_EQ(run("coverage --n 100 --t ln:20,ln:100 --reps 500 --format json --out-dir " + dir.string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "coverage.json"));
  EXPECT_NEAR(j.at("blocks")[1].at("t").get<double>(), std::log(100.0), 1e-15);
  fs::remove_all(dir);
}

TEST(Cli, ExternalRule) {
  const auto dir = scratch("ext");
  ASSERT_EQ(run("counterexample --n 16 --reps 20 --rule external --command 'cat >/dev/null; echo 1' --format json "
                "--out-dir " +
                dir.string()),
            0);
  const auto j = nlohmann::json::parse(slurp(dir / "counterexample.json"));
  EXPECT_EQ(j.at("blocks")[0].at("chose_model_1"), 20);
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("counterexample"), 1);
  EXPECT_EQ(run("counterexample --n 1 --out-dir " + dir.string()), 1);
  EXPECT_EQ(run("nested --n 64 --t nonsense --out-dir " + dir.string()), 1);
  EXPECT_EQ(run("counterexample --n 16 --reps 5 --rule external --command 'exit 4' --out-dir " + dir.string()), 1);
  // checks are made in increasing n whatever the order given
  EXPECT_EQ(run("margin-gap --n 4096,256 --out-dir " + dir.string()), 0);
  fs::remove_all(dir);
}
