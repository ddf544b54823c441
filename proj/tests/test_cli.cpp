#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("levy_spde_cli_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(LEVY_SPDE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
  TempDir dir("usage");
  const std::string out = " --out " + dir.path.string();
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("mild-field --equation heat --d 1" + out), 2);  // --seed missing
  EXPECT_EQ(run("sample-noise --grid 0,1 --seed 1" + out), 2);
  EXPECT_EQ(run("mild-field --equation laplace --seed 1" + out), 2);
  EXPECT_EQ(run("--config " + (dir.path / "missing.json").string()), 2);
}

TEST(Cli, RefusedConfigurationExitsWithTwo) {
  TempDir dir("refused");
  EXPECT_EQ(run("mild-field --equation heat --d 3 --alpha 1.8 --grid 0,1,2,-1,1,2,-1,1,2,-1,1,2 --seed 1 --out " +
                dir.path.string()),
            2);
}

TEST(Cli, HelpAndVersionExitZero) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("--version"), 0);
}

TEST(Cli, VerdictTable) {
  TempDir dir("verdicts");
  ASSERT_EQ(run("verdict-table --d 1..5 --alpha 0.25..1.95:0.1 --out " + dir.path.string()), 0);
  std::istringstream csv(slurp(dir.path / "verdicts.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "equation,d,alpha,mild,generalized,random_field");
  int rows = 0;
  bool saw = false;
  while (std::getline(csv, line)) {
    ++rows;
    saw = saw || line == "heat,3,1.65,true,true,true";
  }
  EXPECT_EQ(rows, 3 * 5 * 18);
  EXPECT_TRUE(saw);
}

TEST(Cli, FubiniSharedPassesAndReplaysByteForByte) {
  TempDir dir("fubini");
  const auto first = dir.path / "first";
  const auto second = dir.path / "second";
  ASSERT_EQ(run("fubini-check --equation heat --d 1 --alpha 1.5 --seed 42 --mode shared --grid 0,1,16,-1,1,16 --out " +
                first.string()),
            0);
  const auto report = nlohmann::json::parse(slurp(first / "fubini.json"));
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_LE(report["abs_diff"].get<double>(), 1e-9 * (1.0 + std::abs(report["lhs"].get<double>())));
  const auto manifest = nlohmann::json::parse(slurp(first / "manifest.json"));
  EXPECT_EQ(manifest["command"], "fubini-check");
  EXPECT_EQ(manifest["config"]["seed"], 42);
  EXPECT_FALSE(manifest["version"].get<std::string>().empty());

  ASSERT_EQ(run("--config " + (first / "manifest.json").string() + " --out " + second.string()), 0);
  EXPECT_EQ(slurp(first / "fubini.json"), slurp(second / "fubini.json"));
  EXPECT_EQ(slurp(first / "manifest.json"), slurp(second / "manifest.json"));
}

TEST(Cli, NoiseAndFieldOutputsReplay) {
  TempDir dir("noise");
  const auto a = dir.path / "a";
  const auto b = dir.path / "b";
  ASSERT_EQ(run("sample-noise --grid 0,1,4,-1,1,8 --alpha 1.2 --seed 5 --out " + a.string()), 0);
  ASSERT_EQ(run("--config " + (a / "manifest.json").string() + " --out " + b.string()), 0);
  EXPECT_EQ(slurp(a / "noise.bin"), slurp(b / "noise.bin"));
  EXPECT_EQ(slurp(a / "noise.csv"), slurp(b / "noise.csv"));

  const auto c = dir.path / "c";
  const auto d = dir.path / "d";
  ASSERT_EQ(run("mild-field --equation wave --d 1 --alpha 0.9 --grid 0,1,8,-1,1,8 --seed 3 --out " + c.string()), 0);
  ASSERT_EQ(run("--config " + (c / "manifest.json").string() + " --out " + d.string()), 0);
  EXPECT_EQ(slurp(c / "field.csv"), slurp(d / "field.csv"));
}

TEST(Cli, MalformedManifestExitsWithTwo) {
  TempDir dir("manifest");
  std::ofstream(dir.path / "bad.json") << "{\"command\": \"fubini-check\", \"config\": {\"equation\": \"heat\"}}";
  EXPECT_EQ(run("--config " + (dir.path / "bad.json").string() + " --out " + (dir.path / "o").string()), 2);
  std::ofstream(dir.path / "junk.json") << "not json";
  EXPECT_EQ(run("--config " + (dir.path / "junk.json").string()), 2);
}
