#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kCli = UWBFUSE_CLI_PATH;
const fs::path kData = UWBFUSE_DATA_DIR;

int run(const std::string& args) {
  const std::string cmd = kCli.string() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uwbfuse_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::string kPaperLike = (kData / "scenes/desk_paper_like.json").string();

}  // namespace

TEST(Cli, StagedPipelineMatchesExperiment) {
  const fs::path dir = scratch("staged");
  const std::string s = " --scene " + kPaperLike;
  const std::string staged = (dir / "staged").string();
  const std::string whole = (dir / "whole").string();
  ASSERT_EQ(run("simulate" + s + " --rounds 40 --seed 9 --out " + staged), 0);
  ASSERT_EQ(run("correct" + s + " --diagnostics --out " + staged + " " + staged +
                "/records_ref1.csv " + staged + "/records_ref3.csv " + staged +
                "/records_ref4.csv"),
            0);
  ASSERT_EQ(run("solve" + s + " --out " + staged + " " + staged + "/corrected_ref1.csv " +
                staged + "/corrected_ref3.csv " + staged + "/corrected_ref4.csv"),
            0);
  ASSERT_EQ(run("report" + s + " --seed 9 --out " + staged + " " + staged + "/estimates.csv"), 0);
  ASSERT_EQ(run("experiment" + s + " --rounds 40 --seed 9 --out " + whole), 0);
  for (const auto& entry : fs::directory_iterator(whole)) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "staged" / name)) << name;
  }
  fs::remove_all(dir);
}

TEST(Cli, ConfigFile) {
  const fs::path dir = scratch("config");
  ASSERT_EQ(run("experiment --config " + (kData / "configs/zero_noise.json").string() + " --out " +
                dir.string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
}

TEST(Cli, FusedOnlySolve) {
  const fs::path dir = scratch("fused");
  const std::string s = " --scene " + kPaperLike + " --out " + dir.string();
  ASSERT_EQ(run("simulate --mode fused --rounds 5" + s), 0);
  EXPECT_FALSE(fs::exists(dir / "records_ref3.csv"));
  ASSERT_EQ(run("correct" + s + " " + (dir / "records_ref1.csv").string()), 0);
  ASSERT_EQ(run("solve --mode fused" + s + " " + (dir / "corrected_ref1.csv").string()), 0);
  // TOA-only needs the other initiators.
  EXPECT_EQ(run("solve --mode toa" + s + " " + (dir / "corrected_ref1.csv").string()), 4);
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("codes");
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("simulate --scene /nonexistent.json"), 2);
  EXPECT_EQ(run("simulate --scene " + kPaperLike + " --mode all"), 2);
  EXPECT_EQ(run("simulate --scene " + kPaperLike + " --rounds 0"), 2);
  EXPECT_EQ(run("experiment --scene " + kPaperLike + " --rounds 0 --out " + dir.string()), 2);

  write(dir / "bad.csv", "round_idx,t1_r\n0,abc\n");
  EXPECT_EQ(run("correct --scene " + kPaperLike + " " + (dir / "bad.csv").string()), 3);

  // Reference, tag and a single anchor: fused has one TDOA row.
  write(dir / "three.json", R"({"stations": [
      {"id": 1, "role": "reference", "position": [0, 0]},
      {"id": 2, "role": "tag", "position": [0, 1.5]},
      {"id": 3, "role": "anchor", "position": [1.2, 1.6]}]})");
  EXPECT_EQ(run("experiment --mode fused --rounds 2 --scene " + (dir / "three.json").string() +
                " --out " + (dir / "out").string()),
            4);
  EXPECT_EQ(run("--help"), 0);
  fs::remove_all(dir);
}
