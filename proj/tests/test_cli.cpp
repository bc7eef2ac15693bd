#include "sdm/signal/dataset_io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("sdmkit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  // Exit status of `sdmkit <args>`, with output captured to a file.
  int run(const std::string& args) {
    const std::string cmd = std::string("\"") + SDMKIT_PATH + "\" " + args + " > \"" + (root_ / "stdout.txt").string() +
                            "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string output() const { return slurp(root_ / "stdout.txt"); }
  std::string path(const std::string& name) const { return (root_ / name).string(); }

  static std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  static nlohmann::json json_of(const fs::path& file) { return nlohmann::json::parse(slurp(file)); }

  fs::path root_;
};

TEST_F(Cli, SynthFig1Shape) {
  ASSERT_EQ(run("synth --preset fig1 --out " + path("fig1")), 0) << output();
  const auto d = sdm::read_dataset(path("fig1"));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.trials[0].channels(), 81);
  EXPECT_EQ(d.trials[0].samples(), 500);
  EXPECT_EQ(json_of(root_ / "fig1" / "config.json")["schema_version"], 1);
}

TEST_F(Cli, SynthIsDeterministicAndRefusesToOverwrite) {
  const std::string opts = " --classes 3 --per-class 3 --channels 6 --samples 60 --seed 4";
  ASSERT_EQ(run("synth --out " + path("a") + opts), 0) << output();
  ASSERT_EQ(run("synth --out " + path("b") + opts), 0) << output();
  for (const auto& entry : fs::recursive_directory_iterator(root_ / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root_ / "a");
    EXPECT_EQ(slurp(entry.path()), slurp(root_ / "b" / rel)) << rel;
  }
  EXPECT_EQ(run("synth --out " + path("a") + opts), 2);
  EXPECT_EQ(run("synth --out " + path("a") + opts + " --force"), 0) << output();
}

TEST_F(Cli, SynthIntoUnwritableLocationLeavesNothing) {
  fs::create_directories(root_ / "locked");
  std::ofstream(root_ / "locked" / "file") << "x";
  EXPECT_EQ(run("synth --preset fig1 --out " + path("locked/file/sub")), 2);
  EXPECT_FALSE(fs::exists(root_ / "locked" / "file" / "sub"));
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(root_ / "locked")) ++entries;
  EXPECT_EQ(entries, 1u);
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("synth"), 1);
  EXPECT_EQ(run("nonsense"), 1);
  EXPECT_EQ(run("featurize --data x --out y --bands 5:1"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, FeaturizeLengthsAndUpToDate) {
  ASSERT_EQ(run("synth --preset fig1 --out " + path("fig1")), 0) << output();
  ASSERT_EQ(run("featurize --data " + path("fig1") + " --out " + path("f1") + " --layout sndm --no-car"), 0) << output();
  EXPECT_EQ(json_of(root_ / "f1" / "features.json")["length"], 81);
  ASSERT_EQ(run("featurize --data " + path("fig1") + " --out " + path("f1") + " --layout sndm --no-car"), 0);
  EXPECT_NE(output().find("up to date"), std::string::npos) << output();

  ASSERT_EQ(run("synth --out " + path("p20") + " --classes 2 --per-class 2 --channels 20 --samples 120"), 0);
  ASSERT_EQ(run("featurize --data " + path("p20") + " --out " + path("f2") + " --layout sndm+sedm --rank 8"), 0)
      << output();
  EXPECT_EQ(json_of(root_ / "f2" / "features.json")["length"], 210);
  ASSERT_EQ(run("featurize --data " + path("p20") + " --out " + path("f3") + " --layout sndm --rank 8 --canonical-bands"),
            0)
      << output();
  EXPECT_EQ(json_of(root_ / "f3" / "features.json")["length"], 160);
  const std::string csv = slurp(root_ / "f2" / "features.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST_F(Cli, DecodeKernelMatchesLinearAndReplaysConfig) {
  ASSERT_EQ(run("synth --out " + path("d") + " --classes 3 --per-class 10 --channels 6 --samples 60"), 0);
  const std::string cv = " --ranks 4,6 --costs 0.1,10 --outer-folds 3 --inner-folds 2 --seed 3";
  ASSERT_EQ(run("decode --data " + path("d") + " --out " + path("lin") + " --classifier linear-l2 --features sdm" + cv), 0)
      << output();
  ASSERT_EQ(run("decode --data " + path("d") + " --out " + path("ker") + " --classifier kernel-l2 --features gram" + cv), 0)
      << output();
  EXPECT_EQ(slurp(root_ / "lin" / "folds.csv"), slurp(root_ / "ker" / "folds.csv"));
  const auto report = json_of(root_ / "lin" / "report.json");
  EXPECT_EQ(report["folds"].size(), 3u);

  ASSERT_EQ(run("decode --config " + path("lin/config.json") + " --out " + path("again")), 0) << output();
  EXPECT_EQ(slurp(root_ / "lin" / "report.json"), slurp(root_ / "again" / "report.json"));
}

TEST_F(Cli, DecodeArgumentErrors) {
  ASSERT_EQ(run("synth --out " + path("d") + " --classes 2 --per-class 4 --channels 6 --samples 60"), 0);
  EXPECT_EQ(run("decode --data " + path("d") + " --out " + path("x") + " --classifier kernel-l2 --features sdm"), 1);
  EXPECT_EQ(run("decode --data " + path("d") + " --out " + path("x") + " --classifier linear-l2 --features gram"), 1);
  EXPECT_EQ(run("decode --data " + path("d") + " --out " + path("x") + " --classifier ridge"), 1);
  EXPECT_EQ(run("decode --data " + path("d") + " --out " + path("x") + " --regress --classifier ridge"), 2);
  EXPECT_EQ(run("decode --data " + path("missing") + " --out " + path("x")), 2);
  std::ofstream(root_ / "bad.json") << R"({"schema_version": 1, "clasifier": "l1"})";
  EXPECT_EQ(run("decode --config " + path("bad.json") + " --out " + path("x")), 1);
}

TEST_F(Cli, AnalyzeOutputs) {
  ASSERT_EQ(run("synth --out " + path("d") + " --classes 3 --per-class 8 --channels 8 --samples 120"), 0);
  ASSERT_EQ(run("analyze f-map --data " + path("d") + " --out " + path("a") + " --rank 8"), 0) << output();
  std::ifstream in(root_ / "a" / "f_map.csv");
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t i = 1; i < 9; ++i)
    for (std::size_t j = 1; j < 9; ++j) EXPECT_EQ(rows[i][j], rows[j][i]);
  EXPECT_TRUE(fs::exists(root_ / "a" / "config.json"));

  ASSERT_EQ(run("analyze psd-corr --data " + path("d") + " --out " + path("p") + " --rank 8"), 0) << output();
  EXPECT_NE(slurp(root_ / "p" / "psd_correlation.csv").find("frequency_hz,r,degenerate"), std::string::npos);
  ASSERT_EQ(run("analyze reproducibility --data " + path("d") + " --out " + path("r") + " --rank 8 --z-transform"), 0)
      << output();
  EXPECT_NE(slurp(root_ / "r" / "reproducibility.csv").find("\nall,"), std::string::npos);
}

TEST_F(Cli, BenchWritesExponentTable) {
  ASSERT_EQ(run("bench --out " + path("b") + " --n 10,20 --repetitions 3"), 0) << output();
  const std::string csv = slurp(root_ / "b" / "exponents.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_EQ(json_of(root_ / "b" / "config.json")["command"], "bench");
  EXPECT_EQ(run("bench --out " + path("c") + " --repetitions 2"), 1);
}

}  // namespace
