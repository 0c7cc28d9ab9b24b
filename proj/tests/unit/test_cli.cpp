#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "canopy/commands.hpp"
#include "canopy/synth.hpp"
#include "support.hpp"

using namespace canopy;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  testing::internal::CaptureStderr();
  testing::internal::CaptureStdout();
  args.insert(args.begin(), "canopy");
  const int code = cli::run_cli(args);
  testing::internal::GetCapturedStdout();
  return {code, testing::internal::GetCapturedStderr()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_small_spec(const test::TempDir& dir) {
  SceneSpec s = SceneSpec::defaults();
  s.width = 160;
  s.height = 120;
  s.pixel_size = 0.1;
  s.crowns_per_class = 3;
  s.radius = {0.8, 1.1};
  const auto path = dir.file("spec.json");
  std::ofstream(path) << scene_spec_json(s);
  return path;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"dance"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run({"--version"}).code, cli::kExitOk);
  EXPECT_EQ(run({"segment", "--help"}).code, cli::kExitOk);
  EXPECT_EQ(run({"segment", "--no-such-flag"}).code, cli::kExitValidation);
  EXPECT_EQ(run({"segment", "--seed", "abc"}).code, cli::kExitValidation);
  EXPECT_FALSE(cli::command_names().empty());
}

TEST(Cli, SeedIsRequired) {
  test::TempDir dir("cli_seed");
  const auto r = run({"synth", "--out", dir.path().string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("seed"), std::string::npos) << r.err;
}

TEST(Cli, MissingInputNamesTheField) {
  test::TempDir dir("cli_missing");
  const auto r = run({"label", "--seed", "1", "--out", dir.path().string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("inputs."), std::string::npos) << r.err;
  std::ofstream(dir.file("partition.fbr")) << "FBR1";
  const auto c = run({"label", "--seed", "1", "--out", dir.path().string()});
  EXPECT_EQ(c.code, cli::kExitValidation);
  EXPECT_NE(c.err.find("inputs.crowns"), std::string::npos) << c.err;
}

TEST(Cli, BadConfigFileRejected) {
  test::TempDir dir("cli_config");
  std::ofstream(dir.file("c.json")) << R"({"seed": 1, "slic": {"compactness": -2}})";
  const auto r = run({"segment", "--config", dir.file("c.json"), "--out", dir.path().string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("slic.compactness"), std::string::npos) << r.err;
  std::ofstream(dir.file("d.json")) << R"({"seed": 1, "colour": "blue"})";
  EXPECT_EQ(run({"segment", "--config", dir.file("d.json")}).code, cli::kExitValidation);
}

TEST(Cli, EndToEndRunsAreReproducible) {
  test::TempDir dir("cli_e2e");
  const auto spec = write_small_spec(dir);
  std::vector<std::string> reports;
  for (const char* name : {"a", "b"}) {
    const std::string out = (dir.path() / name).string();
    const std::vector<std::string> common{"--seed", "5", "--out", out};
    auto with = [&](std::vector<std::string> args) {
      args.insert(args.end(), common.begin(), common.end());
      const auto r = run(args);
      EXPECT_EQ(r.code, cli::kExitOk) << args[0] << ": " << r.err;
      return r;
    };
    with({"synth", "--scene-spec", spec});
    with({"segment"});
    with({"extract"});
    with({"label"});
    with({"cv", "--model-kind", "forest", "--trees", "30", "--folds", "3"});
    with({"train", "--model-kind", "forest", "--trees", "30"});
    with({"predict"});
    with({"grid", "--cell-ha", "0.005"});
    with({"summary"});
    reports.push_back(slurp(fs::path(out) / "cv_report.json"));
    for (const char* f : {"partition.fbr", "features.csv", "labels.csv", "model.json", "class_map.fbr", "dominance.csv",
                          "cover_summary.csv", "cv_confusion.csv"})
      EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
  }
  ASSERT_FALSE(reports[0].empty());
  EXPECT_EQ(reports[0], reports[1]);

  const auto manifest = nlohmann::json::parse(slurp(dir.path() / "a" / "cv_run.json"));
  EXPECT_EQ(manifest.at("format"), "canopy-run-manifest");
  EXPECT_EQ(manifest.at("command"), "cv");
  EXPECT_EQ(manifest.at("seed"), 5);
  EXPECT_EQ(manifest.at("config_hash").get<std::string>().size(), 16u);
  EXPECT_FALSE(manifest.at("inputs").empty());
  EXPECT_FALSE(manifest.at("outputs").empty());
  // a rerun in the same directory rewrites the manifest byte for byte
  const std::string first = slurp(dir.path() / "a" / "cv_run.json");
  EXPECT_EQ(run({"cv", "--model-kind", "forest", "--trees", "30", "--folds", "3", "--seed", "5", "--out",
                 (dir.path() / "a").string()}).code,
            cli::kExitOk);
  EXPECT_EQ(slurp(dir.path() / "a" / "cv_run.json"), first);

  const auto report = nlohmann::json::parse(reports[0]);
  EXPECT_EQ(report.at("folds").size(), 3u);
  EXPECT_EQ(report.at("leakage_violations"), 0);
}
