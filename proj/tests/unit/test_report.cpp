#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "ccts/core/error.hpp"
#include "ccts/report/cli.hpp"
#include "ccts/report/heatmap.hpp"
#include "ccts/report/manifest.hpp"
#include "ccts/report/report.hpp"

namespace ccts::report {
namespace {

namespace fs = std::filesystem;
using attribution::AttributionCell;
using attribution::AttributionResult;
using attribution::EffectKind;

AttributionResult grid(EffectKind kind, std::vector<double> ates) {
  AttributionResult r;
  r.kind = kind;
  r.channel_names = {"a", "b"};
  r.concepts = {1, 2};
  std::size_t k = 0;
  for (int c : r.concepts) {
    for (std::optional<std::size_t> ch : {std::optional<std::size_t>(0),
                                          std::optional<std::size_t>(1),
                                          std::optional<std::size_t>()}) {
      AttributionCell cell;
      cell.concept_id = c;
      cell.channel = ch;
      cell.kind = kind;
      cell.ate = ates[k++];
      cell.low = cell.ate - 0.1;
      cell.high = cell.ate + 0.1;
      cell.significant = cell.low > 0 || cell.high < 0;
      cell.n_used = 5;
      r.cells.push_back(cell);
    }
  }
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const auto dir = fresh_dir("ccts_sha");
  std::ofstream(dir / "f", std::ios::binary) << "abc";
  EXPECT_EQ(sha256_file(dir / "f"), sha256_hex("abc"));
  EXPECT_THROW(sha256_file(dir / "missing"), IoError);
  fs::remove_all(dir);
}

TEST(Heatmap, ColourScaleEndpoints) {
  EXPECT_EQ(diverging_color(0, 1), "#ffffff");
  EXPECT_EQ(diverging_color(3, 0), "#ffffff");
  EXPECT_NE(diverging_color(1, 1), diverging_color(-1, 1));
  EXPECT_EQ(diverging_color(5, 1), diverging_color(1, 1));
}

TEST(Heatmap, OneRectPerCellAndStarsOnSignificant) {
  auto r = grid(EffectKind::kCausal, {0.5, 0.05, -0.4, 0, 0.02, 1.0});
  r.cells[1].missing = true;
  const auto svg = heatmap_svg(r, "t");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(count(svg, "<rect x="), 6u);
  EXPECT_EQ(count(svg, "class=\"star\""), 3u);
  EXPECT_EQ(count(svg, "#bdbdbd"), 1u);
  EXPECT_THROW(heatmap_svg(AttributionResult{}, "t"), DataError);
}

TEST(SignAgreement, IdenticalAndNegated) {
  const auto a = grid(EffectKind::kCausal, {0.5, -0.2, 0.3, 0.1, -1, 2});
  auto neg = a;
  for (auto& c : neg.cells) c.ate = -c.ate;
  EXPECT_DOUBLE_EQ(sign_agreement(a, a).all_cells, 1.0);
  EXPECT_DOUBLE_EQ(sign_agreement(a, neg).all_cells, 0.0);
  EXPECT_EQ(sign_agreement(a, a).n_cells, 6u);
  auto other = a;
  other.concepts = {1, 3};
  other.cells[3].concept_id = 3;
  EXPECT_THROW(sign_agreement(a, other), DataError);
}

TEST(Report, WritesAllArtifacts) {
  const auto c = grid(EffectKind::kCausal, {0.5, -0.2, 0.3, 0.1, -1, 2});
  const auto a = grid(EffectKind::kAssociational, {0.4, 0.2, 0.3, 0.1, -1, 3});
  const auto dir = fresh_dir("ccts_report");
  emit_report(c, a, {{"s1", 1, 0.01}, {"s2", 1, -0.03}}, dir.string(),
              {{1, "s1", EffectKind::kCausal, 0.5, 0.1, 0.45}});
  for (const char* f : {"causal.csv", "associational.csv", "causal.svg", "associational.svg",
                        "summary.json", "oracle.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::ifstream is(dir / "summary.json");
  const auto j = nlohmann::json::parse(is);
  EXPECT_DOUBLE_EQ(j.at("color_range").get<double>(), 3.0);
  EXPECT_DOUBLE_EQ(j.at("sign_agreement").at("all_cells").get<double>(), 5.0 / 6);
  EXPECT_EQ(j.at("first_term_diagnostics").at("n").get<int>(), 2);
  EXPECT_EQ(j.at("oracle").at("within_4_stderr").get<int>(), 1);
  fs::remove_all(dir);
}

TEST(Manifest, ListsFilesSortedWithoutItself) {
  const auto dir = fresh_dir("ccts_manifest");
  fs::create_directories(dir / "sub");
  std::ofstream(dir / "z.txt") << "z";
  std::ofstream(dir / "sub" / "a.txt") << "abc";
  write_manifest(dir, {{"command", "test"}});
  write_manifest(dir, {{"command", "test"}});  // rewriting ignores the old manifest
  std::ifstream is(dir / "manifest.json");
  const auto j = nlohmann::json::parse(is);
  ASSERT_EQ(j.at("files").size(), 2u);
  EXPECT_EQ(j["files"][0]["path"], "sub/a.txt");
  EXPECT_EQ(j["files"][0]["sha256"], sha256_hex("abc"));
  EXPECT_EQ(j["files"][1]["bytes"], 1);
  EXPECT_EQ(j["command"], "test");
  fs::remove_all(dir);
}

int cli(std::vector<std::string> args, std::string* err = nullptr) {
  args.insert(args.begin(), "ccts");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  testing::internal::CaptureStdout();
  testing::internal::CaptureStderr();
  const int rc = cli_main(static_cast<int>(argv.size()), argv.data());
  testing::internal::GetCapturedStdout();
  const auto e = testing::internal::GetCapturedStderr();
  if (err) *err = e;
  return rc;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"--version"}), 0);
  EXPECT_EQ(cli({"--help"}), 0);
  EXPECT_EQ(cli({}), 1);
  EXPECT_EQ(cli({"bogus"}), 1);
  EXPECT_EQ(cli({"synth", "--n", "abc", "--out", "/tmp/x"}), 1);
  EXPECT_EQ(cli({"discover", "--data", "/nonexistent.jsonl", "--out",
                 (fs::temp_directory_path() / "ccts_cli_missing").string()}),
            2);
}

TEST(Cli, MissingCheckpointNamesTrainImputer) {
  const auto dir = fresh_dir("ccts_cli_ckpt");
  const std::string d = dir.string();
  ASSERT_EQ(cli({"synth", "--config", CCTS_SOURCE_DIR "/configs/scm_linear.json", "--n", "60",
                 "--out", d + "/data"}),
            0);
  ASSERT_EQ(cli({"train-classifier", "--data", d + "/data/dataset.jsonl", "--epochs", "5",
                 "--out", d + "/clf"}),
            0);
  std::string err;
  const int rc = cli({"attribute", "--data", d + "/data/dataset.jsonl", "--classifier",
                      d + "/clf/classifier.json", "--imputer-dir", d + "/none", "--out",
                      d + "/attr"},
                     &err);
  EXPECT_EQ(rc, 2);
  EXPECT_NE(err.find("train-imputer"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, SynthIsDeterministicAndWritesManifest) {
  const auto dir = fresh_dir("ccts_cli_synth");
  const std::string d = dir.string();
  for (const char* sub : {"/a", "/b"}) {
    ASSERT_EQ(cli({"synth", "--config", CCTS_SOURCE_DIR "/configs/scm_discrete.json", "--n",
                   "30", "--seed", "4", "--out", d + sub}),
              0);
  }
  const auto read = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(read(dir / "a" / "manifest.json"), read(dir / "b" / "manifest.json"));
  const auto m = nlohmann::json::parse(read(dir / "a" / "manifest.json"));
  EXPECT_EQ(m["command"], "synth");
  EXPECT_EQ(m["seed"], 4);
  EXPECT_EQ(read(dir / "a" / "manifest.json").find(d), std::string::npos);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace ccts::report
