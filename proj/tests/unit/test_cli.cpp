#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "ehs/io.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = ehs::cli::dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("ehs_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs synth -> preprocess -> fit inside `tag/`, always with the same file names.
  void run_pipeline(const std::string& tag, int participants = 3) {
    const auto d = [&](const std::string& f) { return path(tag + "/" + f); };
    ASSERT_EQ(run({"synth", "--seed", "7", "--participants", std::to_string(participants), "--out", d("data")}).code,
              0);
    ASSERT_EQ(run({"preprocess", "--in", d("data/traces"), "--out", d("shifts.csv"), "--sanity-out",
                   d("sanity.jsonl")})
                  .code,
              0);
    ASSERT_EQ(run({"fit", "--model", "all", "--seed", "3", "--in", d("shifts.csv"), "--out", d("fits.json")}).code,
              0);
  }

  fs::path dir_;
};

TEST_F(CliTest, UnknownSubcommandIsUsageError) {
  const auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, ehs::cli::kExitUsage);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"], "usage_error");
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
  EXPECT_EQ(run({"fit", "--in", "a", "--out", "b", "--bogus"}).code, ehs::cli::kExitUsage);
  EXPECT_EQ(run({}).code, ehs::cli::kExitUsage);
}

TEST_F(CliTest, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("preprocess"), std::string::npos);
}

TEST_F(CliTest, MissingInputFileFailsWithStage) {
  const auto r = run({"fit", "--in", path("nope.csv"), "--out", path("fits.json")});
  EXPECT_EQ(r.code, ehs::cli::kExitFailure);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["stage"], "fit");
  EXPECT_EQ(j["error"], "io_error");
}

TEST_F(CliTest, PipelineIsDeterministic) {
  run_pipeline("a");
  run_pipeline("b");
  ASSERT_EQ(run({"fpca", "--in", path("a/fits.json"), "--out", path("a/spectrum.json")}).code, 0);
  ASSERT_EQ(run({"fpca", "--in", path("b/fits.json"), "--out", path("b/spectrum.json")}).code, 0);
  for (const auto* name : {"/shifts.csv", "/sanity.jsonl", "/fits.json", "/spectrum.json", "/data/ground_truth.json"}) {
    EXPECT_EQ(ehs::read_text_file(path(std::string("a") + name)), ehs::read_text_file(path(std::string("b") + name)))
        << name;
  }
}

TEST_F(CliTest, FitAllGivesOneResultPerModelPerParticipant) {
  run_pipeline("p");
  const auto j = ehs::read_json_file(path("p/fits.json"));
  EXPECT_EQ(j["fits"].size(), 9u);
  std::map<std::string, int> per_model;
  for (const auto& f : j["fits"]) ++per_model[f["model"].get<std::string>()];
  EXPECT_EQ(per_model["linear"], 3);
  EXPECT_EQ(per_model["hinge"], 3);
  EXPECT_EQ(per_model["soft-hinge"], 3);
  EXPECT_EQ(j["comparison"].size(), 3u);
  EXPECT_TRUE(j["provenance"].contains("config_hash"));
}

TEST_F(CliTest, OutputsCarryProvenanceWithoutAbsolutePaths) {
  run_pipeline("v");
  ASSERT_EQ(run({"fpca", "--in", path("v/fits.json"), "--out", path("v/spectrum.json")}).code, 0);
  ASSERT_EQ(run({"project", "--model", path("v/spectrum.json"), "--in", path("v/fits.json"), "--out",
                 path("v/scores.csv")})
                .code,
            0);
  ASSERT_EQ(run({"report", "--fits", path("v/fits.json"), "--spectrum", path("v/spectrum.json"), "--out",
                 path("v/report")})
                .code,
            0);
  const std::vector<std::string> files{"v/shifts.csv", "v/sanity.jsonl", "v/fits.json", "v/spectrum.json",
                                       "v/scores.csv"};
  for (const auto& f : files) {
    const auto text = ehs::read_text_file(path(f));
    EXPECT_NE(text.find("config_hash"), std::string::npos) << f;
    EXPECT_EQ(text.find(dir_.string()), std::string::npos) << f;
  }
  for (const auto& entry : fs::directory_iterator(path("v/report"))) {
    const auto text = ehs::read_text_file(entry.path());
    EXPECT_EQ(text.find(dir_.string()), std::string::npos) << entry.path().filename();
  }
  for (const auto* name : {"modes.csv", "scores.csv", "pc1_density.csv", "pc1_summary.json", "model_comparison.csv",
                           "summary.md"}) {
    EXPECT_TRUE(fs::exists(path(std::string("v/report/") + name))) << name;
  }
  const auto scores = ehs::read_text_file(path("v/scores.csv"));
  EXPECT_NE(scores.find("curve_id,pc1,pc2,percentile_pc1"), std::string::npos);
}

TEST_F(CliTest, FlagsOverrideConfigFileOverrideDefaults) {
  run_pipeline("c", 2);
  {
    std::ofstream cfg(path("cfg.json"));
    cfg << R"({"starts": 5, "max_iters": 50})";
  }
  ASSERT_EQ(run({"fit", "--model", "soft-hinge", "--config", path("cfg.json"), "--in", path("c/shifts.csv"), "--out",
                 path("from_file.json")})
                .code,
            0);
  ASSERT_EQ(run({"fit", "--model", "soft-hinge", "--config", path("cfg.json"), "--starts", "7", "--in",
                 path("c/shifts.csv"), "--out", path("from_flag.json")})
                .code,
            0);
  const auto a = ehs::read_json_file(path("from_file.json"))["provenance"]["config"];
  const auto b = ehs::read_json_file(path("from_flag.json"))["provenance"]["config"];
  EXPECT_EQ(a["starts"], 5);
  EXPECT_EQ(a["max_iters"], 50);
  EXPECT_EQ(b["starts"], 7);
  EXPECT_EQ(b["max_iters"], 50);
  EXPECT_EQ(b["tol_grad"], 1e-8);
}

TEST_F(CliTest, UnknownConfigKeyIsUsageError) {
  {
    std::ofstream cfg(path("bad.json"));
    cfg << R"({"stars": 5})";
  }
  const auto r = run({"fit", "--config", path("bad.json"), "--in", path("x.csv"), "--out", path("y.json")});
  EXPECT_EQ(r.code, ehs::cli::kExitUsage);
}

TEST_F(CliTest, SingleParticipantReportNamesFailingStage) {
  run_pipeline("s", 1);
  const auto r = run({"report", "--fits", path("s/fits.json"), "--out", path("s/report")});
  EXPECT_EQ(r.code, ehs::cli::kExitFailure);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "too_few_curves");
  const auto summary = ehs::read_text_file(path("s/report/summary.md"));
  EXPECT_NE(summary.find("fpca"), std::string::npos);
  EXPECT_NE(summary.find("too_few_curves"), std::string::npos);
}

TEST_F(CliTest, EmptyFitsIsMissingInput) {
  {
    std::ofstream f(path("empty.json"));
    f << R"({"fits": []})";
  }
  const auto r = run({"report", "--fits", path("empty.json"), "--out", path("r")});
  EXPECT_EQ(r.code, ehs::cli::kExitFailure);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "missing_input");
}

TEST_F(CliTest, SensitivityWritesCorrelations) {
  ASSERT_EQ(run({"synth", "--seed", "1", "--participants", "2", "--out", path("d")}).code, 0);
  ASSERT_EQ(run({"sensitivity", "--in", path("d/traces"), "--out", path("sens.json")}).code, 0);
  const auto j = ehs::read_json_file(path("sens.json"));
  ASSERT_EQ(j["participants"].size(), 2u);
  for (const auto& p : j["participants"]) {
    for (const auto& c : p["correlations"]) EXPECT_GT(c["r"].get<double>(), 0.99);
  }
}

TEST_F(CliTest, MissingPartnerStreamFailsSanity) {
  ASSERT_EQ(run({"synth", "--seed", "1", "--participants", "1", "--out", path("d")}).code, 0);
  fs::remove(path("d/traces/P01_T05_head.csv"));
  ASSERT_EQ(run({"preprocess", "--in", path("d/traces"), "--out", path("s.csv"), "--sanity-out", path("s.jsonl")})
                .code,
            0);
  const auto sanity = ehs::read_text_file(path("s.jsonl"));
  EXPECT_NE(sanity.find("missing_stream"), std::string::npos);
  // One trial short of thirty: the participant is dropped from the shift table.
  std::istringstream in(ehs::read_text_file(path("s.csv")));
  EXPECT_TRUE(ehs::read_shifts_csv(in).empty());
}

}  // namespace
