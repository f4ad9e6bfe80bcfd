#include "ragkit/util.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("RAGKIT_THREADS=2 ") + RAGKIT_CLI + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("ragkit-cli-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string p(const std::string& name) const { return (dir / name).string(); }
  json read_json(const std::string& name) const { return json::parse(ragkit::read_file(dir / name)); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("bogus"), 1);
  EXPECT_EQ(run("synth --out " + p("x.jsonl") + " --level 1.5"), 1);
  EXPECT_EQ(run("synth --out " + p("x.jsonl") + " --per-class 0"), 1);
  EXPECT_EQ(run("fit " + p("x.jsonl") + " --eta 2"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, DataErrors) {
  EXPECT_EQ(run("fit " + p("missing.jsonl") + " --out " + p("m")), 2);
  ragkit::write_file_atomic(dir / "bad.jsonl", "{\"not\": \"a dataset\"}\n");
  EXPECT_EQ(run("fit " + p("bad.jsonl") + " --out " + p("m")), 2);
}

TEST_F(Cli, PipelineAndManifests) {
  const std::string common = " --per-class 6 --level 0.1 --seed 3";
  ASSERT_EQ(run("synth --out " + p("train.jsonl") + " --out-test " + p("test.jsonl") + common), 0);
  EXPECT_EQ(read_json("train.jsonl.manifest.json")["counters"]["train_graphs"], 12);

  ASSERT_EQ(run("fit " + p("train.jsonl") + " --out " + p("models")), 0);
  const auto fit = read_json("models/fit.manifest.json");
  EXPECT_EQ(fit["counters"]["fit_match_calls"], fit["counters"]["fit_match_calls_expected"]);
  EXPECT_EQ(fit["counters"]["fit_match_calls"]["class0"], 5);
  EXPECT_TRUE(fit["inputs"].contains(p("train.jsonl")));
  EXPECT_TRUE(fit.contains("config"));

  ASSERT_EQ(run("embed " + p("train.jsonl") + " --models " + p("models") + " --out " + p("train.csv")), 0);
  ASSERT_EQ(run("embed " + p("test.jsonl") + " --models " + p("models") + " --out " + p("test.csv") + " --stats " +
                p("train.stats.json")),
            0);
  EXPECT_EQ(read_json("test.csv.manifest.json")["counters"]["embed_match_calls"], 24);

  ASSERT_EQ(run("classify --train-emb " + p("train.csv") + " --test-emb " + p("test.csv") + " --train " +
                p("train.jsonl") + " --test " + p("test.jsonl") + " --folds 3 --out " + p("cls")),
            0);
  for (const char* f : {"predictions_lf.csv", "predictions_ml.csv", "predictions_knn.csv", "metrics.json"})
    EXPECT_TRUE(fs::exists(dir / "cls" / f)) << f;

  ASSERT_EQ(run("roc " + p("cls/predictions_lf.csv") + " --out " + p("roc.csv")), 0);
  EXPECT_TRUE(fs::exists(dir / "roc.csv"));

  ASSERT_EQ(run("match " + p("train.jsonl") + " --source train-c0-0000 --target train-c0-0001 --out " + p("m.json")), 0);
  EXPECT_TRUE(read_json("m.json").contains("score"));
  ASSERT_EQ(run("match " + p("train.jsonl") + " --source train-c0-0000 --model " + p("models/model_class0.json") +
                " --out " + p("mm.json")),
            0);
  EXPECT_TRUE(read_json("mm.json").contains("log_likelihood"));
  EXPECT_EQ(run("match " + p("train.jsonl") + " --source nope --target train-c0-0001"), 2);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  ragkit::write_file_atomic(dir / "c.json", json{{"per_class", 4}, {"synth", {{"level", 0.2}}}}.dump());
  ASSERT_EQ(run("synth --config " + p("c.json") + " --per-class 2 --out " + p("d.jsonl")), 0);
  const auto m = read_json("d.jsonl.manifest.json");
  EXPECT_EQ(m["counters"]["train_graphs"], 4);
  EXPECT_EQ(m["config"]["synth"]["level"], 0.2);
  EXPECT_EQ(run("synth --config " + p("absent.json") + " --out " + p("d.jsonl")), 1);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  ASSERT_EQ(run("synth --per-class 3 --out " + p("a.jsonl")), 0);
  const auto first = ragkit::read_file(dir / "a.jsonl");
  ASSERT_EQ(run("synth --per-class 3 --out " + p("a.jsonl")), 0);
  EXPECT_EQ(ragkit::read_file(dir / "a.jsonl"), first);
}
