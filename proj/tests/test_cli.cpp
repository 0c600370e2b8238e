#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "crossloss/commands.hpp"
#include "crossloss/errors.hpp"
#include "crossloss/io.hpp"
#include "fixtures.hpp"

using namespace crossloss;
using cli::json;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("crossloss_test_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    io::write_text(path("career.json"), io::weat_spec_json(fixtures::career_spec()).dump());
    io::write_text(path("oov.json"),
                   R"({"name":"oov","X":["john","zzfoo"],"Y":["amy"],"A":["office","qqbar"],"B":["home"]})");
  }

  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  static std::string run(const std::string& command, const json& cfg) {
    std::ostringstream os;
    cli::run(command, cfg, os);
    return os.str();
  }

  // Small planted corpus and a quickly trained skip-gram model on it.
  static void ensure_skipgram() {
    if (fs::exists(path("sg.input.txt"))) return;
    run("plant-corpus", {{"seed", 3}, {"size", 400}, {"weat_spec", path("career.json")}, {"output", path("corpus.txt")}});
    run("train-sg", {{"seed", 4}, {"corpus", path("corpus.txt")}, {"dim", 6}, {"epochs", 2}, {"output", path("sg")}});
  }

  static inline fs::path dir_;
};

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().filename().string()] = io::read_text(e.path());
  }
  return out;
}

int tool(const std::string& args) {
  const std::string cmd = std::string(CROSSLOSS_TOOL) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_F(Cli, CommandNamesAreListed) {
  const auto& names = cli::command_names();
  for (const char* n : {"mog-gen", "train-dec", "train-sg", "influence", "loo-audit", "weat", "cluster", "mitigate",
                        "overbias"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
  EXPECT_THROW(run("no-such-command", json::object()), ConfigError);
}

TEST_F(Cli, MissingSeedIsAConfigError) {
  EXPECT_THROW(run("mog-gen", {{"output", path("x.csv")}}), ConfigError);
  EXPECT_THROW(run("train-dec", {{"points", path("x.csv")}, {"output", path("x.json")}}), ConfigError);
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(Cli, MergeAndHashedConfig) {
  const json merged = cli::merge({{"seed", 1}, {"lr", 0.1}, {"output", "a"}}, {{"lr", 0.2}});
  EXPECT_EQ(merged.at("lr"), 0.2);
  EXPECT_EQ(merged.at("seed"), 1);
  EXPECT_THROW(cli::merge(json::array(), json::object()), ConfigError);
  const json h = cli::hashed_config({{"seed", 1}, {"output", "a"}, {"points", "p"}, {"corpus", "c"}, {"model", "m"}});
  EXPECT_EQ(h, (json{{"seed", 1}}));
}

TEST_F(Cli, RelocatingOutputsKeepsBytes) {
  run("mog-gen", {{"seed", 5}, {"output", path("a.csv")}});
  run("mog-gen", {{"seed", 5}, {"output", path("b.csv")}});
  EXPECT_EQ(io::read_text(path("a.csv")), io::read_text(path("b.csv")));
  const auto text = io::read_text(path("a.csv"));
  EXPECT_EQ(text.rfind("# mog-gen config=", 0), 0u);
  EXPECT_NE(text.find("seed=5"), std::string::npos);
  run("mog-gen", {{"seed", 6}, {"output", path("c.csv")}});
  EXPECT_NE(io::read_text(path("a.csv")), io::read_text(path("c.csv")));
}

TEST_F(Cli, DecPipeline) {
  run("mog-gen", {{"seed", 1}, {"per_class", 10}, {"output", path("mog.csv")}});
  EXPECT_EQ(io::parse_points_csv(io::read_text(path("mog.csv")), "mog").size(), 30u);
  const auto summary = run("train-dec", {{"seed", 7}, {"points", path("mog.csv")}, {"output", path("dec.json")}});
  EXPECT_NE(summary.find("accuracy"), std::string::npos);
  const auto model_json = json::parse(io::read_text(path("dec.json")));
  EXPECT_GE(model_json.at("accuracy").get<double>(), 0.9);
  EXPECT_EQ(model_json.at("meta").at("command"), "train-dec");

  run("influence", {{"seed", 2}, {"train_loss", "dec"}, {"test_loss", "nll"}, {"model", path("dec.json")},
                    {"points", path("mog.csv")}, {"test_point", 4}, {"solver", "direct"}, {"top", 5},
                    {"output", path("dec_influence.jsonl")}});
  const auto recs = io::parse_influence_jsonl(io::read_text(path("dec_influence.jsonl")), "jsonl");
  ASSERT_EQ(recs.size(), 30u);
  for (std::size_t i = 1; i < recs.size(); ++i) EXPECT_GE(recs[i - 1].score, recs[i].score);
  EXPECT_EQ(recs.front().rank, 1);
  EXPECT_EQ(recs.back().rank, -1);
  const auto meta = io::read_meta(path("dec_influence.jsonl"));
  EXPECT_EQ(meta.at("command"), "influence");
  EXPECT_EQ(meta.at("seed"), 2);

  EXPECT_THROW(run("influence", {{"seed", 2}, {"train_loss", "dec"}, {"test_loss", "weat"}, {"model", path("dec.json")},
                                 {"points", path("mog.csv")}, {"output", path("bad.jsonl")}}),
               ConfigError);
  EXPECT_THROW(run("influence", {{"seed", 2}, {"train_loss", "dec"}, {"test_loss", "nll"}, {"model", path("dec.json")},
                                 {"points", path("mog.csv")}, {"test_point", 30}, {"output", path("bad.jsonl")}}),
               ConfigError);
}

TEST_F(Cli, LooAuditWritesReports) {
  run("loo-audit", {{"seed", 1}, {"per_class", 4}, {"solver", "direct"}, {"outer_iterations", 10},
                    {"output", path("audit.csv")}});
  const auto report = io::read_text(path("audit.csv"));
  EXPECT_NE(report.find("pipeline,class,n_points,mean_r"), std::string::npos);
  EXPECT_NE(report.find("\nmatched,all,12,"), std::string::npos);
  EXPECT_NE(report.find("\ncross,all,12,"), std::string::npos);
  const auto per_point = io::read_text(path("audit.csv.points.csv"));
  EXPECT_NE(per_point.find("pipeline,test_point,class,pearson_r"), std::string::npos);
}

TEST_F(Cli, SkipGramPipeline) {
  ensure_skipgram();
  const auto loaded = io::load_model(path("sg"));
  EXPECT_EQ(loaded.model.dim, 6u);
  EXPECT_TRUE(loaded.model.vocab.contains("john"));
  EXPECT_EQ(io::read_meta(path("sg.input.txt")).at("command"), "train-sg");

  const auto weat = run("weat", {{"model", path("sg")}, {"weat_spec", path("career.json")}, {"output", path("w.json")}});
  EXPECT_NE(weat.find("effect"), std::string::npos);
  const auto w = json::parse(io::read_text(path("w.json")));
  EXPECT_LE(std::abs(w.at("effect").get<double>()), 2.0);
  run("weat", {{"embeddings", path("sg.input.txt")}, {"weat_spec", path("career.json")}, {"output", path("w2.json")}});
  EXPECT_EQ(json::parse(io::read_text(path("w2.json"))).at("effect"), w.at("effect"));

  run("influence", {{"seed", 8}, {"train_loss", "sg"}, {"test_loss", "weat"}, {"model", path("sg")},
                    {"weat_spec", path("career.json")}, {"depth", 50}, {"repeats", 1}, {"top", 10},
                    {"output", path("sg_influence.jsonl")}});
  const auto recs = io::parse_influence_jsonl(io::read_text(path("sg_influence.jsonl")), "jsonl");
  EXPECT_FALSE(recs.empty());
  const auto corpus = io::read_lines(path("corpus.txt"));
  for (const auto& r : recs) {
    ASSERT_LT(r.sample_id, corpus.size());
    EXPECT_EQ(r.text, corpus[r.sample_id]);
  }

  run("mitigate", {{"seed", 9}, {"model", path("sg")}, {"weat_spec", path("career.json")}, {"depth", 50},
                   {"repeats", 1}, {"top", 10}, {"steps", 3}, {"output", path("mit")}});
  const auto traj = io::read_text(path("mit.trajectory.csv"));
  EXPECT_NE(traj.find("iteration,effect\n0,"), std::string::npos);
  EXPECT_EQ(io::load_model(path("mit")).model.dim, 6u);

  run("cluster", {{"seed", 2}, {"model", path("sg")}, {"c_min", 2}, {"c_max", 4}, {"output", path("clusters.csv")}});
  EXPECT_NE(io::read_text(path("clusters.csv")).find("clusters,silhouette\n2,"), std::string::npos);
  EXPECT_NE(io::read_text(path("clusters.csv.assignments.csv")).find("word,cluster\n"), std::string::npos);
}

TEST_F(Cli, OutOfVocabularyWeat) {
  ensure_skipgram();
  try {
    run("weat", {{"model", path("sg")}, {"weat_spec", path("oov.json")}});
    FAIL() << "expected VocabError";
  } catch (const VocabError& e) {
    EXPECT_EQ(e.words(), (std::vector<std::string>{"zzfoo", "qqbar"}));
    EXPECT_NE(std::string(e.what()).find("zzfoo"), std::string::npos);
  }
  const auto out = run("weat", {{"model", path("sg")}, {"weat_spec", path("oov.json")}, {"skip_oov", true}});
  EXPECT_NE(out.find("effect"), std::string::npos);
}

TEST_F(Cli, IdenticalRerunIsByteIdentical) {
  const fs::path sub = dir_ / "rerun";
  fs::create_directories(sub);
  const auto p = [&](const char* n) { return (sub / n).string(); };
  const auto pipeline = [&] {
    run("mog-gen", {{"seed", 11}, {"per_class", 6}, {"output", p("mog.csv")}});
    run("train-dec", {{"seed", 12}, {"points", p("mog.csv")}, {"outer_iterations", 10}, {"output", p("dec.json")}});
    run("influence", {{"seed", 13}, {"train_loss", "dec"}, {"test_loss", "nll"}, {"model", p("dec.json")},
                      {"points", p("mog.csv")}, {"depth", 200}, {"output", p("inf.jsonl")}});
    run("plant-corpus", {{"seed", 14}, {"size", 150}, {"weat_spec", path("career.json")}, {"output", p("c.txt")}});
    run("train-sg", {{"seed", 15}, {"corpus", p("c.txt")}, {"dim", 4}, {"epochs", 1}, {"output", p("sg")}});
    run("influence", {{"seed", 16}, {"train_loss", "sg"}, {"test_loss", "weat"}, {"model", p("sg")},
                      {"weat_spec", path("career.json")}, {"depth", 20}, {"repeats", 1}, {"output", p("sg.jsonl")}});
  };
  pipeline();
  const auto first = snapshot(sub);
  EXPECT_GE(first.size(), 10u);
  pipeline();
  const auto second = snapshot(sub);
  ASSERT_EQ(first.size(), second.size());
  for (const auto& [name, bytes] : first) EXPECT_EQ(second.at(name), bytes) << name;
}

TEST_F(Cli, ToolExitCodes) {
  EXPECT_EQ(tool("mog-gen --output " + path("t.csv")), 1);
  EXPECT_EQ(tool("mog-gen --seed 1 --output " + path("t.csv")), 0);
  ensure_skipgram();
  EXPECT_EQ(tool("weat --model " + path("sg") + " --weat-spec " + path("oov.json")), 2);
  EXPECT_EQ(tool("weat --model " + path("sg") + " --weat-spec " + path("oov.json") + " --skip-oov"), 0);
  io::write_text(path("cfg.json"), R"({"seed": 3, "per_class": 2})");
  EXPECT_EQ(tool("mog-gen --config " + path("cfg.json") + " --per-class 4 --output " + path("t2.csv")), 0);
  EXPECT_EQ(io::parse_points_csv(io::read_text(path("t2.csv")), "t2").size(), 12u);
}
