#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "crossloss/commands.hpp"
#include "crossloss/errors.hpp"
#include "crossloss/io.hpp"

using crossloss::cli::json;

namespace {

enum class Kind { text, integer, real, flag };

struct Option {
  std::string flag;  // without leading dashes
  Kind kind;
  std::string help;
};

std::string key_of(const std::string& flag) {
  std::string k = flag;
  for (char& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

const std::vector<Option> kSolver{
    {"solver", Kind::text, "lissa (default) or direct"},
    {"damping", Kind::real, "damping added to the Hessian"},
    {"depth", Kind::integer, "LiSSA recursion depth"},
    {"scale", Kind::real, "LiSSA scale c"},
    {"repeats", Kind::integer, "LiSSA repeats"},
    {"lissa-batch", Kind::integer, "LiSSA Hessian batch size"},
};

const std::vector<Option> kDec{
    {"k", Kind::integer, "number of clusters"},
    {"outer-iterations", Kind::integer, "target re-estimations"},
    {"inner-steps", Kind::integer, "gradient steps per target"},
    {"lr", Kind::real, "DEC learning rate"},
    {"mode", Kind::text, "full_batch or minibatch"},
    {"batch-size", Kind::integer, "minibatch size"},
};

const std::vector<Option> kTrainSg{
    {"corpus", Kind::text, "plain-text corpus, one document per line"},
    {"preset", Kind::text, "none, scifi or wnc"},
    {"dim", Kind::integer, "embedding dimension"},
    {"window", Kind::integer, "context window"},
    {"n-neg", Kind::integer, "negatives per pair"},
    {"epochs", Kind::integer, "training epochs"},
    {"lr", Kind::real, "initial learning rate"},
    {"lr-floor", Kind::real, "final learning rate"},
    {"holdout", Kind::real, "held-out document fraction"},
    {"unigram-power", Kind::real, "negative-sampling exponent"},
    {"min-count", Kind::integer, "minimum word count"},
    {"stopwords", Kind::text, "none or builtin"},
    {"preset-vocab", Kind::text, "file of words to keep, one per line"},
};

const std::vector<Option> kWeat{
    {"weat-spec", Kind::text, "WEAT spec JSON {name, X, Y, A, B}"},
    {"skip-oov", Kind::flag, "drop unknown words with a warning instead of failing"},
};

std::vector<Option> concat(std::initializer_list<std::vector<Option>> parts) {
  std::vector<Option> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::map<std::string, std::vector<Option>> command_options() {
  const Option seed{"seed", Kind::integer, "random seed (required for randomized commands)"};
  const Option output{"output", Kind::text, "output path"};
  return {
      {"mog-gen", {seed, output, {"per-class", Kind::integer, "points per class"}, {"sigma", Kind::real, "class std"}}},
      {"plant-corpus",
       concat({{seed, output, {"size", Kind::integer, "sentences"}, {"strength", Kind::real, "own-group co-occurrence rate"},
                {"filler-vocab", Kind::integer, "filler words"}, {"topic-words", Kind::integer, "topic words per group"},
                {"topic-rate", Kind::real, "topic filler rate"}, {"min-exposure", Kind::real, "least attribute exposure"}},
               {{"weat-spec", Kind::text, "groups: X with A, Y with B"}}})},
      {"train-dec", concat({{seed, output, {"points", Kind::text, "MOG CSV"}}, kDec})},
      {"train-sg", concat({{seed, {"output", Kind::text, "output prefix"}}, kTrainSg})},
      {"influence",
       concat({{seed, output, {"train-loss", Kind::text, "dec or sg"}, {"test-loss", Kind::text, "nll, mse, weat or sg"},
                {"model", Kind::text, "DEC model JSON or skip-gram model prefix"},
                {"points", Kind::text, "MOG CSV (dec)"}, {"corpus", Kind::text, "override the training corpus path"},
                {"test-point", Kind::integer, "test point index (nll)"}, {"word", Kind::text, "word (mse)"},
                {"top", Kind::integer, "size of A and M"}, {"top-amplifying", Kind::integer, "size of A"},
                {"top-mitigating", Kind::integer, "size of M"}},
               kWeat, kSolver})},
      {"loo-audit",
       concat({{seed, {"output", Kind::text, "report CSV"}, {"per-point", Kind::text, "per-point CSV"},
                {"points", Kind::text, "MOG CSV (default: generate with the seed)"},
                {"per-class", Kind::integer, "points per class when generating"}, {"sigma", Kind::real, "class std"}},
               kDec, kSolver})},
      {"weat", concat({{output, {"model", Kind::text, "skip-gram model prefix"},
                        {"embeddings", Kind::text, "single embedding table"},
                        {"one-sided", Kind::flag, "use X, Y and A only"}},
                       kWeat})},
      {"cluster", {seed, output, {"model", Kind::text, "skip-gram model prefix"},
                   {"embeddings", Kind::text, "single embedding table"}, {"c-min", Kind::integer, "smallest C"},
                   {"c-max", Kind::integer, "largest C"}, {"assignments", Kind::text, "word,cluster CSV"}}},
      {"mitigate",
       concat({{seed, {"output", Kind::text, "output model prefix"}, {"model", Kind::text, "skip-gram model prefix"},
                {"corpus", Kind::text, "override the training corpus path"},
                {"mode", Kind::text, "mitigate (default) or overbias"},
                {"top", Kind::integer, "size of A and M"}, {"top-amplifying", Kind::integer, "size of A"},
                {"top-mitigating", Kind::integer, "size of M"}, {"steps", Kind::integer, "fine-tuning iterations"},
                {"finetune-lr", Kind::real, "fine-tuning learning rate"},
                {"no-early-stop", Kind::flag, "run every iteration"},
                {"trajectory", Kind::text, "trajectory CSV"}},
               kWeat, kSolver})},
      {"overbias",
       concat({{seed, {"output", Kind::text, "output model prefix"}, {"model", Kind::text, "skip-gram model prefix"},
                {"corpus", Kind::text, "override the training corpus path"},
                {"top", Kind::integer, "size of A and M"}, {"top-amplifying", Kind::integer, "size of A"},
                {"top-mitigating", Kind::integer, "size of M"}, {"steps", Kind::integer, "fine-tuning iterations"},
                {"finetune-lr", Kind::real, "fine-tuning learning rate"},
                {"no-early-stop", Kind::flag, "run every iteration"},
                {"trajectory", Kind::text, "trajectory CSV"}},
               kWeat, kSolver})},
  };
}

const std::map<std::string, std::string> kDescriptions{
    {"mog-gen", "generate a 3-class mixture-of-Gaussians CSV"},
    {"plant-corpus", "generate a corpus with planted target/attribute co-occurrences"},
    {"train-dec", "train DEC centroids on a points CSV"},
    {"train-sg", "train skip-gram embeddings with negative sampling"},
    {"influence", "score every training sample against a test loss"},
    {"loo-audit", "validate predicted influence against leave-one-out retraining"},
    {"weat", "compute the WEAT effect size of an embedding table"},
    {"cluster", "k-means over embeddings with silhouette model selection"},
    {"mitigate", "fine-tune on influence-selected sentences to reduce |WEAT|"},
    {"overbias", "fine-tune on swapped sets to increase |WEAT|"},
};

json to_value(const std::string& raw, Kind kind, const std::string& flag) {
  try {
    std::size_t used = 0;
    switch (kind) {
      case Kind::integer: {
        if (!raw.empty() && raw[0] == '-') throw std::invalid_argument("negative");
        const auto v = std::stoull(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("trailing");
        return v;
      }
      case Kind::real: {
        const auto v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("trailing");
        return v;
      }
      default:
        return raw;
    }
  } catch (const std::exception&) {
    throw crossloss::ConfigError("--" + flag + ": cannot parse '" + raw + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-loss influence functions: DEC and skip-gram pipelines, WEAT audits, LOO validation"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error");

  const auto options = command_options();
  struct Bound {
    CLI::App* sub;
    std::string config_path;
    std::map<std::string, std::string> texts;
    std::map<std::string, bool> flags;
  };
  std::map<std::string, Bound> bound;
  for (const auto& name : crossloss::cli::command_names()) {
    auto& b = bound[name];
    b.sub = app.add_subcommand(name, kDescriptions.at(name));
    b.sub->add_option("--config", b.config_path, "JSON config file; flags override its values");
    for (const auto& opt : options.at(name)) {
      if (opt.kind == Kind::flag) {
        b.sub->add_flag("--" + opt.flag, b.flags[opt.flag], opt.help);
      } else {
        b.sub->add_option("--" + opt.flag, b.texts[opt.flag], opt.help);
      }
    }
  }
  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("crossloss"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  for (auto& [name, b] : bound) {
    if (!b.sub->parsed()) continue;
    try {
      json file = json::object();
      if (!b.config_path.empty()) {
        file = json::parse(crossloss::io::read_text(b.config_path));
      }
      json flags = json::object();
      for (const auto& opt : options.at(name)) {
        if (b.sub->count("--" + opt.flag) == 0) continue;
        flags[key_of(opt.flag)] = opt.kind == Kind::flag ? json(b.flags[opt.flag])
                                                         : to_value(b.texts[opt.flag], opt.kind, opt.flag);
      }
      std::string command = name;
      if (name == "mitigate" && flags.contains("mode")) {
        const auto mode = flags["mode"].get<std::string>();
        if (mode != "mitigate" && mode != "overbias") throw crossloss::ConfigError("--mode must be mitigate or overbias");
        command = mode;
        flags.erase("mode");
      }
      crossloss::cli::run(command, crossloss::cli::merge(std::move(file), flags), std::cout);
    } catch (const crossloss::VocabError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const crossloss::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const json::exception& e) {
      std::cerr << "error: config: " << e.what() << "\n";
      return 1;
    } catch (const std::filesystem::filesystem_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
