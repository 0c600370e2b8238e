#include "crossloss/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crossloss/errors.hpp"
#include "crossloss/io.hpp"
#include "crossloss/kmeans.hpp"
#include "crossloss/mse_drift.hpp"
#include "crossloss/oracle.hpp"
#include "crossloss/training.hpp"

namespace crossloss::cli {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> kPathKeys{"config",  "output",     "points",   "corpus",     "model",
                                      "weat_spec", "embeddings", "trajectory", "per_point", "preset_vocab",
                                      "assignments"};

bool has(const json& cfg, const char* key) { return cfg.contains(key) && !cfg.at(key).is_null(); }

template <class T>
T get(const json& cfg, const char* key, T fallback) {
  if (!has(cfg, key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("option '{}' has the wrong type", key));
  }
}

template <class T>
T need(const json& cfg, const char* key) {
  if (!has(cfg, key)) throw ConfigError(fmt::format("missing required option '{}'", key));
  return get<T>(cfg, key, T{});
}

std::uint64_t require_seed(const json& cfg) {
  if (!has(cfg, "seed")) throw ConfigError("this command is randomized: an explicit --seed is required");
  return need<std::uint64_t>(cfg, "seed");
}

fs::path need_path(const json& cfg, const char* key) { return fs::path(need<std::string>(cfg, key)); }

std::string comment(const std::string& command, const json& cfg, std::uint64_t seed) {
  return io::provenance_comment(command, hashed_config(cfg), seed);
}

void meta(const fs::path& path, const std::string& command, const json& cfg, std::uint64_t seed,
          const json& extra = json::object()) {
  json stored = extra;
  stored["effective_config"] = cfg;
  io::write_meta(path, command, hashed_config(cfg), seed, stored);
}

// ---------------------------------------------------------------------------
// Config records

MogConfig mog_config(const json& cfg, std::uint64_t seed) {
  MogConfig m;
  m.per_class = get<std::size_t>(cfg, "per_class", m.per_class);
  m.sigma = get<double>(cfg, "sigma", m.sigma);
  m.seed = seed;
  return m;
}

DecConfig dec_config(const json& cfg, std::uint64_t seed) {
  DecConfig d;
  d.outer_iterations = get<std::size_t>(cfg, "outer_iterations", d.outer_iterations);
  d.inner_steps = get<std::size_t>(cfg, "inner_steps", d.inner_steps);
  d.lr = get<double>(cfg, "lr", d.lr);
  d.batch_size = get<std::size_t>(cfg, "batch_size", d.batch_size);
  const auto mode = get<std::string>(cfg, "mode", "full_batch");
  if (mode == "full_batch") {
    d.mode = DecMode::full_batch;
  } else if (mode == "minibatch") {
    d.mode = DecMode::minibatch;
  } else {
    throw ConfigError("mode must be full_batch or minibatch");
  }
  d.seed = seed;
  d.validate();
  return d;
}

SolverConfig solver_config(const json& cfg, std::uint64_t seed) {
  SolverConfig s;
  const auto kind = get<std::string>(cfg, "solver", "lissa");
  if (kind == "lissa") {
    s.kind = SolverKind::lissa;
  } else if (kind == "direct") {
    s.kind = SolverKind::direct;
  } else {
    throw ConfigError("solver must be lissa or direct");
  }
  s.lissa.depth = get<std::size_t>(cfg, "depth", s.lissa.depth);
  s.lissa.damping = get<double>(cfg, "damping", s.lissa.damping);
  s.lissa.scale = get<double>(cfg, "scale", s.lissa.scale);
  s.lissa.repeats = get<std::size_t>(cfg, "repeats", s.lissa.repeats);
  s.lissa.batch_size = get<std::size_t>(cfg, "lissa_batch", s.lissa.batch_size);
  s.lissa.seed = seed;
  s.lissa.validate();
  return s;
}

TokenizerConfig tokenizer_config(const json& cfg) {
  TokenizerConfig t;
  t.min_count = get<std::size_t>(cfg, "min_count", t.min_count);
  const auto stop = get<std::string>(cfg, "stopwords", "none");
  if (stop == "builtin") {
    t.stopwords = builtin_stopwords();
  } else if (stop != "none") {
    throw ConfigError("stopwords must be none or builtin");
  }
  if (has(cfg, "preset_vocab")) t.preset_vocab = io::read_lines(need_path(cfg, "preset_vocab"));
  return t;
}

TrainConfig train_config(const json& cfg, std::uint64_t seed) {
  const auto preset = get<std::string>(cfg, "preset", "none");
  TrainConfig t;
  if (preset == "scifi") {
    t = TrainConfig::scifi_preset(seed);
  } else if (preset == "wnc") {
    t = TrainConfig::wnc_preset(seed);
  } else if (preset != "none") {
    throw ConfigError("preset must be none, scifi or wnc");
  }
  t.dim = get<std::size_t>(cfg, "dim", t.dim);
  t.window = get<std::size_t>(cfg, "window", t.window);
  t.n_neg = get<std::size_t>(cfg, "n_neg", t.n_neg);
  t.epochs = get<std::size_t>(cfg, "epochs", t.epochs);
  t.lr_initial = get<double>(cfg, "lr", t.lr_initial);
  t.lr_floor = get<double>(cfg, "lr_floor", t.lr_floor);
  t.holdout_fraction = get<double>(cfg, "holdout", t.holdout_fraction);
  t.unigram_power = get<double>(cfg, "unigram_power", t.unigram_power);
  t.seed = seed;
  t.validate();
  return t;
}

WeatSpec weat_spec(const json& cfg, const Vocabulary& vocab) {
  const auto spec = io::load_weat_spec(need_path(cfg, "weat_spec"));
  return resolve_oov(spec, vocab, get<bool>(cfg, "skip_oov", false));
}

// ---------------------------------------------------------------------------
// Skip-gram state rebuilt from a saved model and the config it was trained with

struct SkipGramState {
  io::LoadedModel loaded;
  Corpus corpus;
  SkipGramTraining prepared;  // samples and split; model fields unused
  std::vector<Sample> dataset;
  std::vector<std::string> texts;  // per dataset entry
};

SkipGramState load_skipgram(const json& cfg) {
  const fs::path prefix = need_path(cfg, "model");
  SkipGramState st;
  st.loaded = io::load_model(prefix);
  const json m = io::read_meta(io::EmbeddingFiles::from_prefix(prefix).input);
  if (!m.contains("effective_config")) throw FormatError(prefix.string() + ": metadata lacks the training config");
  json train_cfg = m.at("effective_config");
  if (has(cfg, "corpus")) train_cfg["corpus"] = cfg.at("corpus");
  const auto seed = need<std::uint64_t>(train_cfg, "seed");
  st.corpus = tokenize(io::read_lines(need_path(train_cfg, "corpus")), tokenizer_config(train_cfg));
  if (!(st.corpus.vocab == st.loaded.model.vocab))
    throw ConfigError("corpus vocabulary does not match the saved model; pass the corpus it was trained on");
  st.prepared = prepare_skipgram(st.corpus, train_config(train_cfg, seed));
  st.dataset = sentence_dataset(st.prepared);
  for (std::size_t d : st.prepared.train_docs) st.texts.push_back(st.corpus.texts[d]);
  return st;
}

std::string point_text(const LabeledPoint& p) {
  std::string s;
  for (double v : p.x) s += io::format_double(v) + ",";
  return s + std::to_string(p.label);
}

void print_top(std::ostream& out, const std::vector<io::RankedRecord>& records, std::size_t n) {
  for (std::size_t i = 0; i < std::min(n, records.size()); ++i) {
    out << fmt::format("  {:>+12.6g}  #{}  {}\n", records[i].score, records[i].sample_id, records[i].text);
  }
}

// ---------------------------------------------------------------------------
// Commands

void cmd_mog_gen(const json& cfg, std::ostream& out) {
  const auto seed = require_seed(cfg);
  const auto points = generate_mog(mog_config(cfg, seed));
  const auto path = need_path(cfg, "output");
  io::write_text(path, io::format_points_csv(points, comment("mog-gen", cfg, seed)));
  out << fmt::format("wrote {} points ({} classes) to {}\n", points.size(), 3, path.string());
}

void cmd_plant_corpus(const json& cfg, std::ostream& out) {
  const auto seed = require_seed(cfg);
  const auto spec = io::load_weat_spec(need_path(cfg, "weat_spec"));
  PlantConfig p;
  p.groups = {{spec.x, spec.a}, {spec.y, spec.b}};
  p.strength = get<double>(cfg, "strength", p.strength);
  p.size = need<std::size_t>(cfg, "size");
  p.filler_vocab = get<std::size_t>(cfg, "filler_vocab", p.filler_vocab);
  p.topic_words = get<std::size_t>(cfg, "topic_words", p.topic_words);
  p.topic_rate = get<double>(cfg, "topic_rate", p.topic_rate);
  p.min_exposure = get<double>(cfg, "min_exposure", p.min_exposure);
  p.seed = seed;
  const auto docs = plant_biased_corpus(p);
  std::string text;
  for (const auto& d : docs) text += d + "\n";
  const auto path = need_path(cfg, "output");
  io::write_text(path, text);
  meta(path, "plant-corpus", cfg, seed);
  out << fmt::format("wrote {} planted sentences to {}\n", docs.size(), path.string());
}

void cmd_train_dec(const json& cfg, std::ostream& out) {
  const auto seed = require_seed(cfg);
  const auto pts_path = need_path(cfg, "points");
  const auto points = io::parse_points_csv(io::read_text(pts_path), pts_path.string());
  const auto k = get<std::size_t>(cfg, "k", 3);
  const auto dec = train_dec(points, k, dec_config(cfg, seed));
  io::DecModelFile file{dec.run.model, dec.init, dec.run.target, dec.class_map};
  json j = io::dec_model_json(file);
  j["meta"] = {{"command", "train-dec"}, {"config_hash", io::config_hash(hashed_config(cfg))}, {"seed", seed}};
  j["accuracy"] = dec.accuracy;
  j["kmeans_accuracy"] = dec.kmeans_accuracy;
  const auto path = need_path(cfg, "output");
  io::write_text(path, j.dump(2) + "\n");
  out << fmt::format("DEC k={}: accuracy {:.4f} (k-means init {:.4f}), final KL {:.6g}\n", k, dec.accuracy,
                     dec.kmeans_accuracy, dec.run.kl_history.empty() ? 0.0 : dec.run.kl_history.back());
  out << "wrote " << path.string() << "\n";
}

void cmd_train_sg(const json& cfg, std::ostream& out) {
  const auto seed = require_seed(cfg);
  const auto corpus = tokenize(io::read_lines(need_path(cfg, "corpus")), tokenizer_config(cfg));
  const auto tc = train_config(cfg, seed);
  const auto tr = train_skipgram(corpus, tc);
  const auto prefix = need_path(cfg, "output");
  io::save_model(prefix, tr.model, tr.initial_input);
  const auto files = io::EmbeddingFiles::from_prefix(prefix);
  for (const auto& f : {files.input, files.output, files.initial}) meta(f, "train-sg", cfg, seed);
  std::string loss = comment("train-sg", cfg, seed) + "epoch,heldout_loss\n";
  for (std::size_t e = 0; e < tr.heldout_loss.size(); ++e)
    loss += std::to_string(e) + "," + io::format_double(tr.heldout_loss[e]) + "\n";
  io::write_text(prefix.string() + ".loss.csv", loss);
  out << fmt::format("skip-gram: vocab {}, dim {}, {} training / {} held-out documents, {} epochs\n",
                     corpus.vocab.size(), tc.dim, tr.train_docs.size(), tr.heldout_docs.size(), tc.epochs);
  out << fmt::format("held-out loss {:.6g} -> {:.6g}\n", tr.heldout_loss.front(), tr.heldout_loss.back());
  out << "wrote " << files.input.string() << ", " << files.output.string() << ", " << files.initial.string() << "\n";
}

void write_influence(const json& cfg, const std::string& command, std::uint64_t seed,
                     const std::vector<InfluenceRecord>& scores, const InfluenceSets& sets,
                     const std::vector<std::string>& texts, const std::vector<std::size_t>* ids, std::ostream& out) {
  auto ranked = io::rank_records(scores, sets, texts);
  if (ids != nullptr) {
    for (auto& r : ranked) r.sample_id = ids->at(r.sample_id);
  }
  const auto path = need_path(cfg, "output");
  io::write_text(path, io::format_influence_jsonl(ranked));
  meta(path, command, cfg, seed,
       {{"amplifying", sets.amplifying.size()}, {"mitigating", sets.mitigating.size()}, {"truncated", sets.truncated}});
  out << fmt::format("{} samples scored; |A| = {}, |M| = {}\n", ranked.size(), sets.amplifying.size(),
                     sets.mitigating.size());
  out << "most amplifying:\n";
  print_top(out, ranked, 5);
  std::reverse(ranked.begin(), ranked.end());
  out << "most mitigating:\n";
  print_top(out, ranked, 5);
  out << "wrote " << path.string() << "\n";
}

void cmd_influence(const json& cfg, std::ostream& out) {
  const auto seed = require_seed(cfg);
  const auto solver = solver_config(cfg, seed);
  const auto train_loss = need<std::string>(cfg, "train_loss");
  const auto test_loss = need<std::string>(cfg, "test_loss");
  const auto top = static_cast<std::ptrdiff_t>(get<std::size_t>(cfg, "top", 50));
  const auto k_a = static_cast<std::ptrdiff_t>(get<std::size_t>(cfg, "top_amplifying", static_cast<std::size_t>(top)));
  const auto k_m = static_cast<std::ptrdiff_t>(get<std::size_t>(cfg, "top_mitigating", static_cast<std::size_t>(top)));

  if (train_loss == "dec") {
    if (test_loss != "nll") throw ConfigError("with --train-loss dec the test loss must be nll");
    const auto model_path = need_path(cfg, "model");
    const auto file = io::parse_dec_model(io::read_text(model_path), model_path.string());
    const auto pts_path = need_path(cfg, "points");
    const auto points = io::parse_points_csv(io::read_text(pts_path), pts_path.string());
    const std::vector<Sample> dataset(points.begin(), points.end());
    const auto t = get<std::size_t>(cfg, "test_point", 0);
    if (t >= points.size()) throw ConfigError("test_point out of range");
    const DecObjective train_obj(file.target);
    const NllObjective test_obj(file.model.k, file.model.dim, file.class_map);
    const auto params = file.model.to_params();
    const auto s = stest(test_obj, std::span<const Sample>(&dataset[t], 1), train_obj, params, dataset, solver);
    const auto scores = score_all(s, train_obj, params, dataset);
    const auto sets = rank_and_split(scores, k_a, k_m);
    std::vector<std::string> texts;
    for (const auto& p : points) texts.push_back(point_text(p));
    out << fmt::format("influence of DEC training points on NLL of point {} (label {})\n", t, points[t].label);
    write_influence(cfg, "influence", seed, scores, sets, texts, nullptr, out);
    return;
  }
  if (train_loss != "sg") throw ConfigError("train_loss must be dec or sg");

  const auto st = load_skipgram(cfg);
  const auto& model = st.loaded.model;
  const SkipGramLayout layout = model.layout();
  const SkipGramObjective train_obj(layout);
  const auto params = model.to_params();
  std::vector<Sample> test_batch;
  std::unique_ptr<Objective> test_obj;
  if (test_loss == "weat") {
    test_obj = std::make_unique<AbsWeatObjective>(layout, to_ids(weat_spec(cfg, model.vocab), model.vocab));
    test_batch.emplace_back(WholeModel{});
  } else if (test_loss == "mse") {
    const auto word = need<std::string>(cfg, "word");
    test_obj = std::make_unique<MseDriftObjective>(layout, st.loaded.initial_input);
    test_batch.emplace_back(WordTarget{model.vocab.id(word)});
  } else if (test_loss == "sg") {
    test_obj = std::make_unique<SkipGramObjective>(layout);
    for (std::size_t d : st.prepared.heldout_docs) test_batch.emplace_back(SentenceSample{st.prepared.samples[d]});
    if (test_batch.empty()) throw ConfigError("test loss sg needs held-out documents (holdout > 0)");
  } else {
    throw ConfigError("test_loss must be nll, mse, weat or sg");
  }
  const auto s = stest(*test_obj, test_batch, train_obj, params, st.dataset, solver);
  const auto scores = score_all(s, train_obj, params, st.dataset);
  const auto sets = rank_and_split(scores, k_a, k_m);
  out << fmt::format("influence of {} training sentences on the {} test loss\n", st.dataset.size(), test_loss);
  write_influence(cfg, "influence", seed, scores, sets, st.texts, &st.prepared.train_docs, out);
}

void cmd_loo_audit(const json& cfg, std::ostream& out) {
  const auto seed = require_seed(cfg);
  std::vector<LabeledPoint> points;
  if (has(cfg, "points")) {
    const auto p = need_path(cfg, "points");
    points = io::parse_points_csv(io::read_text(p), p.string());
  } else {
    points = generate_mog(mog_config(cfg, seed));
  }
  const auto k = get<std::size_t>(cfg, "k", 3);
  const auto audit = run_mog_audit(points, k, dec_config(cfg, seed), solver_config(cfg, seed));
  const auto path = need_path(cfg, "output");
  io::write_text(path, comment("loo-audit", cfg, seed) + io::format_report_csv("matched", audit.matched.report, true) +
                           io::format_report_csv("cross", audit.cross.report, false));
  const fs::path per_point = has(cfg, "per_point") ? need_path(cfg, "per_point") : fs::path(path.string() + ".points.csv");
  io::write_text(per_point, comment("loo-audit", cfg, seed) +
                                io::format_per_point_csv("matched", audit.matched.report, true) +
                                io::format_per_point_csv("cross", audit.cross.report, false));
  out << fmt::format("DEC accuracy {:.4f}; {} test points, {} LOO retrainings per pipeline\n", audit.dec.accuracy,
                     points.size(), points.size());
  for (const auto* p : {&audit.matched, &audit.cross}) {
    const auto& r = p->report;
    out << fmt::format("{:>8}: mean r {:.4f}, r > 0.6: {:.1f}%, r > 0.8: {:.1f}%\n",
                       p == &audit.matched ? "matched" : "cross", r.mean_r, 100.0 * r.fraction_above.at(0.6),
                       100.0 * r.fraction_above.at(0.8));
  }
  out << "wrote " << path.string() << " and " << per_point.string() << "\n";
}

struct Table {
  Vocabulary vocab;
  std::size_t dim = 0;
  std::vector<double> values;
};

Table load_table(const json& cfg) {
  if (has(cfg, "embeddings")) {
    auto t = io::load_embeddings(need_path(cfg, "embeddings"));
    return {std::move(t.vocab), t.dim, std::move(t.values)};
  }
  auto m = io::load_model(need_path(cfg, "model"));
  return {std::move(m.model.vocab), m.model.dim, std::move(m.model.input_table)};
}

void cmd_weat(const json& cfg, std::ostream& out) {
  const auto table = load_table(cfg);
  const EmbeddingView view{table.vocab, table.dim, table.values};
  const bool one_sided = get<bool>(cfg, "one_sided", false);
  WeatSpec spec = io::load_weat_spec(need_path(cfg, "weat_spec"));
  if (one_sided) spec.b = spec.a;  // B is ignored; keeps validation of X/Y/A uniform
  spec = resolve_oov(spec, table.vocab, get<bool>(cfg, "skip_oov", false));
  const auto r = one_sided ? one_sided_weat(spec.x, spec.y, spec.a, view) : weat_effect(spec, view);
  out << fmt::format("{}{}: effect {:.6f} (mean X {:.6f}, mean Y {:.6f}, std {:.6f}){}\n", spec.name,
                     one_sided ? " (one-sided)" : "", r.effect, r.mean_x, r.mean_y, r.pooled_std,
                     r.degenerate ? " [degenerate]" : "");
  if (has(cfg, "output")) {
    json j = {{"name", spec.name},   {"one_sided", one_sided},      {"effect", r.effect},
              {"mean_x", r.mean_x},  {"mean_y", r.mean_y},          {"pooled_std", r.pooled_std},
              {"degenerate", r.degenerate}, {"associations", r.associations},
              {"meta", {{"command", "weat"}, {"config_hash", io::config_hash(hashed_config(cfg))}}}};
    io::write_text(need_path(cfg, "output"), j.dump(2) + "\n");
  }
}

void cmd_cluster(const json& cfg, std::ostream& out) {
  const auto seed = require_seed(cfg);
  const auto table = load_table(cfg);
  const std::size_t n = table.vocab.size();
  const auto c_min = get<std::size_t>(cfg, "c_min", 2);
  const auto c_max = std::min(get<std::size_t>(cfg, "c_max", 30), n - 1);
  const auto sel = select_clusters(table.values, table.dim, c_min, c_max, seed);
  std::string csv = comment("cluster", cfg, seed) + "clusters,silhouette\n";
  for (const auto& [c, s] : sel.scores) csv += std::to_string(c) + "," + io::format_double(s) + "\n";
  const auto path = need_path(cfg, "output");
  io::write_text(path, csv);
  const auto best = kmeans(table.values, table.dim, sel.best, seed);
  std::string assign = comment("cluster", cfg, seed) + "word,cluster\n";
  for (std::size_t w = 0; w < n; ++w)
    assign += table.vocab.word(static_cast<WordId>(w)) + "," + std::to_string(best.assignments[w]) + "\n";
  const fs::path apath = has(cfg, "assignments") ? need_path(cfg, "assignments") : fs::path(path.string() + ".assignments.csv");
  io::write_text(apath, assign);
  out << fmt::format("best C = {} (silhouette {:.4f}) over C in [{}, {}]\n", sel.best, sel.scores.at(sel.best), c_min,
                     c_max);
  out << "wrote " << path.string() << " and " << apath.string() << "\n";
}

void cmd_mitigate(const json& cfg, std::ostream& out, MitigationMode mode) {
  const auto seed = require_seed(cfg);
  const auto st = load_skipgram(cfg);
  MitigationConfig m;
  m.weat = weat_spec(cfg, st.loaded.model.vocab);
  m.k_amplifying = get<std::size_t>(cfg, "top_amplifying", get<std::size_t>(cfg, "top", m.k_amplifying));
  m.k_mitigating = get<std::size_t>(cfg, "top_mitigating", get<std::size_t>(cfg, "top", m.k_mitigating));
  m.steps = get<std::size_t>(cfg, "steps", m.steps);
  m.finetune_lr = get<double>(cfg, "finetune_lr", m.finetune_lr);
  m.early_stop = !get<bool>(cfg, "no_early_stop", false);
  m.mode = mode;
  const std::string command = mode == MitigationMode::mitigate ? "mitigate" : "overbias";
  const auto res = mitigate(st.loaded.model, st.dataset, m, solver_config(cfg, seed));

  const auto prefix = need_path(cfg, "output");
  io::save_model(prefix, res.model, st.loaded.initial_input);
  const auto files = io::EmbeddingFiles::from_prefix(prefix);
  // The fine-tuned model keeps the training config so it can be audited again.
  const json train_meta = io::read_meta(io::EmbeddingFiles::from_prefix(need_path(cfg, "model")).input);
  for (const auto& f : {files.input, files.output, files.initial}) {
    json extra = {{"effective_config", train_meta.at("effective_config")}, {"finetune_config", cfg}};
    io::write_meta(f, command, hashed_config(cfg), seed, extra);
  }
  const fs::path traj = has(cfg, "trajectory") ? need_path(cfg, "trajectory") : fs::path(prefix.string() + ".trajectory.csv");
  io::write_text(traj, comment(command, cfg, seed) + io::format_trajectory_csv(res.trajectory));
  out << fmt::format("{}: |A| = {}, |M| = {}, {} iterations kept\n", command, res.sets.amplifying.size(),
                     res.sets.mitigating.size(), res.trajectory.size() - 1);
  out << fmt::format("{} effect {:.6f} -> {:.6f}\n", m.weat.name, res.before.effect, res.after.effect);
  out << "wrote " << files.input.string() << " and " << traj.string() << "\n";
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"mog-gen", "plant-corpus", "train-dec", "train-sg", "influence",
                                              "loo-audit", "weat", "cluster", "mitigate", "overbias"};
  return names;
}

json merge(json base, const json& overrides) {
  if (base.is_null()) base = json::object();
  if (!base.is_object()) throw ConfigError("config file must hold a JSON object");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) base[it.key()] = it.value();
  return base;
}

json hashed_config(const json& config) {
  json out = json::object();
  for (auto it = config.begin(); it != config.end(); ++it) {
    if (kPathKeys.count(it.key()) == 0) out[it.key()] = it.value();
  }
  return out;
}

void run(const std::string& command, const json& config, std::ostream& out) {
  if (command == "mog-gen") return cmd_mog_gen(config, out);
  if (command == "plant-corpus") return cmd_plant_corpus(config, out);
  if (command == "train-dec") return cmd_train_dec(config, out);
  if (command == "train-sg") return cmd_train_sg(config, out);
  if (command == "influence") return cmd_influence(config, out);
  if (command == "loo-audit") return cmd_loo_audit(config, out);
  if (command == "weat") return cmd_weat(config, out);
  if (command == "cluster") return cmd_cluster(config, out);
  if (command == "mitigate") return cmd_mitigate(config, out, MitigationMode::mitigate);
  if (command == "overbias") return cmd_mitigate(config, out, MitigationMode::overbias);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace crossloss::cli
