#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "crossloss/errors.hpp"
#include "crossloss/training.hpp"

namespace crossloss {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), id};
  return std::mt19937_64(seq);
}

double mean_tuple_loss(const SkipGramLayout& layout, std::span<const double> params,
                       const std::vector<std::vector<SkipGramSample>>& samples,
                       const std::vector<std::size_t>& docs) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t d : docs) {
    for (const auto& t : samples[d]) {
      acc += sg::tuple_loss(layout, params, t);
      ++n;
    }
  }
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

/// In-place SGD step on one tuple. Output-row gradients are accumulated first
/// so repeated negatives see the pre-step parameters.
void sgd_step(const SkipGramLayout& layout, std::vector<double>& params, const SkipGramSample& t,
              double lr, std::vector<double>& gw, std::vector<std::pair<WordId, double>>& terms) {
  const std::size_t d = layout.dim;
  const double* w = params.data() + layout.input_offset(t.center);
  std::fill(gw.begin(), gw.end(), 0.0);
  terms.clear();
  auto term = [&](WordId u_id, double coef) {
    const double* u = params.data() + layout.output_offset(u_id);
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) dot += w[k] * u[k];
    const double s = sigmoid(dot);
    const double scale = coef * s * (1.0 - s);
    for (std::size_t k = 0; k < d; ++k) gw[k] += scale * u[k];
    terms.emplace_back(u_id, scale);
  };
  const double neg_coef = 0.5 / static_cast<double>(t.negatives.size());
  for (WordId n : t.negatives) term(n, neg_coef);
  term(t.context, -0.5);
  // Output rows first: they need the current input row.
  for (const auto& [u_id, scale] : terms) {
    double* u = params.data() + layout.output_offset(u_id);
    for (std::size_t k = 0; k < d; ++k) u[k] -= lr * scale * w[k];
  }
  double* wm = params.data() + layout.input_offset(t.center);
  for (std::size_t k = 0; k < d; ++k) wm[k] -= lr * gw[k];
}

}  // namespace

void TrainConfig::validate() const {
  if (dim < 2) throw ConfigError("embedding dimension must be at least 2");
  if (window < 1) throw ConfigError("window must be at least 1");
  if (n_neg < 1) throw ConfigError("n_neg must be at least 1");
  if (!(lr_initial > 0.0)) throw ConfigError("initial learning rate must be positive");
  if (lr_floor < 0.0 || lr_floor > lr_initial) throw ConfigError("learning-rate floor must lie in [0, initial]");
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) throw ConfigError("holdout fraction must lie in [0, 1)");
}

TrainConfig TrainConfig::scifi_preset(std::uint64_t seed) {
  TrainConfig c;
  c.dim = 100;
  c.window = 3;
  c.n_neg = 5;
  c.epochs = 100;
  c.seed = seed;
  return c;
}

TrainConfig TrainConfig::wnc_preset(std::uint64_t seed) {
  TrainConfig c;
  c.dim = 100;
  c.window = 10;
  c.n_neg = 10;
  c.epochs = 60;
  c.seed = seed;
  return c;
}

SkipGramTraining prepare_skipgram(const Corpus& corpus, const TrainConfig& cfg) {
  cfg.validate();
  if (corpus.documents.empty() || corpus.num_tokens() == 0) throw ConfigError("train_skipgram: empty corpus");

  SkipGramTraining out;
  out.samples = build_samples(corpus, cfg.sample_config());

  // Held-out documents: a seeded fraction of the corpus.
  std::vector<std::size_t> order(corpus.documents.size());
  std::iota(order.begin(), order.end(), 0);
  auto split_rng = stream(cfg.seed, 1);
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_hold = static_cast<std::size_t>(std::floor(cfg.holdout_fraction * static_cast<double>(order.size())));
  out.heldout_docs.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_hold));
  out.train_docs.assign(order.begin() + static_cast<std::ptrdiff_t>(n_hold), order.end());
  std::sort(out.heldout_docs.begin(), out.heldout_docs.end());
  std::sort(out.train_docs.begin(), out.train_docs.end());
  return out;
}

SkipGramTraining train_skipgram(const Corpus& corpus, const TrainConfig& cfg) {
  SkipGramTraining out = prepare_skipgram(corpus, cfg);

  const SkipGramLayout layout{corpus.vocab.size(), cfg.dim};
  std::vector<double> params(layout.num_params(), 0.0);
  auto init_rng = stream(cfg.seed, 2);
  const double half = 0.5 / static_cast<double>(cfg.dim);
  std::uniform_real_distribution<double> init(-half, half);
  for (std::size_t i = 0; i < layout.table_size(); ++i) params[i] = init(init_rng);
  out.initial_input.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(layout.table_size()));

  std::vector<std::pair<std::size_t, std::size_t>> tuples;  // (doc, index)
  for (std::size_t d : out.train_docs) {
    for (std::size_t i = 0; i < out.samples[d].size(); ++i) tuples.emplace_back(d, i);
  }
  out.heldout_loss.push_back(mean_tuple_loss(layout, params, out.samples, out.heldout_docs));

  const double total_steps = static_cast<double>(tuples.size() * cfg.epochs);
  std::size_t step = 0;
  auto order_rng = stream(cfg.seed, 3);
  std::vector<double> gw(cfg.dim);
  std::vector<std::pair<WordId, double>> terms;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(tuples.begin(), tuples.end(), order_rng);
    for (const auto& [d, i] : tuples) {
      const double progress = static_cast<double>(step++) / total_steps;
      const double lr = std::max(cfg.lr_floor, cfg.lr_initial * (1.0 - progress));
      sgd_step(layout, params, out.samples[d][i], lr, gw, terms);
    }
    const double train_loss = mean_tuple_loss(layout, params, out.samples, out.train_docs);
    if (!std::isfinite(train_loss)) {
      throw DivergenceError("skip-gram training diverged in epoch " + std::to_string(epoch + 1));
    }
    out.heldout_loss.push_back(mean_tuple_loss(layout, params, out.samples, out.heldout_docs));
    spdlog::debug("skip-gram epoch {}: train {:.6f} held-out {:.6f}", epoch + 1, train_loss,
                  out.heldout_loss.back());
  }

  out.model = SkipGramModel::from_params(corpus.vocab, cfg.dim, ParamVector(std::move(params), layout.segments()));
  return out;
}

std::vector<Sample> sentence_dataset(const SkipGramTraining& training) {
  std::vector<Sample> out;
  out.reserve(training.train_docs.size());
  for (std::size_t d : training.train_docs) out.emplace_back(SentenceSample{training.samples[d]});
  return out;
}

}  // namespace crossloss
