#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "crossloss/data.hpp"
#include "crossloss/errors.hpp"
#include "crossloss/kmeans.hpp"
#include "crossloss/training.hpp"
#include "fixtures.hpp"

using namespace crossloss;

namespace {

// Planted corpus and model shared by the skip-gram and mitigation tests.
struct Planted {
  WeatSpec spec = fixtures::career_spec();
  Corpus corpus;
  TrainConfig cfg;
  SkipGramTraining run;
  std::vector<Sample> dataset;

  Planted() {
    corpus = tokenize(plant_biased_corpus(fixtures::planted_config(spec, 1.0, 5000, 2)), {});
    cfg.dim = 16;
    cfg.epochs = 6;
    cfg.seed = 21;
    run = train_skipgram(corpus, cfg);
    dataset = sentence_dataset(run);
  }
};

const Planted& planted() {
  static const Planted p;
  return p;
}

std::vector<double> blobs(std::mt19937_64& rng, const std::vector<std::vector<double>>& centers, std::size_t per,
                          double spread) {
  std::normal_distribution<double> g(0.0, spread);
  std::vector<double> out;
  for (const auto& c : centers)
    for (std::size_t i = 0; i < per; ++i)
      for (double m : c) out.push_back(m + g(rng));
  return out;
}

SolverConfig lissa(std::uint64_t seed) {
  SolverConfig s;
  s.lissa.seed = seed;
  return s;
}

}  // namespace

TEST(SkipGramTraining, PlantedCorpusLearnsTheBias) {
  const auto& p = planted();
  EXPECT_GT(std::abs(weat_effect(p.spec, EmbeddingView::input_of(p.run.model)).effect), 0.5);
}

TEST(SkipGramTraining, HeldOutLossDecreases) {
  const auto& h = planted().run.heldout_loss;
  ASSERT_EQ(h.size(), planted().cfg.epochs + 1);
  EXPECT_LT(h.back(), h[1]);
  EXPECT_FALSE(planted().run.heldout_docs.empty());
}

TEST(SkipGramTraining, ZeroEpochsIsTheInitialization) {
  const auto& p = planted();
  TrainConfig c = p.cfg;
  c.epochs = 0;
  const auto zero = train_skipgram(p.corpus, c);
  EXPECT_EQ(zero.model.input_table, zero.initial_input);
  EXPECT_EQ(zero.model.input_table, p.run.initial_input);
  for (double v : zero.model.output_table) EXPECT_EQ(v, 0.0);
  for (double v : zero.initial_input) EXPECT_LE(std::abs(v), 0.5 / 16);
  c.epochs = 1;
  EXPECT_NE(train_skipgram(p.corpus, c).model.input_table, zero.model.input_table);
}

TEST(SkipGramTraining, SameSeedIsBitIdentical) {
  const auto& p = planted();
  TrainConfig c = p.cfg;
  c.epochs = 2;
  const auto a = train_skipgram(p.corpus, c), b = train_skipgram(p.corpus, c);
  EXPECT_EQ(a.model.input_table, b.model.input_table);
  EXPECT_EQ(a.model.output_table, b.model.output_table);
  EXPECT_EQ(a.heldout_loss, b.heldout_loss);
}

TEST(SkipGramTraining, PrepareMatchesTrainingSplit) {
  const auto& p = planted();
  const auto prepared = prepare_skipgram(p.corpus, p.cfg);
  EXPECT_EQ(prepared.train_docs, p.run.train_docs);
  EXPECT_EQ(prepared.heldout_docs, p.run.heldout_docs);
  EXPECT_EQ(prepared.samples, p.run.samples);
  EXPECT_EQ(sentence_dataset(prepared).size(), p.dataset.size());
}

TEST(SkipGramTraining, InvalidConfig) {
  TrainConfig c;
  c.dim = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.lr_initial = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Dec, MogDefaultsClassifyWell) {
  MogConfig m;
  m.seed = 8;
  const auto pts = generate_mog(m);
  DecConfig cfg;
  cfg.seed = 4;
  const auto t = train_dec(pts, 3, cfg);
  EXPECT_GE(t.accuracy, 0.9);
  EXPECT_GE(t.accuracy, t.kmeans_accuracy - 0.05);
}

TEST(Dec, SeparatedLocationsAreAFixedPoint) {
  std::vector<LabeledPoint> pts;
  const std::vector<std::vector<double>> loc{{0, 0}, {100, 0}, {0, 100}};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 5; ++i) pts.push_back({loc[static_cast<std::size_t>(c)], c});
  DecConfig cfg;
  cfg.seed = 1;
  const auto t = train_dec(pts, 3, cfg);
  EXPECT_DOUBLE_EQ(t.accuracy, 1.0);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto c = t.run.model.centroid(j);
    double best = 1e300;
    for (const auto& l : loc) best = std::min(best, std::hypot(c[0] - l[0], c[1] - l[1]));
    EXPECT_LT(best, 1e-4 * 100);  // heavy tails leave a residual pull of order 1e-5 of the spacing
  }
}

TEST(Dec, SameSeedIsBitIdentical) {
  MogConfig m;
  m.per_class = 10;
  m.seed = 2;
  const auto pts = generate_mog(m);
  DecConfig cfg;
  cfg.seed = 5;
  cfg.outer_iterations = 4;
  EXPECT_EQ(train_dec(pts, 3, cfg).run.model.centroids, train_dec(pts, 3, cfg).run.model.centroids);
  cfg.mode = DecMode::minibatch;
  EXPECT_EQ(train_dec(pts, 3, cfg).run.model.centroids, train_dec(pts, 3, cfg).run.model.centroids);
}

TEST(Dec, FullBatchKlDecreasesWithinAPhase) {
  MogConfig m;
  m.per_class = 15;
  m.seed = 3;
  const auto pts = generate_mog(m);
  DecConfig cfg;
  cfg.seed = 6;
  const auto t = train_dec(pts, 3, cfg);
  cfg.outer_iterations = 1;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t steps = 1; steps <= 30; ++steps) {
    cfg.inner_steps = steps;
    const double kl = refine_dec(pts, t.init, cfg).kl_history.at(0);
    EXPECT_LE(kl, previous) << steps;
    previous = kl;
  }
}

TEST(KMeans, TwoFarBlobsHaveHighSilhouette) {
  std::mt19937_64 rng(1);
  const auto pts = blobs(rng, {{0, 0}, {50, 50}}, 30, 1.0);
  const auto km = kmeans(pts, 2, 2, 3);
  EXPECT_GT(silhouette(pts, 2, km.assignments), 0.9);
  EXPECT_LE(km.iterations, 300u);
}

TEST(KMeans, DegenerateSilhouettes) {
  const std::vector<double> pts{0, 0, 1, 1, 2, 2};
  const std::vector<int> singletons{0, 1, 2};
  EXPECT_THROW(silhouette(pts, 2, singletons), DegenerateError);
  const std::vector<double> same{1, 1, 1, 1, 1, 1};
  const std::vector<int> two{0, 0, 1};
  EXPECT_THROW(silhouette(same, 2, two), DegenerateError);
}

TEST(KMeans, UniformDataHasWeakStructure) {
  std::mt19937_64 rng(2);
  const auto pts = fixtures::uniform_vec(rng, 300 * 50, 0.0, 1.0);
  const auto km = kmeans(pts, 50, 5, 4);
  EXPECT_LT(std::abs(silhouette(pts, 50, km.assignments)), 0.2);
}

TEST(KMeans, SelectClustersFindsThreeBlobs) {
  std::mt19937_64 rng(3);
  const auto pts = blobs(rng, {{0, 0}, {20, 0}, {10, 17}}, 25, 1.0);
  const auto sel = select_clusters(pts, 2, 2, 10, 5);
  EXPECT_EQ(sel.best, 3u);
  EXPECT_EQ(sel.scores.size(), 9u);
  const auto one = select_clusters(pts, 2, 4, 4, 5);
  EXPECT_EQ(one.best, 4u);
  EXPECT_THROW(select_clusters(pts, 2, 1, 3, 5), ConfigError);
}

TEST(KMeans, BestBijectionIsExhaustive) {
  const std::vector<int> assign{0, 0, 1, 1, 2, 2, 2};
  const std::vector<int> labels{2, 2, 0, 0, 1, 1, 0};
  const auto b = best_bijection(assign, labels, 3);
  EXPECT_EQ(b.class_map, (ClassMap{2, 0, 1}));
  EXPECT_NEAR(b.accuracy, 6.0 / 7.0, 1e-15);
}

TEST(Finetune, ZeroStepsIsIdentity) {
  const auto& p = planted();
  const SkipGramObjective obj(p.run.model.layout());
  const auto start = p.run.model.to_params();
  const std::vector<std::size_t> ids{0, 1, 2};
  EXPECT_EQ(finetune(obj, start, p.dataset, ids, FinetuneMode::reverse, 0, 0.5).raw(), start.raw());
}

TEST(Finetune, DescentAndAscentOnOneSample) {
  const auto& p = planted();
  const SkipGramObjective obj(p.run.model.layout());
  const auto start = p.run.model.to_params();
  for (std::size_t id : {0ul, 7ul, 42ul}) {
    const std::vector<std::size_t> ids{id};
    const auto one = p.dataset.begin() + static_cast<std::ptrdiff_t>(id);
    const std::span<const Sample> sample(&*one, 1);
    const double before = obj.loss(start, sample);
    EXPECT_LT(obj.loss(finetune(obj, start, p.dataset, ids, FinetuneMode::reinforce, 1, 0.01), sample), before);
    EXPECT_GT(obj.loss(finetune(obj, start, p.dataset, ids, FinetuneMode::reverse, 1, 0.01), sample), before);
  }
}

TEST(Finetune, ReverseThenReinforceCancelsToSecondOrder) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = fixtures::random_skipgram(rng, 12, 5, 0.5);
    const SkipGramObjective obj(m.layout());
    std::vector<Sample> data;
    SentenceSample s;
    for (int i = 0; i < 4; ++i) s.pairs.push_back(fixtures::random_tuple(rng, 12, 3));
    data.emplace_back(s);
    const std::vector<std::size_t> ids{0};
    const double lr = 0.01;
    const auto start = m.to_params();
    const double g2 = std::pow(obj.grad(start, data).norm(), 2);
    const auto there = finetune(obj, start, data, ids, FinetuneMode::reverse, 1, lr);
    const auto back = finetune(obj, there, data, ids, FinetuneMode::reinforce, 1, lr);
    EXPECT_LT((back - start).norm(), 10 * lr * lr * g2);
  }
}

TEST(Finetune, BadIdIsRejected) {
  const auto& p = planted();
  const SkipGramObjective obj(p.run.model.layout());
  const std::vector<std::size_t> ids{p.dataset.size()};
  EXPECT_THROW(finetune(obj, p.run.model.to_params(), p.dataset, ids, FinetuneMode::reinforce, 1, 0.01),
               ConfigError);
}

TEST(Mitigation, EmptySetsOrZeroStepsLeaveTheModelUnchanged) {
  const auto& p = planted();
  MitigationConfig mc;
  mc.weat = p.spec;
  mc.steps = 0;
  const auto a = mitigate(p.run.model, p.dataset, mc, lissa(1));
  EXPECT_EQ(a.model.input_table, p.run.model.input_table);
  mc.steps = 5;
  mc.k_amplifying = 0;
  mc.k_mitigating = 0;
  const auto b = mitigate(p.run.model, p.dataset, mc, lissa(1));
  EXPECT_EQ(b.model.input_table, p.run.model.input_table);
  EXPECT_NEAR(b.after.effect, b.before.effect, 0.0);
}

TEST(Mitigation, MitigateShrinksAndOverbiasGrowsTheEffect) {
  const auto& p = planted();
  MitigationConfig mc;
  mc.weat = p.spec;
  mc.steps = 200;
  mc.finetune_lr = 0.5;
  const auto down = mitigate(p.run.model, p.dataset, mc, lissa(3));
  EXPECT_LE(std::abs(down.after.effect), 0.5 * std::abs(down.before.effect));
  ASSERT_FALSE(down.trajectory.empty());
  EXPECT_EQ(down.trajectory.front().iteration, 0u);
  EXPECT_DOUBLE_EQ(down.trajectory.front().effect, down.before.effect);
  EXPECT_EQ(down.sets.amplifying.size(), 50u);
  EXPECT_EQ(down.sets.mitigating.size(), 50u);

  mc.mode = MitigationMode::overbias;
  const auto up = mitigate(p.run.model, p.dataset, mc, lissa(3));
  EXPECT_GT(std::abs(up.after.effect), std::abs(up.before.effect));
}
