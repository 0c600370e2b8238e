#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crossloss/cluster_model.hpp"
#include "crossloss/data.hpp"
#include "crossloss/influence.hpp"
#include "crossloss/skipgram.hpp"
#include "crossloss/weat.hpp"

namespace crossloss {

inline constexpr std::size_t kNoExclusion = static_cast<std::size_t>(-1);

// ---------------------------------------------------------------------------
// Skip-gram

struct TrainConfig {
  std::size_t dim = 100;
  std::size_t window = 3;
  std::size_t n_neg = 5;
  std::size_t epochs = 100;
  double lr_initial = 0.025;
  double lr_floor = 1e-4;
  double holdout_fraction = 0.05;
  double unigram_power = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  SampleConfig sample_config() const { return {window, n_neg, unigram_power, seed}; }

  /// Plot-summary preset: window 3, 5 negatives, dim 100, 100 epochs.
  static TrainConfig scifi_preset(std::uint64_t seed);
  /// Edit-corpus preset: window 10, 10 negatives, dim 100, 60 epochs.
  static TrainConfig wnc_preset(std::uint64_t seed);
};

struct SkipGramTraining {
  SkipGramModel model;
  std::vector<double> initial_input;                   // input table right after initialization
  std::vector<std::vector<SkipGramSample>> samples;    // per document, fixed negatives
  std::vector<std::size_t> train_docs;                 // documents used for training, ascending
  std::vector<std::size_t> heldout_docs;               // documents held out, ascending
  std::vector<double> heldout_loss;                    // [0] before training, then per epoch
};

/// Samples and held-out split exactly as train_skipgram builds them, without
/// training (model and histories left empty).
SkipGramTraining prepare_skipgram(const Corpus& corpus, const TrainConfig& cfg);

/// Plain SGD over the fixed tuple set with linear learning-rate decay.
/// Tuple order is reshuffled every epoch from the seeded stream.
SkipGramTraining train_skipgram(const Corpus& corpus, const TrainConfig& cfg);

/// Training documents as influence samples (one SentenceSample per document).
std::vector<Sample> sentence_dataset(const SkipGramTraining& training);

// ---------------------------------------------------------------------------
// DEC

enum class DecMode { full_batch, minibatch };

struct DecConfig {
  std::size_t outer_iterations = 40;  // target re-estimations
  std::size_t inner_steps = 250;      // gradient steps (full batch) or epochs (minibatch) per target
  double lr = 1.0;
  DecMode mode = DecMode::full_batch;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DecRun {
  ClusterModel model;
  DecTarget target;               // target the final inner phase minimized against
  std::vector<double> kl_history; // loss after every inner phase
};

/// Alternates: freeze P from the current model over the retained points,
/// then minimize mean KL(P || Q). The point `excluded` is skipped everywhere,
/// including the minibatch order (which is drawn for the full set first).
DecRun refine_dec(std::span<const LabeledPoint> points, const ClusterModel& init, const DecConfig& cfg,
                  std::size_t excluded = kNoExclusion);

struct DecTraining {
  ClusterModel init;
  DecRun run;
  ClassMap class_map;
  double accuracy = 0.0;
  double kmeans_accuracy = 0.0;
};

/// k-means initialization followed by refine_dec, then the cluster -> class
/// bijection under the known labels.
DecTraining train_dec(std::span<const LabeledPoint> points, std::size_t k, const DecConfig& cfg);

/// Supervised baseline: full-batch gradient descent on the mean NLL,
/// outer_iterations * inner_steps steps from `init`.
ClusterModel train_nll(std::span<const LabeledPoint> points, const ClusterModel& init,
                       const ClassMap& class_map, const DecConfig& cfg,
                       std::size_t excluded = kNoExclusion);

// ---------------------------------------------------------------------------
// Fine-tuning and mitigation

enum class FinetuneMode { reinforce, reverse };

/// Each step sweeps the listed sentences in order, one gradient update per
/// sentence: descent for reinforce, ascent for reverse. steps == 0 is a no-op.
ParamVector finetune(const SkipGramObjective& objective, ParamVector params,
                     std::span<const Sample> dataset, std::span<const std::size_t> sample_ids,
                     FinetuneMode mode, std::size_t steps, double lr);

enum class MitigationMode { mitigate, overbias };

struct MitigationConfig {
  WeatSpec weat;
  std::size_t k_amplifying = 50;
  std::size_t k_mitigating = 50;
  std::size_t steps = 100;
  double finetune_lr = 0.01;
  MitigationMode mode = MitigationMode::mitigate;
  /// Stop at the first iteration that fails to move |effect| in the wanted direction
  /// and keep the model from before it.
  bool early_stop = true;
};

struct TrajectoryPoint {
  std::size_t iteration = 0;
  double effect = 0.0;
};

struct MitigationResult {
  SkipGramModel model;
  WeatResult before;
  WeatResult after;
  std::vector<TrajectoryPoint> trajectory;  // iteration 0 is the starting model
  std::vector<InfluenceRecord> scores;      // indexed like the dataset
  InfluenceSets sets;
};

/// Scores every sentence against |WEAT|, splits off A and M, then fine-tunes:
/// mitigate reverses A and reinforces M; overbias reverses M and reinforces A.
MitigationResult mitigate(const SkipGramModel& model, std::span<const Sample> dataset,
                          const MitigationConfig& mcfg, const SolverConfig& solver);

}  // namespace crossloss
