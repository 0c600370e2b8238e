#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crossloss/samples.hpp"
#include "crossloss/vocabulary.hpp"

namespace crossloss {

// ---------------------------------------------------------------------------
// Mixture of Gaussians

struct MogConfig {
  std::vector<std::vector<double>> class_means{{0.0, 0.0}, {4.0, 0.0}, {2.0, 3.5}};
  double sigma = 0.75;
  std::size_t per_class = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

/// per_class isotropic Gaussian points around each mean, grouped by class.
std::vector<LabeledPoint> generate_mog(const MogConfig& cfg);

// ---------------------------------------------------------------------------
// Corpora

/// Replacement token for numerals.
inline constexpr const char* kNumberToken = "\xE2\x9F\xA8NUM\xE2\x9F\xA9";  // ⟨NUM⟩

struct TokenizerConfig {
  bool lowercase = true;
  std::set<std::string> stopwords;
  std::size_t min_count = 1;
  /// When set, exactly these words are kept (stopwords and min_count ignored).
  std::optional<std::vector<std::string>> preset_vocab;
  std::string number_token = kNumberToken;

  void validate() const;
};

/// Small fixed English stopword list.
const std::set<std::string>& builtin_stopwords();

struct Corpus {
  std::vector<std::vector<WordId>> documents;
  std::vector<std::string> texts;  // original line per document
  Vocabulary vocab;
  std::vector<std::size_t> freq;   // occurrences per word id

  std::size_t num_tokens() const;
};

/// Splits a line into raw word tokens: runs of ASCII alphanumerics or
/// non-ASCII bytes. Digit-only runs become the number token; the number
/// token itself passes through untouched.
std::vector<std::string> split_words(const std::string& line, const TokenizerConfig& cfg);

/// Frequency mode: lowercase, split, numerals -> number token, drop
/// stopwords, drop words seen fewer than min_count times.
/// Preset mode: keep exactly the preset vocabulary.
/// Vocabulary ids follow first appearance (preset order in preset mode).
/// Documents that lose every token stay in place as empty documents.
Corpus tokenize(const std::vector<std::string>& raw_documents, const TokenizerConfig& cfg);

struct SampleConfig {
  std::size_t window = 3;
  std::size_t n_neg = 5;
  /// Exponent applied to unigram counts for negative sampling.
  double unigram_power = 1.0;
  std::uint64_t seed = 0;
};

/// One list of skip-gram tuples per document. For each position, one tuple
/// per context word within +-window inside the document; negatives drawn from
/// the unigram distribution and redrawn while equal to the center or context.
/// Each document draws from its own stream seeded by (seed, document index).
std::vector<std::vector<SkipGramSample>> build_samples(const Corpus& corpus, const SampleConfig& cfg);

// ---------------------------------------------------------------------------
// Planted-bias corpora

struct PlantedGroup {
  std::vector<std::string> targets;
  std::vector<std::string> attributes;
};

struct PlantConfig {
  std::vector<PlantedGroup> groups;
  double strength = 1.0;  // probability a target co-occurs with its own group's attributes
  std::size_t size = 0;   // sentences
  std::size_t filler_vocab = 168;
  std::size_t min_filler = 5;
  std::size_t max_filler = 9;
  /// Filler words reserved per attribute group as that group's topic words.
  std::size_t topic_words = 12;
  /// Probability that a filler slot takes a topic word of the sentence's attribute group.
  double topic_rate = 0.2;
  /// Target i of a group (0-based) is drawn with weight (i + 1)^-target_zipf.
  double target_zipf = 0.0;
  /// Target i of n in a group appears with an attribute in a fraction
  /// 1 - (1 - min_exposure) * i / (n - 1) of its sentences; the rest are neutral filler.
  double min_exposure = 0.0;
  std::uint64_t seed = 0;
};

/// Template sentences: filler words with one target word and one attribute
/// word placed next to each other. With probability `strength` the attribute
/// comes from the target's own group, otherwise from a different group.
/// Targets differ in how often their sentences carry an attribute at all
/// (see min_exposure). Filler slots of attribute sentences draw from the attribute group's topic words at `topic_rate`,
/// so a target shares contexts with the attributes it is paired with.
std::vector<std::string> plant_biased_corpus(const PlantConfig& cfg);

/// Deterministic pronounceable filler words ("bako", "tefu", ...).
std::vector<std::string> filler_words(std::size_t count);

}  // namespace crossloss
