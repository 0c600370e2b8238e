#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace crossloss {

using WordId = std::uint32_t;

/// One (center, context, negatives) skip-gram tuple.
struct SkipGramSample {
  WordId center = 0;
  WordId context = 0;
  std::vector<WordId> negatives;

  bool operator==(const SkipGramSample&) const = default;
};

/// A whole sentence expanded to its skip-gram tuples. Its loss is the mean
/// over the tuples; a sentence with no tuples contributes zero.
struct SentenceSample {
  std::vector<SkipGramSample> pairs;

  bool operator==(const SentenceSample&) const = default;
};

struct LabeledPoint {
  std::vector<double> x;
  int label = 0;

  bool operator==(const LabeledPoint&) const = default;
};

/// Selects one vocabulary word for per-word test losses.
struct WordTarget {
  WordId word = 0;
};

/// Placeholder sample for objectives that depend on the parameters only.
struct WholeModel {};

using Sample = std::variant<SkipGramSample, SentenceSample, LabeledPoint, WordTarget, WholeModel>;

const char* sample_kind(const Sample& s);

}  // namespace crossloss
