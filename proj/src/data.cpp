#include "crossloss/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <unordered_map>

#include "crossloss/errors.hpp"
#include "crossloss/kernels.hpp"

namespace crossloss {

namespace {

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

void MogConfig::validate() const {
  if (class_means.size() < 2) throw ConfigError("MOG needs at least two classes");
  if (!(sigma > 0.0)) throw ConfigError("MOG sigma must be positive");
  const std::size_t d = class_means.front().size();
  if (d == 0) throw ConfigError("MOG means must have at least one dimension");
  for (const auto& m : class_means) {
    if (m.size() != d) throw ConfigError("MOG means have inconsistent dimensions");
  }
}

std::vector<LabeledPoint> generate_mog(const MogConfig& cfg) {
  cfg.validate();
  auto rng = seeded(cfg.seed, 0);
  std::normal_distribution<double> noise(0.0, cfg.sigma);
  std::vector<LabeledPoint> points;
  points.reserve(cfg.class_means.size() * cfg.per_class);
  for (std::size_t c = 0; c < cfg.class_means.size(); ++c) {
    for (std::size_t i = 0; i < cfg.per_class; ++i) {
      LabeledPoint p{cfg.class_means[c], static_cast<int>(c)};
      for (double& v : p.x) v += noise(rng);
      points.push_back(std::move(p));
    }
  }
  return points;
}

void TokenizerConfig::validate() const {
  if (min_count < 1) throw ConfigError("min_count must be at least 1");
  if (number_token.empty()) throw ConfigError("number token must be non-empty");
}

const std::set<std::string>& builtin_stopwords() {
  static const std::set<std::string> words{
      "a",      "about", "above",  "after", "again", "against", "all",    "am",    "an",
      "and",    "any",   "are",    "as",    "at",    "be",      "because", "been", "before",
      "being",  "below", "between", "both", "but",   "by",      "can",    "could", "did",
      "do",     "does",  "doing",  "down",  "during", "each",   "few",    "for",   "from",
      "further", "had",  "has",    "have",  "having", "her",    "here",   "hers",  "herself",
      "him",    "himself", "his",  "how",   "i",     "if",      "in",     "into",  "is",
      "it",     "its",   "itself", "just",  "me",    "more",    "most",   "my",    "myself",
      "no",     "nor",   "not",    "now",   "of",    "off",     "on",     "once",  "only",
      "or",     "other", "our",    "ours",  "ourselves", "out", "over",   "own",   "same",
      "she",    "should", "so",    "some",  "such",  "than",    "that",   "the",   "their",
      "theirs", "them",  "themselves", "then", "there", "these", "they",  "this",  "those",
      "through", "to",   "too",    "under", "until", "up",      "very",   "was",   "we",
      "were",   "what",  "when",   "where", "which", "while",   "who",    "whom",  "why",
      "will",   "with",  "would",  "you",   "your",  "yours",   "yourself", "yourselves", "he"};
  return words;
}

std::size_t Corpus::num_tokens() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.size();
  return n;
}

std::vector<std::string> split_words(const std::string& line, const TokenizerConfig& cfg) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (!is_word_byte(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && is_word_byte(static_cast<unsigned char>(line[j]))) ++j;
    std::string tok = line.substr(i, j - i);
    i = j;
    if (tok == cfg.number_token) {
      out.push_back(std::move(tok));
      continue;
    }
    if (std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
      out.push_back(cfg.number_token);
      continue;
    }
    out.push_back(cfg.lowercase ? lower(std::move(tok)) : std::move(tok));
  }
  return out;
}

Corpus tokenize(const std::vector<std::string>& raw_documents, const TokenizerConfig& cfg) {
  cfg.validate();
  if (raw_documents.empty()) throw ConfigError("tokenize: no documents");
  std::vector<std::vector<std::string>> split;
  split.reserve(raw_documents.size());
  for (const auto& line : raw_documents) split.push_back(split_words(line, cfg));

  Corpus corpus;
  corpus.texts = raw_documents;
  if (cfg.preset_vocab) {
    for (const auto& w : *cfg.preset_vocab) corpus.vocab.add(cfg.lowercase ? lower(w) : w);
  } else {
    std::unordered_map<std::string, std::size_t> counts;
    std::vector<std::string> order;
    for (const auto& doc : split) {
      for (const auto& w : doc) {
        if (cfg.stopwords.count(w) != 0) continue;
        if (counts[w]++ == 0) order.push_back(w);
      }
    }
    for (const auto& w : order) {
      if (counts[w] >= cfg.min_count) corpus.vocab.add(w);
    }
  }
  if (corpus.vocab.size() == 0) throw ConfigError("tokenize: resulting vocabulary is empty");

  corpus.freq.assign(corpus.vocab.size(), 0);
  corpus.documents.reserve(split.size());
  for (const auto& doc : split) {
    std::vector<WordId> ids;
    for (const auto& w : doc) {
      if (!cfg.preset_vocab && cfg.stopwords.count(w) != 0) continue;
      if (auto id = corpus.vocab.find(w)) {
        ids.push_back(*id);
        ++corpus.freq[*id];
      }
    }
    corpus.documents.push_back(std::move(ids));
  }
  return corpus;
}

std::vector<std::vector<SkipGramSample>> build_samples(const Corpus& corpus, const SampleConfig& cfg) {
  if (cfg.window < 1) throw ConfigError("window must be at least 1");
  if (cfg.n_neg < 1) throw ConfigError("n_neg must be at least 1");
  std::vector<double> weights(corpus.freq.size());
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = corpus.freq[i] == 0 ? 0.0 : std::pow(static_cast<double>(corpus.freq[i]), cfg.unigram_power);
    nonzero += corpus.freq[i] != 0;
  }
  if (nonzero < 3) throw ConfigError("negative sampling needs at least three observed words");

  std::vector<std::vector<SkipGramSample>> out(corpus.documents.size());
  kernels::parallel_for(corpus.documents.size(), [&](std::size_t d) {
    const auto& doc = corpus.documents[d];
    auto rng = seeded(cfg.seed, d);
    std::discrete_distribution<std::size_t> unigram(weights.begin(), weights.end());
    auto& samples = out[d];
    const auto n = static_cast<std::ptrdiff_t>(doc.size());
    const auto w = static_cast<std::ptrdiff_t>(cfg.window);
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      for (std::ptrdiff_t c = std::max<std::ptrdiff_t>(0, j - w); c <= std::min(n - 1, j + w); ++c) {
        if (c == j) continue;
        SkipGramSample s{doc[static_cast<std::size_t>(j)], doc[static_cast<std::size_t>(c)], {}};
        s.negatives.reserve(cfg.n_neg);
        while (s.negatives.size() < cfg.n_neg) {
          const auto neg = static_cast<WordId>(unigram(rng));
          if (neg != s.center && neg != s.context) s.negatives.push_back(neg);
        }
        samples.push_back(std::move(s));
      }
    }
  });
  return out;
}

std::vector<std::string> filler_words(std::size_t count) {
  static const std::string consonants = "bdfgklmnprstvz";
  static const std::string vowels = "aeiou";
  std::vector<std::string> syllables;
  for (char c : consonants) {
    for (char v : vowels) syllables.push_back(std::string{c, v});
  }
  const std::size_t ns = syllables.size();
  if (count > ns * ns) throw ConfigError("at most " + std::to_string(ns * ns) + " filler words");
  std::vector<std::string> words;
  words.reserve(count);
  // Stride through the syllable grid so consecutive words look different.
  for (std::size_t i = 0; words.size() < count; ++i) {
    const std::size_t k = (i * 37) % (ns * ns);
    words.push_back(syllables[k / ns] + syllables[k % ns]);
  }
  return words;
}

std::vector<std::string> plant_biased_corpus(const PlantConfig& cfg) {
  if (cfg.strength < 0.0 || cfg.strength > 1.0) throw ConfigError("strength must lie in [0, 1]");
  if (cfg.size == 0) throw ConfigError("planted corpus size must be positive");
  if (cfg.groups.size() < 2) throw ConfigError("planted corpus needs at least two groups");
  if (cfg.min_filler > cfg.max_filler) throw ConfigError("min_filler exceeds max_filler");
  if (cfg.target_zipf < 0.0) throw ConfigError("target_zipf must be non-negative");
  if (cfg.min_exposure < 0.0 || cfg.min_exposure > 1.0) throw ConfigError("min_exposure must lie in [0, 1]");
  if (cfg.topic_rate < 0.0 || cfg.topic_rate > 1.0) throw ConfigError("topic_rate must lie in [0, 1]");
  if (cfg.topic_words * cfg.groups.size() >= cfg.filler_vocab)
    throw ConfigError("topic words leave no common filler vocabulary");
  std::set<std::string> reserved;
  for (const auto& g : cfg.groups) {
    if (g.targets.empty() || g.attributes.empty()) throw ConfigError("planted group has an empty list");
    reserved.insert(g.targets.begin(), g.targets.end());
    reserved.insert(g.attributes.begin(), g.attributes.end());
  }
  std::vector<std::string> fillers;
  for (auto& w : filler_words(cfg.filler_vocab + reserved.size())) {
    if (fillers.size() == cfg.filler_vocab) break;
    if (reserved.count(w) == 0) fillers.push_back(std::move(w));
  }
  // The first topic_words * groups fillers are split into per-group topic pools.
  const std::size_t n_topic = cfg.topic_words * cfg.groups.size();
  const std::vector<std::string> common(fillers.begin() + static_cast<std::ptrdiff_t>(n_topic), fillers.end());
  auto topic_word = [&](std::size_t group, std::size_t i) -> const std::string& {
    return fillers[group * cfg.topic_words + i];
  };

  auto rng = seeded(cfg.seed, 0);
  auto uniform = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::bernoulli_distribution own_group(cfg.strength);
  std::bernoulli_distribution topical(cfg.topic_rate);
  std::vector<std::discrete_distribution<std::size_t>> target_dist;
  for (const auto& g : cfg.groups) {
    std::vector<double> w(g.targets.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(static_cast<double>(i + 1), -cfg.target_zipf);
    target_dist.emplace_back(w.begin(), w.end());
  }
  std::vector<std::string> docs;
  docs.reserve(cfg.size);
  for (std::size_t s = 0; s < cfg.size; ++s) {
    const std::size_t g = uniform(cfg.groups.size());
    const auto& group = cfg.groups[g];
    const std::size_t ti = target_dist[g](rng);
    const std::string& target = group.targets[ti];
    const double exposure =
        group.targets.size() < 2
            ? 1.0
            : 1.0 - (1.0 - cfg.min_exposure) * static_cast<double>(ti) / static_cast<double>(group.targets.size() - 1);
    const bool with_attribute = std::bernoulli_distribution(exposure)(rng);

    std::size_t ag = g;
    if (!own_group(rng)) {
      ag = uniform(cfg.groups.size() - 1);
      if (ag >= g) ++ag;
    }
    const auto& attrs = cfg.groups[ag].attributes;
    const std::string& attribute = attrs[uniform(attrs.size())];

    const std::size_t n_fill = cfg.min_filler + uniform(cfg.max_filler - cfg.min_filler + 1);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n_fill; ++i) {
      if (with_attribute && cfg.topic_words > 0 && topical(rng)) {
        words.push_back(topic_word(ag, uniform(cfg.topic_words)));
      } else {
        words.push_back(common[uniform(common.size())]);
      }
    }
    const std::size_t at = uniform(n_fill + 1);
    if (with_attribute) {
      const bool target_first = uniform(2) == 0;
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), target_first ? attribute : target);
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), target_first ? target : attribute);
    } else {
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), target);
    }

    std::string line;
    for (const auto& w : words) line += (line.empty() ? "" : " ") + w;
    line += ".";
    docs.push_back(std::move(line));
  }
  return docs;
}

}  // namespace crossloss
