#pragma once

#include <random>
#include <vector>

#include "crossloss/cluster_model.hpp"
#include "crossloss/data.hpp"
#include "crossloss/skipgram.hpp"
#include "crossloss/weat.hpp"

namespace fixtures {

using namespace crossloss;

inline std::vector<double> uniform_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline Vocabulary numbered_vocab(std::size_t n) {
  Vocabulary v;
  for (std::size_t i = 0; i < n; ++i) v.add("w" + std::to_string(i));
  return v;
}

inline SkipGramModel random_skipgram(std::mt19937_64& rng, std::size_t vocab, std::size_t dim, double scale = 1.0) {
  SkipGramModel m;
  m.vocab = numbered_vocab(vocab);
  m.dim = dim;
  m.input_table = uniform_vec(rng, vocab * dim, -scale, scale);
  m.output_table = uniform_vec(rng, vocab * dim, -scale, scale);
  return m;
}

inline SkipGramSample random_tuple(std::mt19937_64& rng, std::size_t vocab, std::size_t n_neg) {
  std::uniform_int_distribution<WordId> w(0, static_cast<WordId>(vocab - 1));
  SkipGramSample s{w(rng), w(rng), {}};
  for (std::size_t i = 0; i < n_neg; ++i) s.negatives.push_back(w(rng));
  return s;
}

inline std::vector<LabeledPoint> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim, int classes) {
  std::vector<LabeledPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({uniform_vec(rng, dim, -3.0, 3.0), static_cast<int>(i % static_cast<std::size_t>(classes))});
  }
  return pts;
}

inline ClusterModel random_clusters(std::mt19937_64& rng, std::size_t k, std::size_t dim) {
  return {k, dim, uniform_vec(rng, k * dim, -3.0, 3.0)};
}

/// The career/family groups used for planted-bias corpora.
inline WeatSpec career_spec() {
  return {"career",
          {"john", "paul", "mike", "kevin", "steve", "greg", "jeff", "bill"},
          {"amy", "joan", "lisa", "sarah", "diana", "kate", "ann", "donna"},
          {"executive", "management", "professional", "corporation", "salary", "office", "business", "career"},
          {"home", "parents", "children", "family", "cousins", "marriage", "wedding", "relatives"}};
}

inline PlantConfig planted_config(const WeatSpec& spec, double strength, std::size_t size, std::uint64_t seed) {
  PlantConfig p;
  p.groups = {{spec.x, spec.a}, {spec.y, spec.b}};
  p.strength = strength;
  p.size = size;
  p.seed = seed;
  return p;
}

}  // namespace fixtures
