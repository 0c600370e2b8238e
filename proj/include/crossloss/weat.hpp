#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "crossloss/objective.hpp"
#include "crossloss/skipgram.hpp"
#include "crossloss/vocabulary.hpp"

namespace crossloss {

/// Target sets X, Y and attribute sets A, B of one association test.
struct WeatSpec {
  std::string name;
  std::vector<std::string> x;
  std::vector<std::string> y;
  std::vector<std::string> a;
  std::vector<std::string> b;

  /// Non-empty lists, X and Y disjoint, A and B disjoint. Warns on duplicates.
  void validate() const;
};

struct WeatResult {
  double effect = 0.0;
  std::map<std::string, double> associations;  // s(w, A, B) for w in X and Y
  double mean_x = 0.0;
  double mean_y = 0.0;
  double pooled_std = 0.0;
  bool degenerate = false;  // pooled_std == 0, effect reported as 0
};

/// Read-only view of an embedding table (one row per vocabulary word).
struct EmbeddingView {
  const Vocabulary& vocab;
  std::size_t dim;
  std::span<const double> table;

  std::span<const double> row(WordId w) const { return table.subspan(w * dim, dim); }
  static EmbeddingView input_of(const SkipGramModel& m) { return {m.vocab, m.dim, m.input_table}; }
};

/// Same spec with every word replaced by its id.
struct WeatIds {
  std::vector<WordId> x, y, a, b;
};

/// Looks every word up. Missing words raise VocabError listing all of them,
/// unless `skip_oov`, which drops them with a warning (an emptied list still fails).
WeatSpec resolve_oov(const WeatSpec& spec, const Vocabulary& vocab, bool skip_oov);
WeatIds to_ids(const WeatSpec& spec, const Vocabulary& vocab);

double cosine(std::span<const double> u, std::span<const double> v);

/// s(w, A, B) = mean_a cos(w, a) - mean_b cos(w, b)
double association(std::string_view word, const std::vector<std::string>& a,
                   const std::vector<std::string>& b, const EmbeddingView& table);

/// (mean_X s - mean_Y s) / population std of s over X and Y.
WeatResult weat_effect(const WeatSpec& spec, const EmbeddingView& table);

/// Single-attribute variant: s'(w, A) = mean_a cos(w, a), standardized the same way.
WeatResult one_sided_weat(const std::vector<std::string>& x, const std::vector<std::string>& y,
                          const std::vector<std::string>& a, const EmbeddingView& table);

struct AbsWeatValue {
  double loss = 0.0;          // |effect|
  double effect = 0.0;
  std::vector<double> grad;   // d|effect| / d table, same shape as the table
  bool degenerate = false;    // effect == 0: gradient set to zero
};

AbsWeatValue abs_weat_loss(const WeatSpec& spec, const EmbeddingView& table);

namespace weat_detail {
double effect(const WeatIds& ids, std::span<const double> table, std::size_t dim,
              bool* degenerate = nullptr);
/// Adds sign(effect) * d effect / d table into out. Returns the effect.
double add_abs_effect_grad(const WeatIds& ids, std::span<const double> table, std::size_t dim,
                           double weight, std::span<double> out);
}  // namespace weat_detail

/// |WEAT effect| as a test loss over a skip-gram ParamVector. Reads and
/// differentiates the input table only. Evaluated on a WholeModel sample.
class AbsWeatObjective final : public Objective {
 public:
  AbsWeatObjective(SkipGramLayout layout, WeatIds ids) : layout_(layout), ids_(std::move(ids)) {}

  std::string_view name() const override { return "weat"; }
  std::size_t num_params() const override { return layout_.num_params(); }

 protected:
  double sample_loss(const ParamVector& p, const Sample& s) const override;
  void add_sample_grad(const ParamVector& p, const Sample& s, double w,
                       std::span<double> out) const override;

 private:
  SkipGramLayout layout_;
  WeatIds ids_;
};

}  // namespace crossloss
