#pragma once

#include <span>
#include <vector>

#include "crossloss/objective.hpp"
#include "crossloss/vocabulary.hpp"

namespace crossloss {

/// Shape of the two skip-gram tables inside a ParamVector: the input table
/// (the embeddings) first, then the output (context) table, both row-major.
struct SkipGramLayout {
  std::size_t vocab_size = 0;
  std::size_t dim = 0;

  std::size_t table_size() const noexcept { return vocab_size * dim; }
  std::size_t num_params() const noexcept { return 2 * table_size(); }
  std::size_t input_offset(WordId w) const noexcept { return w * dim; }
  std::size_t output_offset(WordId w) const noexcept { return table_size() + w * dim; }
  std::vector<Segment> segments() const {
    return {{"input_table", 0, table_size()}, {"output_table", table_size(), table_size()}};
  }
};

struct SkipGramModel {
  Vocabulary vocab;
  std::size_t dim = 0;
  std::vector<double> input_table;   // |V| x dim
  std::vector<double> output_table;  // |V| x dim

  SkipGramLayout layout() const { return {vocab.size(), dim}; }
  ParamVector to_params() const;
  static SkipGramModel from_params(Vocabulary vocab, std::size_t dim, const ParamVector& params);

  std::span<const double> input_row(WordId w) const {
    return std::span<const double>(input_table).subspan(w * dim, dim);
  }
};

double sigmoid(double x);

/// (mean_n sigma(w.n) - sigma(w.c)) / 2 with w from the input table and c, n
/// from the output table.
double skipgram_loss(const SkipGramModel& model, const SkipGramSample& s);
ParamVector skipgram_grad(const SkipGramModel& model, const SkipGramSample& s);

/// Raw kernels over a flat parameter span laid out per SkipGramLayout.
namespace sg {
double tuple_loss(const SkipGramLayout& layout, std::span<const double> params,
                  const SkipGramSample& s);
void add_tuple_grad(const SkipGramLayout& layout, std::span<const double> params,
                    const SkipGramSample& s, double weight, std::span<double> out);
void add_tuple_hvp(const SkipGramLayout& layout, std::span<const double> params,
                   const SkipGramSample& s, std::span<const double> v, double weight,
                   std::span<double> out);
void validate(const SkipGramLayout& layout, const SkipGramSample& s);
}  // namespace sg

/// Skip-gram training loss. Accepts SkipGramSample and SentenceSample
/// (the mean over the sentence's tuples).
class SkipGramObjective final : public Objective {
 public:
  explicit SkipGramObjective(SkipGramLayout layout) : layout_(layout) {}

  std::string_view name() const override { return "skipgram"; }
  std::size_t num_params() const override { return layout_.num_params(); }
  bool has_analytic_hvp() const override { return true; }
  const SkipGramLayout& layout() const noexcept { return layout_; }

 protected:
  double sample_loss(const ParamVector& p, const Sample& s) const override;
  void add_sample_grad(const ParamVector& p, const Sample& s, double w,
                       std::span<double> out) const override;
  void add_sample_hvp(const ParamVector& p, const Sample& s, const ParamVector& v, double w,
                      std::span<double> out) const override;

 private:
  SkipGramLayout layout_;
};

}  // namespace crossloss
