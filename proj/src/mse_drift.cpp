#include "crossloss/mse_drift.hpp"

#include "crossloss/errors.hpp"

namespace crossloss {

MseDriftObjective::MseDriftObjective(SkipGramLayout layout, std::vector<double> initial_input_table)
    : layout_(layout), initial_(std::move(initial_input_table)) {
  if (initial_.size() != layout_.table_size()) {
    throw ConfigError("initial table does not match the model layout");
  }
}

WordId MseDriftObjective::checked(const Sample& s) const {
  const WordId w = expect<WordTarget>(s).word;
  if (w >= layout_.vocab_size) {
    throw VocabError("word id " + std::to_string(w) + " out of range", {std::to_string(w)});
  }
  return w;
}

double MseDriftObjective::sample_loss(const ParamVector& p, const Sample& s) const {
  const WordId w = checked(s);
  const std::size_t off = layout_.input_offset(w);
  double acc = 0.0;
  for (std::size_t k = 0; k < layout_.dim; ++k) {
    const double diff = p[off + k] - initial_[off + k];
    acc += diff * diff;
  }
  return acc / static_cast<double>(layout_.dim);
}

void MseDriftObjective::add_sample_grad(const ParamVector& p, const Sample& s, double w,
                                        std::span<double> out) const {
  const WordId word = checked(s);
  const std::size_t off = layout_.input_offset(word);
  const double scale = 2.0 * w / static_cast<double>(layout_.dim);
  for (std::size_t k = 0; k < layout_.dim; ++k) out[off + k] += scale * (p[off + k] - initial_[off + k]);
}

void MseDriftObjective::add_sample_hvp(const ParamVector&, const Sample& s, const ParamVector& v,
                                       double w, std::span<double> out) const {
  const WordId word = checked(s);
  const std::size_t off = layout_.input_offset(word);
  const double scale = 2.0 * w / static_cast<double>(layout_.dim);
  for (std::size_t k = 0; k < layout_.dim; ++k) out[off + k] += scale * v[off + k];
}

double mse_drift_loss(const std::vector<double>& initial_input_table, const SkipGramModel& model,
                      std::string_view word) {
  const MseDriftObjective obj(model.layout(), initial_input_table);
  const Sample s = WordTarget{model.vocab.id(word)};
  return obj.loss(model.to_params(), std::span<const Sample>(&s, 1));
}

}  // namespace crossloss
