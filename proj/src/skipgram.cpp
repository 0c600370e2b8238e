#include "crossloss/skipgram.hpp"

#include <cmath>

#include "crossloss/errors.hpp"

namespace crossloss {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

ParamVector SkipGramModel::to_params() const {
  const SkipGramLayout lay = layout();
  std::vector<double> values;
  values.reserve(lay.num_params());
  values.insert(values.end(), input_table.begin(), input_table.end());
  values.insert(values.end(), output_table.begin(), output_table.end());
  return ParamVector(std::move(values), lay.segments());
}

SkipGramModel SkipGramModel::from_params(Vocabulary vocab, std::size_t dim,
                                         const ParamVector& params) {
  const SkipGramLayout lay{vocab.size(), dim};
  if (params.size() != lay.num_params()) {
    throw ConfigError("SkipGramModel::from_params: parameter count does not match vocab x dim");
  }
  SkipGramModel m;
  m.vocab = std::move(vocab);
  m.dim = dim;
  const auto vals = params.values();
  m.input_table.assign(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(lay.table_size()));
  m.output_table.assign(vals.begin() + static_cast<std::ptrdiff_t>(lay.table_size()), vals.end());
  return m;
}

namespace sg {

void validate(const SkipGramLayout& layout, const SkipGramSample& s) {
  auto check = [&](WordId id) {
    if (id >= layout.vocab_size) {
      throw ConfigError("skip-gram sample word id " + std::to_string(id) +
                        " out of range for vocabulary of " + std::to_string(layout.vocab_size));
    }
  };
  check(s.center);
  check(s.context);
  if (s.negatives.empty()) throw ConfigError("skip-gram sample has no negatives");
  for (WordId n : s.negatives) check(n);
}

double tuple_loss(const SkipGramLayout& layout, std::span<const double> params,
                  const SkipGramSample& s) {
  validate(layout, s);
  const std::size_t d = layout.dim;
  const double* w = params.data() + layout.input_offset(s.center);
  double neg = 0.0;
  for (WordId n : s.negatives) neg += sigmoid(dot(w, params.data() + layout.output_offset(n), d));
  neg /= static_cast<double>(s.negatives.size());
  const double pos = sigmoid(dot(w, params.data() + layout.output_offset(s.context), d));
  return 0.5 * (neg - pos);
}

void add_tuple_grad(const SkipGramLayout& layout, std::span<const double> params,
                    const SkipGramSample& s, double weight, std::span<double> out) {
  validate(layout, s);
  const std::size_t d = layout.dim;
  const double* w = params.data() + layout.input_offset(s.center);
  double* gw = out.data() + layout.input_offset(s.center);
  // Each term is coef * sigma(w . u); d/dw = coef sigma' u, d/du = coef sigma' w.
  auto term = [&](WordId u_id, double coef) {
    const double* u = params.data() + layout.output_offset(u_id);
    double* gu = out.data() + layout.output_offset(u_id);
    const double sg = sigmoid(dot(w, u, d));
    const double scale = weight * coef * sg * (1.0 - sg);
    for (std::size_t k = 0; k < d; ++k) {
      gw[k] += scale * u[k];
      gu[k] += scale * w[k];
    }
  };
  const double neg_coef = 0.5 / static_cast<double>(s.negatives.size());
  for (WordId n : s.negatives) term(n, neg_coef);
  term(s.context, -0.5);
}

void add_tuple_hvp(const SkipGramLayout& layout, std::span<const double> params,
                   const SkipGramSample& s, std::span<const double> v, double weight,
                   std::span<double> out) {
  validate(layout, s);
  const std::size_t d = layout.dim;
  const double* w = params.data() + layout.input_offset(s.center);
  const double* vw = v.data() + layout.input_offset(s.center);
  double* hw = out.data() + layout.input_offset(s.center);
  auto term = [&](WordId u_id, double coef) {
    const double* u = params.data() + layout.output_offset(u_id);
    const double* vu = v.data() + layout.output_offset(u_id);
    double* hu = out.data() + layout.output_offset(u_id);
    const double sg = sigmoid(dot(w, u, d));
    const double d1 = sg * (1.0 - sg);
    const double d2 = d1 * (1.0 - 2.0 * sg);
    const double delta = dot(u, vw, d) + dot(w, vu, d);
    const double a = weight * coef;
    for (std::size_t k = 0; k < d; ++k) {
      hw[k] += a * (d2 * delta * u[k] + d1 * vu[k]);
      hu[k] += a * (d2 * delta * w[k] + d1 * vw[k]);
    }
  };
  const double neg_coef = 0.5 / static_cast<double>(s.negatives.size());
  for (WordId n : s.negatives) term(n, neg_coef);
  term(s.context, -0.5);
}

}  // namespace sg

double skipgram_loss(const SkipGramModel& model, const SkipGramSample& s) {
  return sg::tuple_loss(model.layout(), model.to_params().values(), s);
}

ParamVector skipgram_grad(const SkipGramModel& model, const SkipGramSample& s) {
  const ParamVector p = model.to_params();
  ParamVector g = ParamVector::zeros_like(p);
  sg::add_tuple_grad(model.layout(), p.values(), s, 1.0, g.values());
  return g;
}

double SkipGramObjective::sample_loss(const ParamVector& p, const Sample& s) const {
  if (const auto* t = std::get_if<SkipGramSample>(&s)) return sg::tuple_loss(layout_, p.values(), *t);
  const auto& sent = expect<SentenceSample>(s);
  if (sent.pairs.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& t : sent.pairs) acc += sg::tuple_loss(layout_, p.values(), t);
  return acc / static_cast<double>(sent.pairs.size());
}

void SkipGramObjective::add_sample_grad(const ParamVector& p, const Sample& s, double w,
                                        std::span<double> out) const {
  if (const auto* t = std::get_if<SkipGramSample>(&s)) {
    sg::add_tuple_grad(layout_, p.values(), *t, w, out);
    return;
  }
  const auto& sent = expect<SentenceSample>(s);
  if (sent.pairs.empty()) return;
  const double tw = w / static_cast<double>(sent.pairs.size());
  for (const auto& t : sent.pairs) sg::add_tuple_grad(layout_, p.values(), t, tw, out);
}

void SkipGramObjective::add_sample_hvp(const ParamVector& p, const Sample& s, const ParamVector& v,
                                       double w, std::span<double> out) const {
  if (const auto* t = std::get_if<SkipGramSample>(&s)) {
    sg::add_tuple_hvp(layout_, p.values(), *t, v.values(), w, out);
    return;
  }
  const auto& sent = expect<SentenceSample>(s);
  if (sent.pairs.empty()) return;
  const double tw = w / static_cast<double>(sent.pairs.size());
  for (const auto& t : sent.pairs) sg::add_tuple_hvp(layout_, p.values(), t, v.values(), tw, out);
}

}  // namespace crossloss
