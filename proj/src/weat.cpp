#include "crossloss/weat.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <spdlog/spdlog.h>

#include "crossloss/errors.hpp"

namespace crossloss {

namespace {

void warn_duplicates(const std::string& spec, const char* list, const std::vector<std::string>& words) {
  std::set<std::string> seen;
  for (const auto& w : words) {
    if (!seen.insert(w).second) {
      spdlog::warn("WEAT '{}': word '{}' appears more than once in {}; kept", spec, w, list);
    }
  }
}

bool intersects(const std::vector<std::string>& p, const std::vector<std::string>& q) {
  return std::any_of(p.begin(), p.end(),
                     [&](const std::string& w) { return std::find(q.begin(), q.end(), w) != q.end(); });
}

double norm(std::span<const double> u) {
  double acc = 0.0;
  for (double v : u) acc += v * v;
  return std::sqrt(acc);
}

std::span<const double> row_of(std::span<const double> table, std::size_t dim, WordId w) {
  return table.subspan(static_cast<std::size_t>(w) * dim, dim);
}

double mean_cos(std::span<const double> u, const std::vector<WordId>& set,
                std::span<const double> table, std::size_t dim) {
  double acc = 0.0;
  for (WordId a : set) acc += cosine(u, row_of(table, dim, a));
  return acc / static_cast<double>(set.size());
}

/// Standardized difference of per-target scores. `scores` is X then Y.
struct Standardized {
  double mean_x = 0.0, mean_y = 0.0, mean_all = 0.0, std = 0.0, effect = 0.0;
  bool degenerate = false;
};

Standardized standardize(const std::vector<double>& scores, std::size_t nx) {
  Standardized r;
  const std::size_t n = scores.size();
  const std::size_t ny = n - nx;
  for (std::size_t i = 0; i < n; ++i) {
    (i < nx ? r.mean_x : r.mean_y) += scores[i];
    r.mean_all += scores[i];
  }
  r.mean_x /= static_cast<double>(nx);
  r.mean_y /= static_cast<double>(ny);
  r.mean_all /= static_cast<double>(n);
  double var = 0.0;
  for (double s : scores) var += (s - r.mean_all) * (s - r.mean_all);
  r.std = std::sqrt(var / static_cast<double>(n));
  if (r.std == 0.0) {
    r.degenerate = true;
  } else {
    r.effect = (r.mean_x - r.mean_y) / r.std;
  }
  return r;
}

std::vector<double> target_scores(const WeatIds& ids, std::span<const double> table, std::size_t dim) {
  std::vector<double> scores;
  scores.reserve(ids.x.size() + ids.y.size());
  for (const auto* set : {&ids.x, &ids.y}) {
    for (WordId w : *set) {
      const auto u = row_of(table, dim, w);
      scores.push_back(mean_cos(u, ids.a, table, dim) - mean_cos(u, ids.b, table, dim));
    }
  }
  return scores;
}

/// out_u += scale * d cos(u, v) / du
void add_cos_grad(std::span<const double> u, std::span<const double> v, double scale, double* out_u) {
  const double nu = norm(u);
  const double nv = norm(v);
  const double c = cosine(u, v);
  for (std::size_t k = 0; k < u.size(); ++k) {
    out_u[k] += scale * (v[k] / (nu * nv) - c * u[k] / (nu * nu));
  }
}

WeatResult to_result(const WeatSpec& spec, const std::vector<double>& scores, const Standardized& st) {
  WeatResult r;
  r.effect = st.effect;
  r.mean_x = st.mean_x;
  r.mean_y = st.mean_y;
  r.pooled_std = st.std;
  r.degenerate = st.degenerate;
  for (std::size_t i = 0; i < spec.x.size(); ++i) r.associations[spec.x[i]] = scores[i];
  for (std::size_t i = 0; i < spec.y.size(); ++i) r.associations[spec.y[i]] = scores[spec.x.size() + i];
  return r;
}

}  // namespace

void WeatSpec::validate() const {
  if (x.empty() || y.empty() || a.empty() || b.empty()) {
    throw ConfigError("WEAT '" + name + "': X, Y, A and B must all be non-empty");
  }
  if (intersects(x, y)) throw ConfigError("WEAT '" + name + "': X and Y overlap");
  if (intersects(a, b)) throw ConfigError("WEAT '" + name + "': A and B overlap");
  warn_duplicates(name, "X", x);
  warn_duplicates(name, "Y", y);
  warn_duplicates(name, "A", a);
  warn_duplicates(name, "B", b);
}

WeatSpec resolve_oov(const WeatSpec& spec, const Vocabulary& vocab, bool skip_oov) {
  std::vector<std::string> missing;
  WeatSpec out{spec.name, {}, {}, {}, {}};
  auto filter = [&](const std::vector<std::string>& in, std::vector<std::string>& dst) {
    for (const auto& w : in) {
      if (vocab.contains(w)) {
        dst.push_back(w);
      } else {
        missing.push_back(w);
      }
    }
  };
  filter(spec.x, out.x);
  filter(spec.y, out.y);
  filter(spec.a, out.a);
  filter(spec.b, out.b);
  if (!missing.empty()) {
    std::string list;
    for (const auto& w : missing) list += (list.empty() ? "" : ", ") + w;
    if (!skip_oov) {
      throw VocabError("WEAT '" + spec.name + "': words not in vocabulary: " + list, missing);
    }
    spdlog::warn("WEAT '{}': dropping out-of-vocabulary words: {}", spec.name, list);
  }
  out.validate();
  return out;
}

WeatIds to_ids(const WeatSpec& spec, const Vocabulary& vocab) {
  auto map = [&](const std::vector<std::string>& words) {
    std::vector<WordId> ids;
    ids.reserve(words.size());
    for (const auto& w : words) ids.push_back(vocab.id(w));
    return ids;
  };
  resolve_oov(spec, vocab, false);
  return {map(spec.x), map(spec.y), map(spec.a), map(spec.b)};
}

double cosine(std::span<const double> u, std::span<const double> v) {
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw NumericError("cosine similarity of a zero-norm vector");
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += u[k] * v[k];
  return acc / (nu * nv);
}

double association(std::string_view word, const std::vector<std::string>& a,
                   const std::vector<std::string>& b, const EmbeddingView& table) {
  if (a.empty() || b.empty()) throw ConfigError("association: attribute sets must be non-empty");
  auto ids = [&](const std::vector<std::string>& words) {
    std::vector<WordId> out;
    for (const auto& w : words) out.push_back(table.vocab.id(w));
    return out;
  };
  const auto u = table.row(table.vocab.id(word));
  return mean_cos(u, ids(a), table.table, table.dim) - mean_cos(u, ids(b), table.table, table.dim);
}

WeatResult weat_effect(const WeatSpec& spec, const EmbeddingView& table) {
  const WeatIds ids = to_ids(spec, table.vocab);
  const auto scores = target_scores(ids, table.table, table.dim);
  return to_result(spec, scores, standardize(scores, ids.x.size()));
}

WeatResult one_sided_weat(const std::vector<std::string>& x, const std::vector<std::string>& y,
                          const std::vector<std::string>& a, const EmbeddingView& table) {
  if (x.empty() || y.empty() || a.empty()) throw ConfigError("one-sided WEAT: empty word list");
  std::vector<WordId> aid;
  for (const auto& w : a) aid.push_back(table.vocab.id(w));
  std::vector<double> scores;
  for (const auto* set : {&x, &y}) {
    for (const auto& w : *set) scores.push_back(mean_cos(table.row(table.vocab.id(w)), aid, table.table, table.dim));
  }
  const WeatSpec shaped{"one-sided", x, y, a, {}};
  return to_result(shaped, scores, standardize(scores, x.size()));
}

namespace weat_detail {

double effect(const WeatIds& ids, std::span<const double> table, std::size_t dim, bool* degenerate) {
  const auto st = standardize(target_scores(ids, table, dim), ids.x.size());
  if (degenerate) *degenerate = st.degenerate;
  return st.effect;
}

double add_abs_effect_grad(const WeatIds& ids, std::span<const double> table, std::size_t dim,
                           double weight, std::span<double> out) {
  const auto scores = target_scores(ids, table, dim);
  const std::size_t nx = ids.x.size();
  const std::size_t n = scores.size();
  const auto st = standardize(scores, nx);
  if (st.degenerate || st.effect == 0.0) return st.effect;
  const double sign = st.effect > 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_x = i < nx;
    const WordId w = in_x ? ids.x[i] : ids.y[i - nx];
    // d effect / d s_i
    double c = (in_x ? 1.0 / static_cast<double>(nx) : -1.0 / static_cast<double>(n - nx)) / st.std;
    c -= st.effect * (scores[i] - st.mean_all) / (st.std * st.std * static_cast<double>(n));
    c *= sign * weight;
    const auto u = row_of(table, dim, w);
    double* gu = out.data() + static_cast<std::size_t>(w) * dim;
    auto attribute_terms = [&](const std::vector<WordId>& set, double set_sign) {
      const double scale = c * set_sign / static_cast<double>(set.size());
      for (WordId a : set) {
        const auto v = row_of(table, dim, a);
        add_cos_grad(u, v, scale, gu);
        add_cos_grad(v, u, scale, out.data() + static_cast<std::size_t>(a) * dim);
      }
    };
    attribute_terms(ids.a, 1.0);
    attribute_terms(ids.b, -1.0);
  }
  return st.effect;
}

}  // namespace weat_detail

AbsWeatValue abs_weat_loss(const WeatSpec& spec, const EmbeddingView& table) {
  const WeatIds ids = to_ids(spec, table.vocab);
  AbsWeatValue out;
  out.grad.assign(table.table.size(), 0.0);
  out.effect = weat_detail::effect(ids, table.table, table.dim, &out.degenerate);
  out.loss = std::abs(out.effect);
  if (out.effect == 0.0) {
    out.degenerate = true;
    return out;
  }
  weat_detail::add_abs_effect_grad(ids, table.table, table.dim, 1.0, out.grad);
  return out;
}

double AbsWeatObjective::sample_loss(const ParamVector& p, const Sample& s) const {
  expect<WholeModel>(s);
  const auto input = p.values().subspan(0, layout_.table_size());
  return std::abs(weat_detail::effect(ids_, input, layout_.dim));
}

void AbsWeatObjective::add_sample_grad(const ParamVector& p, const Sample& s, double w,
                                       std::span<double> out) const {
  expect<WholeModel>(s);
  const auto input = p.values().subspan(0, layout_.table_size());
  weat_detail::add_abs_effect_grad(ids_, input, layout_.dim, w, out.subspan(0, layout_.table_size()));
}

}  // namespace crossloss
