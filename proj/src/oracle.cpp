#include "crossloss/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crossloss/errors.hpp"
#include "crossloss/kernels.hpp"

namespace crossloss {

ParamVector loo_retrain(const LooTrainer& trainer, std::size_t excluded_id) {
  if (excluded_id != kNoExclusion && excluded_id >= trainer.dataset_size()) {
    throw ConfigError("leave-one-out id " + std::to_string(excluded_id) + " out of range");
  }
  ParamVector p = trainer.train(excluded_id);
  if (!p.all_finite()) {
    throw DivergenceError("leave-one-out run excluding " + std::to_string(excluded_id) +
                          " produced non-finite parameters");
  }
  return p;
}

std::vector<ParamVector> loo_all(const LooTrainer& trainer) {
  std::vector<ParamVector> out(trainer.dataset_size());
  kernels::parallel_for(out.size(), [&](std::size_t i) { out[i] = loo_retrain(trainer, i); });
  return out;
}

std::vector<ParamVector> loo_all_serial(const LooTrainer& trainer) {
  std::vector<ParamVector> out;
  out.reserve(trainer.dataset_size());
  for (std::size_t i = 0; i < trainer.dataset_size(); ++i) out.push_back(loo_retrain(trainer, i));
  return out;
}

double empirical_influence(const Objective& test_obj, std::span<const Sample> test_batch,
                           const ParamVector& theta_full, const ParamVector& theta_loo, std::size_t n) {
  return -static_cast<double>(n) * (test_obj.loss(theta_loo, test_batch) - test_obj.loss(theta_full, test_batch));
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ConfigError("pearson: length mismatch");
  if (xs.size() < 3) throw ConfigError("pearson needs at least three pairs");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[idx[m]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  return pearson(average_ranks(xs), average_ranks(ys));
}

CorrelationReport correlation_report(const std::vector<std::vector<double>>& predicted,
                                     const std::vector<std::vector<double>>& empirical,
                                     std::span<const int> labels, const std::vector<double>& thresholds) {
  if (predicted.size() != empirical.size() || predicted.size() != labels.size()) {
    throw ConfigError("correlation_report: predicted, empirical and labels disagree in length");
  }
  CorrelationReport rep;
  rep.labels.assign(labels.begin(), labels.end());
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    double r = std::numeric_limits<double>::quiet_NaN();
    try {
      r = pearson(predicted[t], empirical[t]);
    } catch (const DegenerateError&) {
    }
    rep.per_point.push_back(r);
  }
  std::map<int, std::size_t> class_count;
  std::map<int, double> class_sum;
  for (double th : thresholds) rep.fraction_above[th] = 0.0;
  std::size_t finite = 0;
  for (std::size_t t = 0; t < rep.per_point.size(); ++t) {
    const double r = rep.per_point[t];
    const int c = labels[t];
    ++class_count[c];
    for (double th : thresholds) rep.class_fraction_above[c][th] += 0.0;
    if (std::isnan(r)) continue;
    ++finite;
    rep.mean_r += r;
    class_sum[c] += r;
    for (double th : thresholds) {
      if (r > th) {
        rep.fraction_above[th] += 1.0;
        rep.class_fraction_above[c][th] += 1.0;
      }
    }
  }
  const double n = static_cast<double>(rep.per_point.size());
  if (n > 0) {
    for (auto& [th, v] : rep.fraction_above) v /= n;
  }
  if (finite > 0) rep.mean_r /= static_cast<double>(finite);
  for (auto& [c, m] : rep.class_fraction_above) {
    for (auto& [th, v] : m) v /= static_cast<double>(class_count[c]);
    rep.class_mean_r[c] = class_sum[c] / static_cast<double>(class_count[c]);
  }
  return rep;
}

ParamVector DecLooTrainer::train(std::size_t excluded) const {
  return refine_dec(points_, init_, cfg_, excluded).model.to_params();
}

ParamVector NllLooTrainer::train(std::size_t excluded) const {
  return train_nll(points_, init_, class_map_, cfg_, excluded).to_params();
}

namespace {

PipelineAudit audit_pipeline(std::span<const LabeledPoint> points, const Objective& train_obj,
                             const Objective& test_obj, const LooTrainer& trainer,
                             const SolverConfig& solver) {
  const std::size_t n = points.size();
  std::vector<Sample> dataset(points.begin(), points.end());
  PipelineAudit audit;
  audit.params = loo_retrain(trainer, kNoExclusion);
  const std::vector<ParamVector> loo = loo_all(trainer);
  audit.predicted.resize(n);
  audit.empirical.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::span<const Sample> test_batch(&dataset[t], 1);
    const ParamVector s = stest(test_obj, test_batch, train_obj, audit.params, dataset, solver);
    for (const auto& rec : score_all(s, train_obj, audit.params, dataset)) audit.predicted[t].push_back(rec.score);
    audit.empirical[t].resize(n);
    for (std::size_t z = 0; z < n; ++z) {
      audit.empirical[t][z] = empirical_influence(test_obj, test_batch, audit.params, loo[z], n);
    }
  }
  std::vector<int> labels;
  for (const auto& p : points) labels.push_back(p.label);
  audit.report = correlation_report(audit.predicted, audit.empirical, labels);
  return audit;
}

}  // namespace

MogAudit run_mog_audit(std::span<const LabeledPoint> points, std::size_t k, const DecConfig& cfg,
                       const SolverConfig& solver) {
  MogAudit out;
  out.dec = train_dec(points, k, cfg);
  const NllObjective nll(k, out.dec.init.dim, out.dec.class_map);

  const DecLooTrainer dec_trainer(points, out.dec.init, cfg);
  const DecObjective dec_obj(out.dec.run.target);
  out.cross = audit_pipeline(points, dec_obj, nll, dec_trainer, solver);

  const NllLooTrainer nll_trainer(points, out.dec.init, out.dec.class_map, cfg);
  out.matched = audit_pipeline(points, nll, nll, nll_trainer, solver);
  return out;
}

}  // namespace crossloss
