#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "crossloss/errors.hpp"
#include "crossloss/kmeans.hpp"
#include "crossloss/training.hpp"

namespace crossloss {

namespace {

std::vector<Sample> retained(std::span<const LabeledPoint> points, std::size_t excluded) {
  std::vector<Sample> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i != excluded) out.emplace_back(points[i]);
  }
  return out;
}

void check_points(std::span<const LabeledPoint> points, const ClusterModel& init) {
  if (points.size() < init.k) throw ConfigError("need at least as many points as clusters");
  for (const auto& p : points) {
    if (p.x.size() != init.dim) throw ConfigError("point dimension does not match the model");
  }
}

}  // namespace

void DecConfig::validate() const {
  if (outer_iterations < 1) throw ConfigError("DEC needs at least one target re-estimation");
  if (!(lr > 0.0)) throw ConfigError("DEC learning rate must be positive");
  if (batch_size < 1) throw ConfigError("DEC batch size must be at least 1");
}

DecRun refine_dec(std::span<const LabeledPoint> points, const ClusterModel& init, const DecConfig& cfg,
                  std::size_t excluded) {
  cfg.validate();
  check_points(points, init);
  const std::vector<Sample> data = retained(points, excluded);

  // Minibatch order is drawn over the full index set so that a leave-one-out
  // run sees the same stream with the excluded index skipped.
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 7u};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(points.size());

  DecRun run{init, DecTarget::from_model(init, points, excluded), {}};
  ParamVector params = init.to_params();
  for (std::size_t outer = 0; outer < cfg.outer_iterations; ++outer) {
    const ClusterModel current = ClusterModel::from_params(init.k, init.dim, params);
    run.target = DecTarget::from_model(current, points, excluded);
    const DecObjective obj(run.target);
    if (cfg.mode == DecMode::full_batch) {
      for (std::size_t step = 0; step < cfg.inner_steps; ++step) {
        params.axpy(-cfg.lr, obj.grad(params, data));
      }
    } else {
      std::vector<Sample> batch;
      for (std::size_t epoch = 0; epoch < cfg.inner_steps; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        batch.clear();
        for (std::size_t idx : order) {
          if (idx == excluded) continue;
          batch.emplace_back(points[idx]);
          if (batch.size() == cfg.batch_size) {
            params.axpy(-cfg.lr, obj.grad(params, batch));
            batch.clear();
          }
        }
        if (!batch.empty()) params.axpy(-cfg.lr, obj.grad(params, batch));
      }
    }
    const double kl = obj.loss(params, data);
    if (!std::isfinite(kl)) throw DivergenceError("DEC training diverged");
    run.kl_history.push_back(kl);
  }
  run.model = ClusterModel::from_params(init.k, init.dim, params);
  return run;
}

DecTraining train_dec(std::span<const LabeledPoint> points, std::size_t k, const DecConfig& cfg) {
  if (points.empty()) throw ConfigError("train_dec: no points");
  const std::size_t dim = points.front().x.size();
  std::vector<double> flat;
  std::vector<int> labels;
  for (const auto& p : points) {
    if (p.x.size() != dim) throw ConfigError("train_dec: inconsistent point dimensions");
    flat.insert(flat.end(), p.x.begin(), p.x.end());
    labels.push_back(p.label);
  }
  const KMeansResult km = kmeans(flat, dim, k, cfg.seed);

  DecTraining out;
  out.init = ClusterModel{k, dim, km.centroids};
  out.kmeans_accuracy = best_bijection(km.assignments, labels, k).accuracy;
  out.run = refine_dec(points, out.init, cfg);
  const auto assigned = nearest_centroid(out.run.model, points);
  const Bijection bij = best_bijection(assigned, labels, k);
  out.class_map = bij.class_map;
  out.accuracy = bij.accuracy;
  return out;
}

ClusterModel train_nll(std::span<const LabeledPoint> points, const ClusterModel& init,
                       const ClassMap& class_map, const DecConfig& cfg, std::size_t excluded) {
  cfg.validate();
  check_points(points, init);
  const std::vector<Sample> data = retained(points, excluded);
  const NllObjective obj(init.k, init.dim, class_map);
  ParamVector params = init.to_params();
  const std::size_t steps = cfg.outer_iterations * cfg.inner_steps;
  for (std::size_t step = 0; step < steps; ++step) params.axpy(-cfg.lr, obj.grad(params, data));
  if (!std::isfinite(obj.loss(params, data))) throw DivergenceError("NLL training diverged");
  return ClusterModel::from_params(init.k, init.dim, params);
}

}  // namespace crossloss
