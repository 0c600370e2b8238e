#include "crossloss/influence.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <spdlog/spdlog.h>

#include "crossloss/errors.hpp"
#include "crossloss/kernels.hpp"

namespace crossloss {

void LissaConfig::validate() const {
  if (depth < 1) throw ConfigError("LiSSA depth must be at least 1");
  if (damping < 0.0) throw ConfigError("LiSSA damping must be non-negative");
  if (!(scale > 0.0)) throw ConfigError("LiSSA scale must be positive");
  if (repeats < 1) throw ConfigError("LiSSA repeats must be at least 1");
  if (batch_size < 1) throw ConfigError("LiSSA batch size must be at least 1");
}

ParamVector ihvp_direct(const Objective& train_obj, const ParamVector& params,
                        std::span<const Sample> dataset, const ParamVector& v, double damping) {
  if (params.size() > kDirectSolveLimit) {
    throw ConfigError("direct inverse-HVP limited to " + std::to_string(kDirectSolveLimit) +
                      " parameters, model has " + std::to_string(params.size()));
  }
  if (!v.same_layout(params)) throw ConfigError("ihvp_direct: v does not match params");
  Eigen::MatrixXd h = kernels::parallel::assemble_hessian(train_obj, params, dataset);
  // Symmetrize away finite-difference asymmetry before factorizing.
  h = 0.5 * (h + h.transpose()).eval();
  h.diagonal().array() += damping;
  const Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    throw NumericError("damped Hessian is not positive definite at damping " +
                       std::to_string(damping) + "; increase the damping");
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(v.values().data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd x = llt.solve(rhs);
  ParamVector out = ParamVector::zeros_like(params);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x(static_cast<Eigen::Index>(i));
  out.require_finite("ihvp_direct");
  return out;
}

ParamVector ihvp_lissa(const Objective& train_obj, const ParamVector& params,
                       std::span<const Sample> dataset, const ParamVector& v,
                       const LissaConfig& cfg) {
  cfg.validate();
  if (dataset.empty()) throw ConfigError("ihvp_lissa: empty dataset");
  if (!v.same_layout(params)) throw ConfigError("ihvp_lissa: v does not match params");
  ParamVector estimate = ParamVector::zeros_like(params);
  const double v_norm = v.norm();
  if (v_norm == 0.0) return estimate;

  const bool full_batch = cfg.batch_size >= dataset.size();
  std::vector<Sample> batch;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);
    ParamVector h = v;
    for (std::size_t t = 0; t < cfg.depth; ++t) {
      std::span<const Sample> b = dataset;
      if (!full_batch) {
        batch.clear();
        for (std::size_t i = 0; i < cfg.batch_size; ++i) batch.push_back(dataset[pick(rng)]);
        b = batch;
      }
      // h = v + (1 - damping/scale) h - H_b h / scale
      ParamVector hv = h.norm() > 0.0 ? train_obj.hvp(params, b, h) : ParamVector::zeros_like(h);
      h *= 1.0 - cfg.damping / cfg.scale;
      h.axpy(-1.0 / cfg.scale, hv);
      h += v;
      const double hn = h.norm();
      if (!(hn <= 1e6 * v_norm)) {
        throw DivergenceError("LiSSA diverged at step " + std::to_string(t + 1) + " (|h| = " +
                              std::to_string(hn) + "); increase the scale or the damping");
      }
    }
    estimate.axpy(1.0 / cfg.scale, h);
  }
  estimate *= 1.0 / static_cast<double>(cfg.repeats);
  return estimate;
}

ParamVector solve_ihvp(const Objective& train_obj, const ParamVector& params,
                       std::span<const Sample> dataset, const ParamVector& v,
                       const SolverConfig& solver) {
  if (solver.kind == SolverKind::direct) {
    if (v.norm() == 0.0) return ParamVector::zeros_like(params);
    return ihvp_direct(train_obj, params, dataset, v, solver.lissa.damping);
  }
  return ihvp_lissa(train_obj, params, dataset, v, solver.lissa);
}

ParamVector stest(const Objective& test_obj, std::span<const Sample> test_batch,
                  const Objective& train_obj, const ParamVector& params,
                  std::span<const Sample> dataset, const SolverConfig& solver) {
  const ParamVector g = test_obj.grad(params, test_batch);
  return solve_ihvp(train_obj, params, dataset, g, solver);
}

double score_sample(const ParamVector& s, const Objective& train_obj, const ParamVector& params,
                    const Sample& z) {
  const double score = -s.dot(train_obj.grad(params, std::span<const Sample>(&z, 1)));
  if (!std::isfinite(score)) throw NumericError("non-finite influence score");
  return score;
}

std::vector<InfluenceRecord> score_all(const ParamVector& s, const Objective& train_obj,
                                       const ParamVector& params, std::span<const Sample> dataset) {
  const std::vector<double> scores = kernels::parallel::score_samples(s, train_obj, params, dataset);
  std::vector<InfluenceRecord> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw NumericError("non-finite influence score");
    out[i] = {i, scores[i]};
  }
  return out;
}

InfluenceSets rank_and_split(std::span<const InfluenceRecord> records, std::ptrdiff_t k_amplifying,
                             std::ptrdiff_t k_mitigating) {
  if (k_amplifying < 0 || k_mitigating < 0) throw ConfigError("set sizes must be non-negative");
  std::vector<InfluenceRecord> pos;
  std::vector<InfluenceRecord> neg;
  for (const auto& r : records) {
    if (r.score > 0.0) pos.push_back(r);
    if (r.score < 0.0) neg.push_back(r);
  }
  std::stable_sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.sample_id < b.sample_id;
  });
  std::stable_sort(neg.begin(), neg.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score < b.score : a.sample_id < b.sample_id;
  });
  InfluenceSets sets;
  const auto ka = static_cast<std::size_t>(k_amplifying);
  const auto km = static_cast<std::size_t>(k_mitigating);
  for (std::size_t i = 0; i < std::min(ka, pos.size()); ++i) sets.amplifying.push_back(pos[i].sample_id);
  for (std::size_t i = 0; i < std::min(km, neg.size()); ++i) sets.mitigating.push_back(neg[i].sample_id);
  if (pos.size() < ka || neg.size() < km) {
    sets.truncated = true;
    spdlog::warn("influence sets truncated: {} of {} amplifying, {} of {} mitigating samples qualify",
                 sets.amplifying.size(), ka, sets.mitigating.size(), km);
  }
  return sets;
}

double predict_removal_delta(double score, std::size_t n) {
  if (n == 0) throw ConfigError("training set size must be positive");
  return -score / static_cast<double>(n);
}

}  // namespace crossloss
