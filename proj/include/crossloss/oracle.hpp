#pragma once

#include <map>
#include <span>
#include <vector>

#include "crossloss/influence.hpp"
#include "crossloss/objective.hpp"
#include "crossloss/training.hpp"

namespace crossloss {

/// Retrains a model from a fixed initialization and RNG stream with one
/// training sample left out. train(kNoExclusion) is the full-data run.
class LooTrainer {
 public:
  virtual ~LooTrainer() = default;
  virtual std::size_t dataset_size() const = 0;
  virtual ParamVector train(std::size_t excluded) const = 0;
};

/// Validates the id, then retrains. kNoExclusion reproduces the full run.
ParamVector loo_retrain(const LooTrainer& trainer, std::size_t excluded_id);

/// Every leave-one-out model, index i excluding sample i. Runs in parallel.
std::vector<ParamVector> loo_all(const LooTrainer& trainer);
/// Same result, one run after another.
std::vector<ParamVector> loo_all_serial(const LooTrainer& trainer);

/// -N (L'(test; theta_loo) - L'(test; theta_full)): the measured counterpart
/// of the upweighting derivative.
double empirical_influence(const Objective& test_obj, std::span<const Sample> test_batch,
                           const ParamVector& theta_full, const ParamVector& theta_loo, std::size_t n);

/// Pearson correlation. Throws DegenerateError on zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);
/// Pearson correlation of average ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

inline const std::vector<double> kReportThresholds{0.6, 0.8};

struct CorrelationReport {
  std::vector<double> per_point;  // Pearson r per test point (NaN when undefined)
  std::vector<int> labels;        // class of each test point
  std::map<double, double> fraction_above;
  std::map<int, std::map<double, double>> class_fraction_above;
  std::map<int, double> class_mean_r;
  double mean_r = 0.0;
};

/// predicted[t][z] and empirical[t][z] over training samples z for each test point t.
CorrelationReport correlation_report(const std::vector<std::vector<double>>& predicted,
                                     const std::vector<std::vector<double>>& empirical,
                                     std::span<const int> labels,
                                     const std::vector<double>& thresholds = kReportThresholds);

// ---------------------------------------------------------------------------
// Mixture-of-Gaussians audit

/// Leave-one-out DEC refinement from a shared k-means initialization.
class DecLooTrainer final : public LooTrainer {
 public:
  DecLooTrainer(std::span<const LabeledPoint> points, ClusterModel init, DecConfig cfg)
      : points_(points), init_(std::move(init)), cfg_(cfg) {}
  std::size_t dataset_size() const override { return points_.size(); }
  ParamVector train(std::size_t excluded) const override;

 private:
  std::span<const LabeledPoint> points_;
  ClusterModel init_;
  DecConfig cfg_;
};

/// Leave-one-out supervised NLL training from the same initialization.
class NllLooTrainer final : public LooTrainer {
 public:
  NllLooTrainer(std::span<const LabeledPoint> points, ClusterModel init, ClassMap class_map, DecConfig cfg)
      : points_(points), init_(std::move(init)), class_map_(std::move(class_map)), cfg_(cfg) {}
  std::size_t dataset_size() const override { return points_.size(); }
  ParamVector train(std::size_t excluded) const override;

 private:
  std::span<const LabeledPoint> points_;
  ClusterModel init_;
  ClassMap class_map_;
  DecConfig cfg_;
};

struct PipelineAudit {
  ParamVector params;                           // full-data model
  std::vector<std::vector<double>> predicted;   // [test][train]
  std::vector<std::vector<double>> empirical;   // [test][train]
  CorrelationReport report;
};

struct MogAudit {
  DecTraining dec;
  PipelineAudit matched;  // train = test = NLL
  PipelineAudit cross;    // train = DEC, test = NLL
};

/// Every point is a test point; influence of every point on every other
/// point under both pipelines, validated against full leave-one-out retraining.
MogAudit run_mog_audit(std::span<const LabeledPoint> points, std::size_t k, const DecConfig& cfg,
                       const SolverConfig& solver);

}  // namespace crossloss
