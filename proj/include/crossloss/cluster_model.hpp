#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "crossloss/objective.hpp"

namespace crossloss {

/// k centroids in d dimensions, stored row-major. Flattens to a single
/// ParamVector segment named "centroids".
struct ClusterModel {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;

  std::span<const double> centroid(std::size_t j) const {
    return std::span<const double>(centroids).subspan(j * dim, dim);
  }
  ParamVector to_params() const;
  static ClusterModel from_params(std::size_t k, std::size_t dim, const ParamVector& params);
};

/// Frozen DEC target distribution. Holds the centroids and column masses
/// f_j = sum_i q_ij it was computed from, so the target row of any point is
/// p_j proportional to q_j^2 / f_j under those frozen quantities.
struct DecTarget {
  ClusterModel snapshot;
  std::vector<double> column_mass;

  std::vector<double> row(std::span<const double> x) const;
  /// Computes the masses from `model` over `points`, skipping index `excluded`.
  static DecTarget from_model(const ClusterModel& model, std::span<const LabeledPoint> points,
                              std::size_t excluded = static_cast<std::size_t>(-1));
};

/// Student-t (alpha = 1) soft assignment of one point.
std::vector<double> soft_assign_row(const ClusterModel& model, std::span<const double> x);

/// q_ij = (1 + |x_i - mu_j|^2)^-1 / sum_j' (1 + |x_i - mu_j'|^2)^-1
Eigen::MatrixXd dec_soft_assign(const ClusterModel& model, std::span<const LabeledPoint> points);

/// p_ij = (q_ij^2 / f_j) / sum_j' (q_ij'^2 / f_j'),  f_j = sum_i q_ij
Eigen::MatrixXd dec_target(const Eigen::MatrixXd& q);

/// Mean over points of KL(P_i || Q_i) with Q recomputed from `model`.
double dec_loss(const ClusterModel& model, std::span<const LabeledPoint> points,
                const Eigen::MatrixXd& p);

/// Maps cluster index -> class label. Must be a bijection.
using ClassMap = std::vector<int>;

/// -log q_{i, c} where c is the cluster mapped to the point's label.
double nll_loss(const ClusterModel& model, const LabeledPoint& point, const ClassMap& class_map);

/// DEC training objective: mean KL(P || Q) with P frozen in a DecTarget.
class DecObjective final : public Objective {
 public:
  explicit DecObjective(DecTarget target);

  std::string_view name() const override { return "dec"; }
  std::size_t num_params() const override { return k_ * dim_; }
  bool has_analytic_hvp() const override { return true; }
  const DecTarget& target() const noexcept { return target_; }

 protected:
  double sample_loss(const ParamVector& p, const Sample& s) const override;
  void add_sample_grad(const ParamVector& p, const Sample& s, double w,
                       std::span<double> out) const override;
  void add_sample_hvp(const ParamVector& p, const Sample& s, const ParamVector& v, double w,
                      std::span<double> out) const override;

 private:
  std::size_t k_;
  std::size_t dim_;
  DecTarget target_;
};

/// Labelling objective: -log q of the cluster assigned to the point's class.
class NllObjective final : public Objective {
 public:
  NllObjective(std::size_t k, std::size_t dim, ClassMap class_map);

  std::string_view name() const override { return "nll"; }
  std::size_t num_params() const override { return k_ * dim_; }
  bool has_analytic_hvp() const override { return true; }
  std::size_t cluster_of(int label) const;

 protected:
  double sample_loss(const ParamVector& p, const Sample& s) const override;
  void add_sample_grad(const ParamVector& p, const Sample& s, double w,
                       std::span<double> out) const override;
  void add_sample_hvp(const ParamVector& p, const Sample& s, const ParamVector& v, double w,
                      std::span<double> out) const override;

 private:
  std::vector<double> one_hot(int label) const;

  std::size_t k_;
  std::size_t dim_;
  ClassMap class_map_;
};

}  // namespace crossloss
