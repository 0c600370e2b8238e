#include "crossloss/cluster_model.hpp"

#include <cmath>
#include <string>

#include "crossloss/errors.hpp"

namespace crossloss {

namespace {

/// Per-point quantities of the Student-t kernel.
struct Kernel {
  std::vector<double> t;  // 1 / (1 + |x - mu_j|^2)
  std::vector<double> q;  // t_j / sum t
  double sum_t = 0.0;
};

Kernel kernel(std::span<const double> mu, std::size_t k, std::size_t d,
              std::span<const double> x) {
  if (x.size() != d) {
    throw ConfigError("point has dimension " + std::to_string(x.size()) + ", model expects " +
                      std::to_string(d));
  }
  Kernel out;
  out.t.resize(k);
  out.q.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    double dist = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = x[c] - mu[j * d + c];
      dist += diff * diff;
    }
    out.t[j] = 1.0 / (1.0 + dist);
    out.sum_t += out.t[j];
  }
  for (std::size_t j = 0; j < k; ++j) out.q[j] = out.t[j] / out.sum_t;
  return out;
}

/// sum_j p_j log(p_j / q_j); target rows sum to one.
double target_loss(const Kernel& ker, const std::vector<double>& p) {
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) acc += p[j] * (std::log(p[j]) - std::log(ker.q[j]));
  }
  return acc;
}

void add_target_grad(std::span<const double> mu, std::size_t k, std::size_t d,
                     std::span<const double> x, const std::vector<double>& p, double weight,
                     std::span<double> out) {
  const Kernel ker = kernel(mu, k, d, x);
  for (std::size_t j = 0; j < k; ++j) {
    const double coef = weight * 2.0 * (p[j] - ker.q[j]) * ker.t[j];
    for (std::size_t c = 0; c < d; ++c) out[j * d + c] += coef * (mu[j * d + c] - x[c]);
  }
}

void add_target_hvp(std::span<const double> mu, std::size_t k, std::size_t d,
                    std::span<const double> x, const std::vector<double>& p,
                    std::span<const double> v, double weight, std::span<double> out) {
  const Kernel ker = kernel(mu, k, d, x);
  // dd_j: directional derivative of |x - mu_j|^2 along v.
  std::vector<double> dd(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < d; ++c) dd[j] += 2.0 * (mu[j * d + c] - x[c]) * v[j * d + c];
  }
  double mix = 0.0;
  for (std::size_t j = 0; j < k; ++j) mix += ker.q[j] * ker.t[j] * dd[j];
  for (std::size_t j = 0; j < k; ++j) {
    const double t = ker.t[j];
    const double dt = -t * t * dd[j];
    const double dq = ker.q[j] * (-t * dd[j] + mix);
    const double resid = p[j] - ker.q[j];
    const double along_r = 2.0 * weight * (-dq * t + resid * dt);
    const double along_v = 2.0 * weight * resid * t;
    for (std::size_t c = 0; c < d; ++c) {
      out[j * d + c] += along_r * (mu[j * d + c] - x[c]) + along_v * v[j * d + c];
    }
  }
}

}  // namespace

ParamVector ClusterModel::to_params() const {
  return ParamVector(centroids, {{"centroids", 0, centroids.size()}});
}

ClusterModel ClusterModel::from_params(std::size_t k, std::size_t dim, const ParamVector& params) {
  if (params.size() != k * dim) throw ConfigError("ClusterModel::from_params: size mismatch");
  return ClusterModel{k, dim, params.raw()};
}

std::vector<double> soft_assign_row(const ClusterModel& model, std::span<const double> x) {
  return kernel(model.centroids, model.k, model.dim, x).q;
}

std::vector<double> DecTarget::row(std::span<const double> x) const {
  const std::vector<double> q = soft_assign_row(snapshot, x);
  std::vector<double> p(q.size());
  double total = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    p[j] = q[j] * q[j] / column_mass[j];
    total += p[j];
  }
  for (double& v : p) v /= total;
  return p;
}

DecTarget DecTarget::from_model(const ClusterModel& model, std::span<const LabeledPoint> points,
                                std::size_t excluded) {
  DecTarget target{model, std::vector<double>(model.k, 0.0)};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i == excluded) continue;
    const std::vector<double> q = soft_assign_row(model, points[i].x);
    for (std::size_t j = 0; j < model.k; ++j) target.column_mass[j] += q[j];
  }
  return target;
}

Eigen::MatrixXd dec_soft_assign(const ClusterModel& model, std::span<const LabeledPoint> points) {
  if (points.empty()) throw ConfigError("dec_soft_assign: no points");
  Eigen::MatrixXd q(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(model.k));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::vector<double> row = soft_assign_row(model, points[i].x);
    for (std::size_t j = 0; j < model.k; ++j) {
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return q;
}

Eigen::MatrixXd dec_target(const Eigen::MatrixXd& q) {
  const Eigen::RowVectorXd f = q.colwise().sum();
  Eigen::MatrixXd p = q.array().square().rowwise() / f.array();
  p = p.array().colwise() / p.rowwise().sum().array();
  return p;
}

double dec_loss(const ClusterModel& model, std::span<const LabeledPoint> points,
                const Eigen::MatrixXd& p) {
  if (points.empty()) return 0.0;
  const Eigen::MatrixXd q = dec_soft_assign(model, points);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (p(i, j) > 0.0) acc += p(i, j) * std::log(p(i, j) / q(i, j));
    }
  }
  return acc / static_cast<double>(q.rows());
}

double nll_loss(const ClusterModel& model, const LabeledPoint& point, const ClassMap& class_map) {
  const NllObjective obj(model.k, model.dim, class_map);
  const Sample s = point;
  return obj.loss(model.to_params(), std::span<const Sample>(&s, 1));
}

DecObjective::DecObjective(DecTarget target)
    : k_(target.snapshot.k), dim_(target.snapshot.dim), target_(std::move(target)) {
  if (k_ < 2) throw ConfigError("DEC needs at least two clusters");
  if (target_.column_mass.size() != k_) throw ConfigError("DEC target has wrong column count");
}

double DecObjective::sample_loss(const ParamVector& p, const Sample& s) const {
  const auto& pt = expect<LabeledPoint>(s);
  return target_loss(kernel(p.values(), k_, dim_, pt.x), target_.row(pt.x));
}

void DecObjective::add_sample_grad(const ParamVector& p, const Sample& s, double w,
                                   std::span<double> out) const {
  const auto& pt = expect<LabeledPoint>(s);
  add_target_grad(p.values(), k_, dim_, pt.x, target_.row(pt.x), w, out);
}

void DecObjective::add_sample_hvp(const ParamVector& p, const Sample& s, const ParamVector& v,
                                  double w, std::span<double> out) const {
  const auto& pt = expect<LabeledPoint>(s);
  add_target_hvp(p.values(), k_, dim_, pt.x, target_.row(pt.x), v.values(), w, out);
}

NllObjective::NllObjective(std::size_t k, std::size_t dim, ClassMap class_map)
    : k_(k), dim_(dim), class_map_(std::move(class_map)) {
  if (class_map_.size() != k_) throw ConfigError("class map must have one entry per cluster");
  for (std::size_t a = 0; a < k_; ++a) {
    for (std::size_t b = a + 1; b < k_; ++b) {
      if (class_map_[a] == class_map_[b]) throw ConfigError("class map is not a bijection");
    }
  }
}

std::size_t NllObjective::cluster_of(int label) const {
  for (std::size_t j = 0; j < k_; ++j) {
    if (class_map_[j] == label) return j;
  }
  throw ConfigError("label " + std::to_string(label) + " has no mapped cluster");
}

std::vector<double> NllObjective::one_hot(int label) const {
  std::vector<double> p(k_, 0.0);
  p[cluster_of(label)] = 1.0;
  return p;
}

double NllObjective::sample_loss(const ParamVector& p, const Sample& s) const {
  const auto& pt = expect<LabeledPoint>(s);
  const Kernel ker = kernel(p.values(), k_, dim_, pt.x);
  return -std::log(ker.q[cluster_of(pt.label)]);
}

void NllObjective::add_sample_grad(const ParamVector& p, const Sample& s, double w,
                                   std::span<double> out) const {
  const auto& pt = expect<LabeledPoint>(s);
  add_target_grad(p.values(), k_, dim_, pt.x, one_hot(pt.label), w, out);
}

void NllObjective::add_sample_hvp(const ParamVector& p, const Sample& s, const ParamVector& v,
                                  double w, std::span<double> out) const {
  const auto& pt = expect<LabeledPoint>(s);
  add_target_hvp(p.values(), k_, dim_, pt.x, one_hot(pt.label), v.values(), w, out);
}

}  // namespace crossloss
