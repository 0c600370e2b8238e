#include "crossloss/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <omp.h>

namespace crossloss::kernels {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

Eigen::VectorXd hessian_column(const Objective& obj, const ParamVector& params,
                               std::span<const Sample> dataset, std::size_t j) {
  ParamVector e = ParamVector::zeros_like(params);
  e[j] = 1.0;
  const ParamVector col = obj.hvp(params, dataset, e);
  return Eigen::Map<const Eigen::VectorXd>(col.values().data(), static_cast<Eigen::Index>(col.size()));
}

double sample_score(const ParamVector& s, const Objective& obj, const ParamVector& params,
                    const Sample& z) {
  return -s.dot(obj.grad(params, std::span<const Sample>(&z, 1)));
}

double point_silhouette(std::span<const double> points, std::size_t dim,
                        std::span<const int> assignments, int num_clusters, std::size_t i) {
  const std::size_t n = assignments.size();
  std::vector<double> sum(static_cast<std::size_t>(num_clusters), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(num_clusters), 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    double d2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double diff = points[i * dim + c] - points[j * dim + c];
      d2 += diff * diff;
    }
    const auto cj = static_cast<std::size_t>(assignments[j]);
    sum[cj] += std::sqrt(d2);
    ++count[cj];
  }
  const auto own = static_cast<std::size_t>(assignments[i]);
  if (count[own] == 0) return 0.0;
  const double a = sum[own] / static_cast<double>(count[own]);
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < sum.size(); ++c) {
    if (c == own || count[c] == 0) continue;
    b = std::min(b, sum[c] / static_cast<double>(count[c]));
  }
  if (!std::isfinite(b)) return 0.0;
  const double denom = std::max(a, b);
  return denom == 0.0 ? 0.0 : (b - a) / denom;
}

}  // namespace

namespace serial {

Eigen::MatrixXd assemble_hessian(const Objective& obj, const ParamVector& params,
                                 std::span<const Sample> dataset) {
  const auto n = static_cast<Eigen::Index>(params.size());
  Eigen::MatrixXd h(n, n);
  for (std::size_t j = 0; j < params.size(); ++j) {
    h.col(static_cast<Eigen::Index>(j)) = hessian_column(obj, params, dataset, j);
  }
  return h;
}

std::vector<double> score_samples(const ParamVector& s, const Objective& obj,
                                  const ParamVector& params, std::span<const Sample> dataset) {
  std::vector<double> scores(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) scores[i] = sample_score(s, obj, params, dataset[i]);
  return scores;
}

std::vector<double> silhouette_values(std::span<const double> points, std::size_t dim,
                                      std::span<const int> assignments, int num_clusters) {
  std::vector<double> out(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    out[i] = point_silhouette(points, dim, assignments, num_clusters, i);
  }
  return out;
}

}  // namespace serial

namespace parallel {

Eigen::MatrixXd assemble_hessian(const Objective& obj, const ParamVector& params,
                                 std::span<const Sample> dataset) {
  const auto n = static_cast<Eigen::Index>(params.size());
  Eigen::MatrixXd h(n, n);
  parallel_for(params.size(), [&](std::size_t j) {
    h.col(static_cast<Eigen::Index>(j)) = hessian_column(obj, params, dataset, j);
  });
  return h;
}

std::vector<double> score_samples(const ParamVector& s, const Objective& obj,
                                  const ParamVector& params, std::span<const Sample> dataset) {
  std::vector<double> scores(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t i) { scores[i] = sample_score(s, obj, params, dataset[i]); });
  return scores;
}

std::vector<double> silhouette_values(std::span<const double> points, std::size_t dim,
                                      std::span<const int> assignments, int num_clusters) {
  std::vector<double> out(assignments.size());
  parallel_for(assignments.size(), [&](std::size_t i) {
    out[i] = point_silhouette(points, dim, assignments, num_clusters, i);
  });
  return out;
}

}  // namespace parallel

}  // namespace crossloss::kernels
