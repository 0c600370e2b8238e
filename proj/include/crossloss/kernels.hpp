#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "crossloss/objective.hpp"

namespace crossloss::kernels {

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs.
/// The exception thrown by the lowest failing index is rethrown after the loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Reference implementations. Single-threaded, kept for testing the
/// parallel versions and for benchmarking against them.
namespace serial {

/// Dense Hessian of the batch-mean loss, column j = H e_j.
Eigen::MatrixXd assemble_hessian(const Objective& obj, const ParamVector& params,
                                 std::span<const Sample> dataset);

/// score_i = -<s, grad L(z_i)> for every sample.
std::vector<double> score_samples(const ParamVector& s, const Objective& obj,
                                  const ParamVector& params, std::span<const Sample> dataset);

/// Per-point silhouette (b - a) / max(a, b); singleton clusters score 0.
std::vector<double> silhouette_values(std::span<const double> points, std::size_t dim,
                                      std::span<const int> assignments, int num_clusters);

}  // namespace serial

/// OpenMP versions. Every output element is computed by exactly one
/// iteration, so results are identical to the serial reference.
namespace parallel {

Eigen::MatrixXd assemble_hessian(const Objective& obj, const ParamVector& params,
                                 std::span<const Sample> dataset);

std::vector<double> score_samples(const ParamVector& s, const Objective& obj,
                                  const ParamVector& params, std::span<const Sample> dataset);

std::vector<double> silhouette_values(std::span<const double> points, std::size_t dim,
                                      std::span<const int> assignments, int num_clusters);

}  // namespace parallel

}  // namespace crossloss::kernels
