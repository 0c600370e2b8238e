#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "crossloss/cluster_model.hpp"

namespace crossloss {

struct KMeansResult {
  std::vector<double> centroids;  // C x dim, row-major
  std::vector<int> assignments;
  std::size_t iterations = 0;
};

/// k-means++ seeding, then Lloyd iterations until the assignment stops
/// changing or 300 iterations. A run that leaves a cluster empty is reseeded
/// from a fresh stream, at most 10 attempts.
KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t num_clusters,
                    std::uint64_t seed);

/// Mean over points of (b - a) / max(a, b). Points in singleton clusters count 0.
/// Throws DegenerateError when every point is identical, fewer than two
/// clusters are occupied, or every cluster is a singleton.
double silhouette(std::span<const double> points, std::size_t dim, std::span<const int> assignments);

struct ClusterSelection {
  std::size_t best = 0;
  std::map<std::size_t, double> scores;  // C -> silhouette
};

/// k-means for every C in [c_min, c_max]; best C maximizes the silhouette.
ClusterSelection select_clusters(std::span<const double> points, std::size_t dim, std::size_t c_min,
                                 std::size_t c_max, std::uint64_t seed);

struct Bijection {
  ClassMap class_map;  // cluster -> class
  double accuracy = 0.0;
};

/// Cluster -> class bijection maximizing agreement, by exhaustive search.
Bijection best_bijection(std::span<const int> assignments, std::span<const int> labels,
                         std::size_t num_clusters);

/// Hard assignment of each point to its nearest centroid.
std::vector<int> nearest_centroid(const ClusterModel& model, std::span<const LabeledPoint> points);

}  // namespace crossloss
