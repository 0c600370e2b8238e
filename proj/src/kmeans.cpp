#include "crossloss/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "crossloss/errors.hpp"
#include "crossloss/kernels.hpp"

namespace crossloss {

namespace {

constexpr std::size_t kMaxIterations = 300;
constexpr std::size_t kMaxAttempts = 10;

double sq_dist(const double* a, const double* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t c = 0; c < d; ++c) acc += (a[c] - b[c]) * (a[c] - b[c]);
  return acc;
}

/// One seeded k-means run. Returns false if a cluster ended up empty.
bool lloyd(std::span<const double> pts, std::size_t dim, std::size_t k, std::mt19937_64& rng,
           KMeansResult& out) {
  const std::size_t n = pts.size() / dim;
  out.centroids.assign(k * dim, 0.0);
  out.assignments.assign(n, -1);

  // k-means++ seeding
  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  std::copy_n(pts.data() + first * dim, dim, out.centroids.data());
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], sq_dist(pts.data() + i * dim, out.centroids.data() + (c - 1) * dim, dim));
      total += best[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick + 1 < n; ++pick) {
        u -= best[pick];
        if (u < 0.0) break;
      }
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
    std::copy_n(pts.data() + pick * dim, dim, out.centroids.data() + c * dim);
  }

  for (out.iterations = 0; out.iterations < kMaxIterations; ++out.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int arg = 0;
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = sq_dist(pts.data() + i * dim, out.centroids.data() + c * dim, dim);
        if (dd < dmin) {
          dmin = dd;
          arg = static_cast<int>(c);
        }
      }
      if (out.assignments[i] != arg) {
        out.assignments[i] = arg;
        changed = true;
      }
    }
    std::vector<std::size_t> count(k, 0);
    std::fill(out.centroids.begin(), out.centroids.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(out.assignments[i]);
      ++count[c];
      for (std::size_t j = 0; j < dim; ++j) out.centroids[c * dim + j] += pts[i * dim + j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) return false;
      for (std::size_t j = 0; j < dim; ++j) out.centroids[c * dim + j] /= static_cast<double>(count[c]);
    }
    if (!changed) break;
  }
  return true;
}

}  // namespace

KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t num_clusters,
                    std::uint64_t seed) {
  if (dim == 0 || points.size() % dim != 0) throw ConfigError("kmeans: points do not match dim");
  const std::size_t n = points.size() / dim;
  if (num_clusters < 2) throw ConfigError("kmeans needs at least two clusters");
  if (n <= num_clusters) throw ConfigError("kmeans needs more points than clusters");
  KMeansResult result;
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(attempt)};
    std::mt19937_64 rng(seq);
    if (lloyd(points, dim, num_clusters, rng, result)) return result;
  }
  throw DegenerateError("kmeans left a cluster empty after " + std::to_string(kMaxAttempts) + " attempts");
}

double silhouette(std::span<const double> points, std::size_t dim, std::span<const int> assignments) {
  const std::size_t n = assignments.size();
  if (dim == 0 || points.size() != n * dim) throw ConfigError("silhouette: points do not match assignments");
  if (n < 2) throw DegenerateError("silhouette needs at least two points");
  bool all_same = true;
  for (std::size_t i = 1; i < n && all_same; ++i) {
    all_same = std::equal(points.begin() + static_cast<std::ptrdiff_t>(i * dim),
                          points.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim), points.begin());
  }
  if (all_same) throw DegenerateError("silhouette undefined: all points identical");
  const int num_clusters = *std::max_element(assignments.begin(), assignments.end()) + 1;
  std::vector<std::size_t> sizes(static_cast<std::size_t>(num_clusters), 0);
  for (int a : assignments) {
    if (a < 0) throw ConfigError("silhouette: negative cluster id");
    ++sizes[static_cast<std::size_t>(a)];
  }
  const auto occupied = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });
  if (occupied < 2) throw DegenerateError("silhouette undefined: fewer than two clusters");
  if (std::all_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s <= 1; })) {
    throw DegenerateError("silhouette undefined: every cluster is a singleton");
  }
  const auto values = kernels::parallel::silhouette_values(points, dim, assignments, num_clusters);
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
}

ClusterSelection select_clusters(std::span<const double> points, std::size_t dim, std::size_t c_min,
                                 std::size_t c_max, std::uint64_t seed) {
  if (c_min < 2 || c_max < c_min) throw ConfigError("cluster range must satisfy 2 <= min <= max");
  const std::size_t n = dim == 0 ? 0 : points.size() / dim;
  if (c_max >= n) throw ConfigError("cluster range exceeds the number of points");
  ClusterSelection sel;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = c_min; c <= c_max; ++c) {
    const KMeansResult km = kmeans(points, dim, c, seed);
    const double s = silhouette(points, dim, km.assignments);
    sel.scores[c] = s;
    if (s > best) {
      best = s;
      sel.best = c;
    }
  }
  return sel;
}

Bijection best_bijection(std::span<const int> assignments, std::span<const int> labels,
                         std::size_t num_clusters) {
  if (assignments.size() != labels.size()) throw ConfigError("best_bijection: length mismatch");
  if (num_clusters > 8) throw ConfigError("exhaustive cluster matching supports at most 8 clusters");
  const std::size_t k = num_clusters;
  std::vector<std::size_t> agree(k * k, 0);  // [cluster][class]
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) {
      throw ConfigError("label " + std::to_string(labels[i]) + " outside 0.." + std::to_string(k - 1));
    }
    ++agree[static_cast<std::size_t>(assignments[i]) * k + static_cast<std::size_t>(labels[i])];
  }
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Bijection best;
  std::size_t best_hits = 0;
  bool first = true;
  do {
    std::size_t hits = 0;
    for (std::size_t c = 0; c < k; ++c) hits += agree[c * k + static_cast<std::size_t>(perm[c])];
    if (first || hits > best_hits) {
      best_hits = hits;
      best.class_map = perm;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.accuracy = labels.empty() ? 0.0 : static_cast<double>(best_hits) / static_cast<double>(labels.size());
  return best;
}

std::vector<int> nearest_centroid(const ClusterModel& model, std::span<const LabeledPoint> points) {
  std::vector<int> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    int arg = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < model.k; ++j) {
      const double dd = sq_dist(p.x.data(), model.centroids.data() + j * model.dim, model.dim);
      if (dd < dmin) {
        dmin = dd;
        arg = static_cast<int>(j);
      }
    }
    out.push_back(arg);
  }
  return out;
}

}  // namespace crossloss
