#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crossloss/objective.hpp"

namespace crossloss {

/// Stochastic inverse-HVP settings. The recursion contracts when every
/// eigenvalue of (H + damping I) lies in (0, scale).
struct LissaConfig {
  std::size_t depth = 5000;
  double damping = 0.01;
  double scale = 10.0;
  std::size_t repeats = 4;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SolverKind { lissa, direct };

struct SolverConfig {
  SolverKind kind = SolverKind::lissa;
  LissaConfig lissa;  // damping is shared by both solvers
};

struct InfluenceRecord {
  std::size_t sample_id = 0;
  double score = 0.0;
};

struct InfluenceSets {
  std::vector<std::size_t> amplifying;  // highest positive scores first
  std::vector<std::size_t> mitigating;  // most negative scores first
  bool truncated = false;               // fewer qualifying samples than requested
};

/// Largest parameter count ihvp_direct accepts.
inline constexpr std::size_t kDirectSolveLimit = 2000;

/// (H + damping I)^-1 v with H the explicit full-dataset Hessian, assembled
/// column by column from hvp and solved by Cholesky.
ParamVector ihvp_direct(const Objective& train_obj, const ParamVector& params,
                        std::span<const Sample> dataset, const ParamVector& v, double damping);

/// LiSSA estimate of (H + damping I)^-1 v:
///   h_0 = v,  h_t = v + h_{t-1} - (H_b h_{t-1} + damping h_{t-1}) / scale
/// with H_b the HVP on a batch drawn uniformly with replacement, averaged
/// over `repeats` independent chains of h_T / scale. When batch_size is at
/// least the dataset size the whole dataset is used every step.
ParamVector ihvp_lissa(const Objective& train_obj, const ParamVector& params,
                       std::span<const Sample> dataset, const ParamVector& v,
                       const LissaConfig& cfg);

ParamVector solve_ihvp(const Objective& train_obj, const ParamVector& params,
                       std::span<const Sample> dataset, const ParamVector& v,
                       const SolverConfig& solver);

/// s = (H_train + damping I)^-1 grad L'(test_batch). Computed once, then
/// reused to score every training sample.
ParamVector stest(const Objective& test_obj, std::span<const Sample> test_batch,
                  const Objective& train_obj, const ParamVector& params,
                  std::span<const Sample> dataset, const SolverConfig& solver);

/// dL'/d(epsilon) of upweighting z: -<s, grad L_train(z)>. Positive means
/// upweighting z raises the test loss.
double score_sample(const ParamVector& s, const Objective& train_obj, const ParamVector& params,
                    const Sample& z);

/// Scores every training sample (parallel over samples).
std::vector<InfluenceRecord> score_all(const ParamVector& s, const Objective& train_obj,
                                       const ParamVector& params, std::span<const Sample> dataset);

/// Top k_amplifying positive and top k_mitigating negative scores. Ties go
/// to the lower sample id.
InfluenceSets rank_and_split(std::span<const InfluenceRecord> records, std::ptrdiff_t k_amplifying,
                             std::ptrdiff_t k_mitigating);

/// Predicted change in the test loss if the sample were removed (epsilon = -1/N).
double predict_removal_delta(double score, std::size_t n);

}  // namespace crossloss
