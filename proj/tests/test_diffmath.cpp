#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "crossloss/cluster_model.hpp"
#include "crossloss/errors.hpp"
#include "crossloss/mse_drift.hpp"
#include "crossloss/quadratic.hpp"
#include "crossloss/skipgram.hpp"
#include "crossloss/weat.hpp"
#include "fixtures.hpp"
#include "instances.hpp"

using namespace crossloss;
using namespace instances;

namespace {

const Sample kWhole = WholeModel{};
std::span<const Sample> whole() { return {&kWhole, 1}; }

QuadraticObjective quad() { return QuadraticObjective::diagonal({2.0, 4.0}); }

class EveryObjective : public ::testing::TestWithParam<Family> {};

}  // namespace

TEST(Diffmath, QuadraticValueGradientHvp) {
  const auto q = quad();
  const ParamVector theta(std::vector<double>{1.0, 1.0});
  EXPECT_DOUBLE_EQ(q.loss(theta, whole()), 3.0);
  const auto g = q.grad(theta, whole());
  EXPECT_DOUBLE_EQ(g[0], 2.0);
  EXPECT_DOUBLE_EQ(g[1], 4.0);
  const auto hv = q.hvp(theta, whole(), ParamVector(std::vector<double>{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(hv[0], 2.0);
  EXPECT_DOUBLE_EQ(hv[1], 0.0);
}

TEST(Diffmath, HvpIsLinearInScale) {
  const auto q = quad();
  const ParamVector theta(std::vector<double>{0.3, -0.7});
  const ParamVector v(std::vector<double>{0.5, 2.0});
  const auto a = q.hvp(theta, whole(), v);
  const auto b = q.hvp(theta, whole(), 3.0 * v);
  EXPECT_DOUBLE_EQ(b[0], 3.0 * a[0]);
  EXPECT_DOUBLE_EQ(b[1], 3.0 * a[1]);
}

TEST(Diffmath, EmptyBatchIsZero) {
  std::mt19937_64 rng(1);
  auto m = fixtures::random_skipgram(rng, 6, 3);
  const SkipGramObjective sg(m.layout());
  const std::vector<Sample> none;
  EXPECT_EQ(sg.loss(m.to_params(), none), 0.0);
  EXPECT_EQ(sg.grad(m.to_params(), none).max_abs(), 0.0);
  EXPECT_EQ(quad().loss(ParamVector(std::vector<double>{1.0, 1.0}), none), 0.0);
}

TEST(Diffmath, SkipGramZeroEmbeddingsHaveZeroLossAndGradient) {
  SkipGramModel m;
  m.vocab = fixtures::numbered_vocab(4);
  m.dim = 3;
  m.input_table.assign(12, 0.0);
  m.output_table.assign(12, 0.0);
  const SkipGramObjective sg(m.layout());
  const Sample s = SkipGramSample{0, 1, {2, 3}};
  EXPECT_EQ(sg.loss(m.to_params(), {&s, 1}), 0.0);
  EXPECT_EQ(sg.grad(m.to_params(), {&s, 1}).max_abs(), 0.0);
}

TEST(Diffmath, ConstantLossGivesZeroGradient) {
  // |WEAT| ignores the output table, so moving only output rows changes nothing.
  std::mt19937_64 rng(2);
  auto m = fixtures::random_skipgram(rng, 14, 4);
  const AbsWeatObjective obj(m.layout(), {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {9, 10, 11}});
  const auto g = obj.grad(m.to_params(), whole());
  for (double x : g.segment_values("output_table")) EXPECT_EQ(x, 0.0);
}

TEST(Diffmath, GradCheckQuadraticIsExact) {
  const ParamVector theta(std::vector<double>{0.37, -1.2});
  EXPECT_LT(grad_check(quad(), theta, whole()), 1e-8);
}

TEST(Diffmath, GradCheckSkipGramDim8Vocab20) {
  std::mt19937_64 rng(3);
  auto m = fixtures::random_skipgram(rng, 20, 8);
  const SkipGramObjective sg(m.layout());
  std::vector<Sample> batch;
  for (int i = 0; i < 6; ++i) batch.emplace_back(fixtures::random_tuple(rng, 20, 3));
  EXPECT_LT(grad_check(sg, m.to_params(), batch), 1e-4);
}

TEST(Diffmath, GradCheckDecTenPointsK3) {
  std::mt19937_64 rng(4);
  const auto pts = fixtures::random_points(rng, 10, 2, 3);
  const auto model = fixtures::random_clusters(rng, 3, 2);
  const DecObjective obj(DecTarget::from_model(model, pts));
  const std::vector<Sample> batch(pts.begin(), pts.end());
  EXPECT_LT(grad_check(obj, model.to_params(), batch), 1e-4);
}

TEST(Diffmath, HvpRejectsZeroAndMismatchedVectors) {
  const auto q = quad();
  const ParamVector theta(std::vector<double>{1.0, 1.0});
  EXPECT_THROW(q.hvp(theta, whole(), ParamVector(std::vector<double>{0.0, 0.0})), NumericError);
  EXPECT_THROW(q.hvp(theta, whole(), ParamVector(std::vector<double>{1.0, 0.0, 0.0})), ConfigError);
}

TEST(Diffmath, NonFiniteResultIsNumericError) {
  const auto q = quad();
  const ParamVector theta(std::vector<double>{std::nan(""), 1.0});
  EXPECT_THROW(q.loss(theta, whole()), NumericError);
}

TEST(Diffmath, WrongSampleKindIsTypedError) {
  const auto q = quad();
  const Sample p = LabeledPoint{{1.0, 2.0}, 0};
  EXPECT_THROW(q.loss(ParamVector(std::vector<double>{1.0, 1.0}), {&p, 1}), SampleTypeError);
}

TEST_P(EveryObjective, GradientMatchesFiniteDifferences100Draws) {
  std::mt19937_64 rng(100);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    auto in = GetParam().make(rng);
    worst = std::max(worst, grad_check(*in.obj, in.params, in.batch));
  }
  EXPECT_LT(worst, 1e-4) << GetParam().name;
}

TEST_P(EveryObjective, HvpMatchesFiniteDifferenceOfGradient) {
  std::mt19937_64 rng(200);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    auto in = GetParam().make(rng);
    const auto v = random_direction(rng, in.params);
    const auto hv = in.obj->hvp(in.params, in.batch, v);
    const auto fd = fd_hvp(*in.obj, in.params, in.batch, v);
    worst = std::max(worst, (hv - fd).norm() / std::max(fd.norm(), 1e-8));
  }
  EXPECT_LT(worst, 1e-3) << GetParam().name;
}

TEST_P(EveryObjective, HvpIsSymmetricAndLinear) {
  std::mt19937_64 rng(300);
  for (int draw = 0; draw < 100; ++draw) {
    auto in = GetParam().make(rng);
    const auto u = random_direction(rng, in.params);
    const auto v = random_direction(rng, in.params);
    const auto hu = in.obj->hvp(in.params, in.batch, u);
    const auto hv = in.obj->hvp(in.params, in.batch, v);
    const double h_scale = std::max(1.0, std::max(hu.norm() / u.norm(), hv.norm() / v.norm()));
    EXPECT_LE(std::abs(u.dot(hv) - v.dot(hu)), 1e-6 * u.norm() * v.norm() * h_scale) << GetParam().name;

    if (in.obj->has_analytic_hvp()) {
      const double alpha = 0.7, beta = -1.3;
      const auto combo = in.obj->hvp(in.params, in.batch, alpha * u + beta * v);
      const auto expected = alpha * hu + beta * hv;
      EXPECT_LE((combo - expected).norm(), 1e-8 * std::max(1.0, expected.norm())) << GetParam().name;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Objectives, EveryObjective,
                         ::testing::Values(Family{"skipgram", skipgram_instance}, Family{"dec", dec_instance},
                                           Family{"nll", nll_instance}, Family{"mse", mse_instance},
                                           Family{"weat", weat_instance}),
                         [](const auto& info) { return std::string(info.param.name); });
