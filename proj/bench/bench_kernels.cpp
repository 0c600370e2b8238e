#include <random>

#include <benchmark/benchmark.h>

#include "crossloss/cluster_model.hpp"
#include "crossloss/kernels.hpp"
#include "crossloss/skipgram.hpp"
#include "fixtures.hpp"

using namespace crossloss;
namespace k = crossloss::kernels;

namespace {

struct SkipGramCase {
  SkipGramModel model;
  std::vector<Sample> data;
  ParamVector params;
  ParamVector s;
};

SkipGramCase skipgram_case(std::size_t vocab, std::size_t dim, std::size_t sentences) {
  std::mt19937_64 rng(1);
  SkipGramCase c;
  c.model = fixtures::random_skipgram(rng, vocab, dim, 0.3);
  for (std::size_t i = 0; i < sentences; ++i) {
    SentenceSample s;
    for (int j = 0; j < 12; ++j) s.pairs.push_back(fixtures::random_tuple(rng, vocab, 5));
    c.data.emplace_back(std::move(s));
  }
  c.params = c.model.to_params();
  c.s = ParamVector::zeros_like(c.params);
  for (auto& x : c.s.values()) x = std::uniform_real_distribution<double>(-1, 1)(rng);
  return c;
}

template <bool Parallel>
void BM_AssembleHessian(benchmark::State& state) {
  const auto c = skipgram_case(static_cast<std::size_t>(state.range(0)), 4, 200);
  const SkipGramObjective obj(c.model.layout());
  for (auto _ : state) {
    auto h = Parallel ? k::parallel::assemble_hessian(obj, c.params, c.data)
                      : k::serial::assemble_hessian(obj, c.params, c.data);
    benchmark::DoNotOptimize(h.data());
  }
  state.counters["params"] = static_cast<double>(c.params.size());
}

template <bool Parallel>
void BM_ScoreSamples(benchmark::State& state) {
  const auto c = skipgram_case(200, 16, static_cast<std::size_t>(state.range(0)));
  const SkipGramObjective obj(c.model.layout());
  for (auto _ : state) {
    auto r = Parallel ? k::parallel::score_samples(c.s, obj, c.params, c.data)
                      : k::serial::score_samples(c.s, obj, c.params, c.data);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Silhouette(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  const auto pts = fixtures::uniform_vec(rng, n * 16, -1, 1);
  std::vector<int> assign(n);
  for (auto& a : assign) a = static_cast<int>(rng() % 8);
  for (auto _ : state) {
    auto v = Parallel ? k::parallel::silhouette_values(pts, 16, assign, 8)
                      : k::serial::silhouette_values(pts, 16, assign, 8);
    benchmark::DoNotOptimize(v.data());
  }
}

}  // namespace

BENCHMARK(BM_AssembleHessian<false>)->Name("assemble_hessian/serial")->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleHessian<true>)->Name("assemble_hessian/parallel")->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSamples<false>)->Name("score_samples/serial")->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSamples<true>)->Name("score_samples/parallel")->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Silhouette<false>)->Name("silhouette/serial")->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Silhouette<true>)->Name("silhouette/parallel")->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
