#include <cmath>

#include <spdlog/spdlog.h>

#include "crossloss/errors.hpp"
#include "crossloss/training.hpp"

namespace crossloss {

ParamVector finetune(const SkipGramObjective& objective, ParamVector params,
                     std::span<const Sample> dataset, std::span<const std::size_t> sample_ids,
                     FinetuneMode mode, std::size_t steps, double lr) {
  for (std::size_t id : sample_ids) {
    if (id >= dataset.size()) throw ConfigError("finetune: sample id " + std::to_string(id) + " out of range");
  }
  const double direction = mode == FinetuneMode::reinforce ? -1.0 : 1.0;
  for (std::size_t step = 0; step < steps; ++step) {
    for (std::size_t id : sample_ids) {
      params.axpy(direction * lr, objective.grad(params, dataset.subspan(id, 1)));
    }
  }
  params.require_finite("finetune");
  return params;
}

MitigationResult mitigate(const SkipGramModel& model, std::span<const Sample> dataset,
                          const MitigationConfig& mcfg, const SolverConfig& solver) {
  const SkipGramLayout layout = model.layout();
  const SkipGramObjective train_obj(layout);
  const WeatIds ids = to_ids(mcfg.weat, model.vocab);
  const AbsWeatObjective test_obj(layout, ids);
  const Sample whole = WholeModel{};
  const std::span<const Sample> test_batch(&whole, 1);
  auto effect_of = [&](const ParamVector& p) {
    return weat_detail::effect(ids, p.values().subspan(0, layout.table_size()), layout.dim);
  };

  MitigationResult out;
  const ParamVector start = model.to_params();
  out.before = weat_effect(mcfg.weat, EmbeddingView::input_of(model));
  const ParamVector s = stest(test_obj, test_batch, train_obj, start, dataset, solver);
  out.scores = score_all(s, train_obj, start, dataset);
  out.sets = rank_and_split(out.scores, static_cast<std::ptrdiff_t>(mcfg.k_amplifying),
                            static_cast<std::ptrdiff_t>(mcfg.k_mitigating));

  // mitigate: undo A, reinforce M. overbias swaps the roles.
  const bool over = mcfg.mode == MitigationMode::overbias;
  const auto& reversed = over ? out.sets.mitigating : out.sets.amplifying;
  const auto& reinforced = over ? out.sets.amplifying : out.sets.mitigating;

  ParamVector params = start;
  double effect = effect_of(params);
  out.trajectory.push_back({0, effect});
  for (std::size_t it = 1; it <= mcfg.steps; ++it) {
    ParamVector next = finetune(train_obj, params, dataset, reversed, FinetuneMode::reverse, 1, mcfg.finetune_lr);
    next = finetune(train_obj, std::move(next), dataset, reinforced, FinetuneMode::reinforce, 1, mcfg.finetune_lr);
    const double next_effect = effect_of(next);
    out.trajectory.push_back({it, next_effect});
    const bool improved = over ? std::abs(next_effect) > std::abs(effect)
                               : std::abs(next_effect) < std::abs(effect);
    if (mcfg.early_stop && !improved) {
      spdlog::info("{}: |effect| stopped {} at iteration {}; keeping iteration {}",
                   over ? "overbias" : "mitigate", over ? "increasing" : "decreasing", it, it - 1);
      break;
    }
    params = std::move(next);
    effect = next_effect;
  }
  out.model = SkipGramModel::from_params(model.vocab, model.dim, params);
  out.after = weat_effect(mcfg.weat, EmbeddingView::input_of(out.model));
  return out;
}

}  // namespace crossloss
