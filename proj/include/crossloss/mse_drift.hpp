#pragma once

#include <vector>

#include "crossloss/objective.hpp"
#include "crossloss/skipgram.hpp"

namespace crossloss {

/// Mean squared distance between a word's input row and where that row was
/// initialized. Evaluated on WordTarget samples; zero on the output table.
class MseDriftObjective final : public Objective {
 public:
  MseDriftObjective(SkipGramLayout layout, std::vector<double> initial_input_table);

  std::string_view name() const override { return "mse"; }
  std::size_t num_params() const override { return layout_.num_params(); }
  bool has_analytic_hvp() const override { return true; }

 protected:
  double sample_loss(const ParamVector& p, const Sample& s) const override;
  void add_sample_grad(const ParamVector& p, const Sample& s, double w,
                       std::span<double> out) const override;
  void add_sample_hvp(const ParamVector& p, const Sample& s, const ParamVector& v, double w,
                      std::span<double> out) const override;

 private:
  WordId checked(const Sample& s) const;

  SkipGramLayout layout_;
  std::vector<double> initial_;
};

/// Drift of `word` in `model` away from `initial_input_table`.
double mse_drift_loss(const std::vector<double>& initial_input_table, const SkipGramModel& model,
                      std::string_view word);

}  // namespace crossloss
