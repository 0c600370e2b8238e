#pragma once

#include <vector>

#include "crossloss/errors.hpp"
#include "crossloss/objective.hpp"

namespace crossloss {

/// f(theta) = 0.5 theta^T A theta - b^T theta with symmetric dense A.
/// Evaluated on WholeModel samples. Used as an exactly solvable reference.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(std::size_t n, std::vector<double> a_row_major, std::vector<double> b = {})
      : n_(n), a_(std::move(a_row_major)), b_(std::move(b)) {
    if (a_.size() != n_ * n_) throw ConfigError("QuadraticObjective: A must be n x n");
    if (b_.empty()) b_.assign(n_, 0.0);
    if (b_.size() != n_) throw ConfigError("QuadraticObjective: b must have n entries");
  }

  static QuadraticObjective diagonal(const std::vector<double>& diag) {
    const std::size_t n = diag.size();
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = diag[i];
    return QuadraticObjective(n, std::move(a));
  }

  std::string_view name() const override { return "quadratic"; }
  std::size_t num_params() const override { return n_; }
  bool has_analytic_hvp() const override { return true; }

 protected:
  double sample_loss(const ParamVector& p, const Sample& s) const override {
    expect<WholeModel>(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n_; ++j) row += a_[i * n_ + j] * p[j];
      acc += 0.5 * p[i] * row - b_[i] * p[i];
    }
    return acc;
  }

  void add_sample_grad(const ParamVector& p, const Sample& s, double w,
                       std::span<double> out) const override {
    expect<WholeModel>(s);
    for (std::size_t i = 0; i < n_; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n_; ++j) row += a_[i * n_ + j] * p[j];
      out[i] += w * (row - b_[i]);
    }
  }

  void add_sample_hvp(const ParamVector&, const Sample& s, const ParamVector& v, double w,
                      std::span<double> out) const override {
    expect<WholeModel>(s);
    for (std::size_t i = 0; i < n_; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n_; ++j) row += a_[i * n_ + j] * v[j];
      out[i] += w * row;
    }
  }

 private:
  std::size_t n_;
  std::vector<double> a_;
  std::vector<double> b_;
};

}  // namespace crossloss
