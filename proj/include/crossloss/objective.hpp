#pragma once

#include <span>
#include <string>
#include <string_view>

#include "crossloss/param_vector.hpp"
#include "crossloss/samples.hpp"

namespace crossloss {

/// A differentiable objective over (parameters, batch of samples).
///
/// Batch values are the arithmetic mean of per-sample terms; an empty batch
/// has loss 0 and a zero gradient. Subclasses provide the per-sample terms and,
/// where derived, an analytic Hessian-vector product. Objectives without one
/// fall back to a central difference of the analytic gradient.
///
/// All methods are const and hold no mutable state.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string_view name() const = 0;
  /// Number of parameters this objective expects.
  virtual std::size_t num_params() const = 0;
  virtual bool has_analytic_hvp() const { return false; }

  double loss(const ParamVector& params, std::span<const Sample> batch) const;
  ParamVector grad(const ParamVector& params, std::span<const Sample> batch) const;
  ParamVector hvp(const ParamVector& params, std::span<const Sample> batch,
                  const ParamVector& v) const;

 protected:
  virtual double sample_loss(const ParamVector& params, const Sample& s) const = 0;
  /// out += weight * grad(sample)
  virtual void add_sample_grad(const ParamVector& params, const Sample& s, double weight,
                               std::span<double> out) const = 0;
  /// out += weight * H(sample) v. Only called when has_analytic_hvp().
  virtual void add_sample_hvp(const ParamVector& params, const Sample& s, const ParamVector& v,
                              double weight, std::span<double> out) const;

  void check_params(const ParamVector& params) const;
  [[noreturn]] void wrong_sample(const Sample& s) const;

  template <class T>
  const T& expect(const Sample& s) const {
    if (const T* p = std::get_if<T>(&s)) return *p;
    wrong_sample(s);
  }
};

/// Central-difference H v from the analytic gradient, step 1e-4/||v||.
ParamVector fd_hvp(const Objective& obj, const ParamVector& params,
                   std::span<const Sample> batch, const ParamVector& v);

/// Central-difference gradient of the batch loss, step `h` per coordinate.
ParamVector fd_grad(const Objective& obj, const ParamVector& params,
                    std::span<const Sample> batch, double h = 1e-5);

/// Largest coordinate-wise relative error |a - f| / max(|a|, |f|, 1e-6)
/// between the analytic and central-difference gradients.
double grad_check(const Objective& obj, const ParamVector& params,
                  std::span<const Sample> batch, double h = 1e-5);

/// Same metric, applied to two arbitrary vectors.
double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor = 1e-6);

}  // namespace crossloss
