#include "crossloss/objective.hpp"

#include <algorithm>
#include <cmath>

#include "crossloss/errors.hpp"

namespace crossloss {

const char* sample_kind(const Sample& s) {
  struct Visitor {
    const char* operator()(const SkipGramSample&) const { return "SkipGramSample"; }
    const char* operator()(const SentenceSample&) const { return "SentenceSample"; }
    const char* operator()(const LabeledPoint&) const { return "LabeledPoint"; }
    const char* operator()(const WordTarget&) const { return "WordTarget"; }
    const char* operator()(const WholeModel&) const { return "WholeModel"; }
  };
  return std::visit(Visitor{}, s);
}

void Objective::check_params(const ParamVector& params) const {
  if (params.size() != num_params()) {
    throw ConfigError(std::string(name()) + ": expected " + std::to_string(num_params()) +
                      " parameters, got " + std::to_string(params.size()));
  }
}

void Objective::wrong_sample(const Sample& s) const {
  throw SampleTypeError(std::string(name()) + " cannot evaluate a " + sample_kind(s));
}

void Objective::add_sample_hvp(const ParamVector&, const Sample&, const ParamVector&, double,
                               std::span<double>) const {
  throw ConfigError(std::string(name()) + " has no analytic Hessian-vector product");
}

double Objective::loss(const ParamVector& params, std::span<const Sample> batch) const {
  check_params(params);
  if (batch.empty()) return 0.0;
  double acc = 0.0;
  for (const Sample& s : batch) acc += sample_loss(params, s);
  const double value = acc / static_cast<double>(batch.size());
  if (!std::isfinite(value)) {
    throw NumericError(std::string(name()) + ": non-finite loss");
  }
  return value;
}

ParamVector Objective::grad(const ParamVector& params, std::span<const Sample> batch) const {
  check_params(params);
  ParamVector g = ParamVector::zeros_like(params);
  if (batch.empty()) return g;
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const Sample& s : batch) add_sample_grad(params, s, w, g.values());
  g.require_finite(std::string(name()) + " gradient");
  return g;
}

ParamVector Objective::hvp(const ParamVector& params, std::span<const Sample> batch,
                           const ParamVector& v) const {
  check_params(params);
  if (v.size() != params.size()) {
    throw ConfigError(std::string(name()) + ": hvp direction has wrong length");
  }
  if (v.norm() == 0.0) {
    throw NumericError(std::string(name()) + ": hvp direction is the zero vector");
  }
  if (!has_analytic_hvp()) return fd_hvp(*this, params, batch, v);
  ParamVector out = ParamVector::zeros_like(params);
  if (batch.empty()) return out;
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const Sample& s : batch) add_sample_hvp(params, s, v, w, out.values());
  out.require_finite(std::string(name()) + " hvp");
  return out;
}

ParamVector fd_hvp(const Objective& obj, const ParamVector& params,
                   std::span<const Sample> batch, const ParamVector& v) {
  const double vn = v.norm();
  if (vn == 0.0) throw NumericError("fd_hvp: zero direction");
  const double eps = 1e-4 / vn;
  ParamVector plus = params;
  plus.axpy(eps, v);
  ParamVector minus = params;
  minus.axpy(-eps, v);
  ParamVector out = obj.grad(plus, batch);
  out -= obj.grad(minus, batch);
  out *= 1.0 / (2.0 * eps);
  out.require_finite("fd_hvp");
  return out;
}

ParamVector fd_grad(const Objective& obj, const ParamVector& params,
                    std::span<const Sample> batch, double h) {
  ParamVector g = ParamVector::zeros_like(params);
  ParamVector probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = obj.loss(probe, batch);
    probe[i] = orig - h;
    const double down = obj.loss(probe, batch);
    probe[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double max_relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  if (a.size() != b.size()) throw ConfigError("max_relative_error: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

double grad_check(const Objective& obj, const ParamVector& params,
                  std::span<const Sample> batch, double h) {
  const ParamVector analytic = obj.grad(params, batch);
  const ParamVector numeric = fd_grad(obj, params, batch, h);
  return max_relative_error(analytic.values(), numeric.values());
}

}  // namespace crossloss
