#include "crossloss/param_vector.hpp"

#include <algorithm>
#include <cmath>

#include "crossloss/errors.hpp"

namespace crossloss {

ParamVector::ParamVector(std::vector<double> values)
    : values_(std::move(values)) {
  segments_.push_back({"params", 0, values_.size()});
}

ParamVector::ParamVector(std::vector<double> values, std::vector<Segment> segments)
    : values_(std::move(values)), segments_(std::move(segments)) {
  std::size_t expected = 0;
  for (const auto& seg : segments_) {
    if (seg.offset != expected) {
      throw ConfigError("segment '" + seg.name + "' does not start where the previous one ends");
    }
    expected += seg.length;
  }
  if (expected != values_.size()) {
    throw ConfigError("segments cover " + std::to_string(expected) + " of " +
                      std::to_string(values_.size()) + " values");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    for (std::size_t j = i + 1; j < segments_.size(); ++j) {
      if (segments_[i].name == segments_[j].name) {
        throw ConfigError("duplicate segment name '" + segments_[i].name + "'");
      }
    }
  }
}

ParamVector ParamVector::zeros_like(const ParamVector& other) {
  ParamVector out;
  out.values_.assign(other.values_.size(), 0.0);
  out.segments_ = other.segments_;
  return out;
}

bool ParamVector::has_segment(std::string_view name) const {
  return std::any_of(segments_.begin(), segments_.end(),
                     [&](const Segment& s) { return s.name == name; });
}

const Segment& ParamVector::segment(std::string_view name) const {
  for (const auto& s : segments_) {
    if (s.name == name) return s;
  }
  throw ConfigError("no segment named '" + std::string(name) + "'");
}

std::span<double> ParamVector::segment_values(std::string_view name) {
  const Segment& s = segment(name);
  return std::span<double>(values_).subspan(s.offset, s.length);
}

std::span<const double> ParamVector::segment_values(std::string_view name) const {
  const Segment& s = segment(name);
  return std::span<const double>(values_).subspan(s.offset, s.length);
}

bool ParamVector::same_layout(const ParamVector& other) const {
  return values_.size() == other.values_.size() && segments_ == other.segments_;
}

void ParamVector::check_layout(const ParamVector& other, const char* op) const {
  if (!same_layout(other)) {
    throw ConfigError(std::string("ParamVector ") + op + ": layouts differ (" +
                      std::to_string(size()) + " vs " + std::to_string(other.size()) + ")");
  }
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  check_layout(other, "+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  check_layout(other, "-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

ParamVector& ParamVector::axpy(double alpha, const ParamVector& x) {
  check_layout(x, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += alpha * x.values_[i];
  return *this;
}

double ParamVector::dot(const ParamVector& other) const {
  check_layout(other, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * other.values_[i];
  return acc;
}

double ParamVector::norm() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return std::sqrt(acc);
}

double ParamVector::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ParamVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void ParamVector::require_finite(std::string_view what) const {
  if (!all_finite()) {
    throw NumericError(std::string(what) + ": non-finite entry in parameter vector");
  }
}

}  // namespace crossloss
