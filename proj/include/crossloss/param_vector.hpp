#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crossloss {

struct Segment {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const Segment&) const = default;
};

/// Flat vector of every trainable parameter, with named contiguous segments.
///
/// Segments are disjoint, ordered by offset, and cover the whole vector.
/// Arithmetic between two vectors requires identical segment maps.
class ParamVector {
 public:
  ParamVector() = default;

  /// One segment named "params" covering all values.
  explicit ParamVector(std::vector<double> values);
  ParamVector(std::vector<double> values, std::vector<Segment> segments);

  static ParamVector zeros_like(const ParamVector& other);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& raw() const noexcept { return values_; }

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  bool has_segment(std::string_view name) const;
  const Segment& segment(std::string_view name) const;
  std::span<double> segment_values(std::string_view name);
  std::span<const double> segment_values(std::string_view name) const;

  bool same_layout(const ParamVector& other) const;

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double scale);
  /// this += alpha * x
  ParamVector& axpy(double alpha, const ParamVector& x);

  double dot(const ParamVector& other) const;
  double norm() const;
  double max_abs() const;
  bool all_finite() const;
  /// Throws NumericError naming `what` if any entry is NaN or Inf.
  void require_finite(std::string_view what) const;

  friend ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
  friend ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
  friend ParamVector operator*(double s, ParamVector a) { return a *= s; }
  friend ParamVector operator*(ParamVector a, double s) { return a *= s; }

 private:
  void check_layout(const ParamVector& other, const char* op) const;

  std::vector<double> values_;
  std::vector<Segment> segments_;
};

}  // namespace crossloss
