#pragma once

#include <span>
#include <vector>

namespace levelfit {

/// Axis-aligned box B = [l_1,u_1] x ... x [l_n,u_n].
class BoxDomain {
 public:
  BoxDomain(std::vector<double> lower, std::vector<double> upper);

  /// The cube [-1,1]^n.
  static BoxDomain symmetric_unit(int dimension);

  int dimension() const { return static_cast<int>(lower_.size()); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  double width(int axis) const { return upper_[axis] - lower_[axis]; }

  double volume() const;
  bool contains(std::span<const double> x, double slack = 0.0) const;

  /// Scales the box about its center; factor 1 returns an identical box.
  BoxDomain inflated(double factor) const;
  BoxDomain translated(std::span<const double> shift) const;

  bool operator==(const BoxDomain&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

}  // namespace levelfit
