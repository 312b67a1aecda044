#include "levelfit/box.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace levelfit {

BoxDomain::BoxDomain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty()) throw std::invalid_argument("box must have at least one axis");
  if (lower_.size() != upper_.size())
    throw std::invalid_argument("box lower/upper length mismatch");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
      throw std::invalid_argument("box bounds must be finite (axis " + std::to_string(i) + ")");
    if (!(lower_[i] < upper_[i]))
      throw std::invalid_argument("box axis " + std::to_string(i) + " has lower >= upper");
  }
}

BoxDomain BoxDomain::symmetric_unit(int dimension) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  return BoxDomain(std::vector<double>(dimension, -1.0), std::vector<double>(dimension, 1.0));
}

double BoxDomain::volume() const {
  double v = 1.0;
  for (int i = 0; i < dimension(); ++i) v *= width(i);
  return v;
}

bool BoxDomain::contains(std::span<const double> x, double slack) const {
  if (static_cast<int>(x.size()) != dimension()) return false;
  for (int i = 0; i < dimension(); ++i) {
    if (x[i] < lower_[i] - slack || x[i] > upper_[i] + slack) return false;
  }
  return true;
}

BoxDomain BoxDomain::inflated(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("inflation factor must be positive");
  if (factor == 1.0) return *this;
  std::vector<double> lo(lower_), hi(upper_);
  for (int i = 0; i < dimension(); ++i) {
    const double center = 0.5 * (lower_[i] + upper_[i]);
    const double half = 0.5 * width(i) * factor;
    lo[i] = center - half;
    hi[i] = center + half;
  }
  return BoxDomain(std::move(lo), std::move(hi));
}

BoxDomain BoxDomain::translated(std::span<const double> shift) const {
  if (static_cast<int>(shift.size()) != dimension())
    throw std::invalid_argument("translation dimension mismatch");
  std::vector<double> lo(lower_), hi(upper_);
  for (int i = 0; i < dimension(); ++i) {
    lo[i] += shift[i];
    hi[i] += shift[i];
  }
  return BoxDomain(std::move(lo), std::move(hi));
}

}  // namespace levelfit
