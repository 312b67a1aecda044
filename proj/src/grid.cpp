#include "levelfit/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "levelfit/random.hpp"

namespace levelfit {
namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t i, int base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  while (i > 0) {
    result += static_cast<double>(i % static_cast<std::uint64_t>(base)) * factor;
    i /= static_cast<std::uint64_t>(base);
    factor *= inv_base;
  }
  return result;
}

}  // namespace

GridSpec GridSpec::default_for(int dimension) {
  if (dimension == 1) return tensor(2001);
  if (dimension == 2) return tensor(201);
  return quasi_random(100'000, 0);
}

std::int64_t GridSpec::size(int dimension) const {
  if (points_per_axis) {
    double total = std::pow(static_cast<double>(*points_per_axis), dimension);
    if (total > static_cast<double>(kMaxGridPoints) * 10) return kMaxGridPoints * 10;
    return static_cast<std::int64_t>(std::llround(total));
  }
  return sample_count.value_or(0);
}

Points build_grid(const BoxDomain& box, const GridSpec& spec) {
  const int n = box.dimension();
  if (spec.points_per_axis.has_value() == spec.sample_count.has_value())
    throw std::invalid_argument("grid spec needs exactly one of points_per_axis and sample_count");
  const std::int64_t total = spec.size(n);
  if (total > kMaxGridPoints) {
    throw std::invalid_argument("grid of " + std::to_string(total) + " points exceeds the limit of " +
                                std::to_string(kMaxGridPoints) +
                                "; use fewer points per axis or quasi-random sampling (--grid-samples)");
  }

  if (spec.points_per_axis) {
    const int per_axis = *spec.points_per_axis;
    if (per_axis < 2) throw std::invalid_argument("points_per_axis must be >= 2");
    std::vector<std::vector<double>> nodes(static_cast<std::size_t>(n));
    for (int axis = 0; axis < n; ++axis) {
      auto& line = nodes[static_cast<std::size_t>(axis)];
      line.resize(static_cast<std::size_t>(per_axis));
      for (int k = 0; k < per_axis; ++k) {
        line[static_cast<std::size_t>(k)] = box.lower(axis) + (box.width(axis) * k) / (per_axis - 1);
      }
      line.back() = box.upper(axis);
    }
    Points pts(total, n);
    std::vector<int> digit(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < total; ++i) {
      for (int axis = 0; axis < n; ++axis) pts(i, axis) = nodes[axis][digit[axis]];
      for (int axis = n - 1; axis >= 0; --axis) {
        if (++digit[axis] < per_axis) break;
        digit[axis] = 0;
      }
    }
    return pts;
  }

  if (total < 1) throw std::invalid_argument("sample_count must be >= 1");
  if (n > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("quasi-random grid supports n <= 16");
  std::vector<double> shift(static_cast<std::size_t>(n));
  for (int axis = 0; axis < n; ++axis) shift[axis] = uniform_coordinate(spec.seed, 0x6772696400ull, 0, axis);
  Points pts(total, n);
  for (std::int64_t i = 0; i < total; ++i) {
    for (int axis = 0; axis < n; ++axis) {
      double u = radical_inverse(static_cast<std::uint64_t>(i + 1), kPrimes[axis]) + shift[axis];
      if (u >= 1.0) u -= 1.0;
      pts(i, axis) = box.lower(axis) + box.width(axis) * u;
    }
  }
  return pts;
}

}  // namespace levelfit
