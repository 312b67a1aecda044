#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "levelfit/box.hpp"

namespace levelfit {

/// One point per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> point(const Points& pts, Eigen::Index i) {
  return {pts.row(i).data(), static_cast<std::size_t>(pts.cols())};
}

/// Tensor grid with `points_per_axis` nodes per axis (endpoints included), or
/// `sample_count` Halton points under a random shift modulo 1 drawn from `seed`.
struct GridSpec {
  std::optional<int> points_per_axis;
  std::optional<std::int64_t> sample_count;
  std::uint64_t seed = 0;

  static GridSpec tensor(int points_per_axis) { return GridSpec{points_per_axis, std::nullopt, 0}; }
  static GridSpec quasi_random(std::int64_t samples, std::uint64_t seed) {
    return GridSpec{std::nullopt, samples, seed};
  }
  /// 2001 nodes in 1D, 201^2 in 2D, 10^5 quasi-random points otherwise.
  static GridSpec default_for(int dimension);

  std::int64_t size(int dimension) const;
};

inline constexpr std::int64_t kMaxGridPoints = 10'000'000;

/// Throws std::invalid_argument for malformed specs or grids above
/// kMaxGridPoints. Tensor grids are ordered with the last axis fastest.
Points build_grid(const BoxDomain& box, const GridSpec& spec);

}  // namespace levelfit
