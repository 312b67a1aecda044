#include "levelfit/verify.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "levelfit/format.hpp"
#include "levelfit/grid.hpp"
#include "levelfit/parallel.hpp"
#include "levelfit/random.hpp"

namespace levelfit {
namespace {

constexpr std::uint64_t kVolumeStream = 0x766f6cull;

// Evaluates p at the cell centers of a resolution^n grid, last axis fastest.
std::vector<std::uint8_t> label_cells(const Polynomial& p, const BoxDomain& box, int resolution) {
  const int n = box.dimension();
  std::size_t total = 1;
  for (int axis = 0; axis < n; ++axis) total *= static_cast<std::size_t>(resolution);
  std::vector<std::uint8_t> inside(total, 0);
  parallel_chunks(total, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<double> x(static_cast<std::size_t>(n));
    Eigen::VectorXd values(static_cast<Eigen::Index>(p.basis().size()));
    std::span<double> out(values.data(), p.basis().size());
    for (std::size_t cell = begin; cell < end; ++cell) {
      std::size_t rest = cell;
      for (int axis = n - 1; axis >= 0; --axis) {
        const auto k = static_cast<double>(rest % static_cast<std::size_t>(resolution));
        rest /= static_cast<std::size_t>(resolution);
        x[axis] = box.lower(axis) + box.width(axis) * (k + 0.5) / resolution;
      }
      p.basis().evaluate(x, out);
      inside[cell] = p.coeffs().dot(values) >= 1.0 ? 1 : 0;
    }
  }, 1024);
  return inside;
}

}  // namespace

VolumeEstimate mc_volume(const Polynomial& p, const BoxDomain& box, std::int64_t samples, std::uint64_t seed) {
  if (samples < 1000) throw std::invalid_argument("mc_volume: need at least 1000 samples");
  if (box.dimension() != p.dimension()) throw std::invalid_argument("mc_volume: dimension mismatch");
  const int n = box.dimension();
  std::vector<std::int64_t> partial(max_parallel_chunks(), 0);
  parallel_chunks(static_cast<std::size_t>(samples), [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    std::vector<double> x(static_cast<std::size_t>(n));
    Eigen::VectorXd values(static_cast<Eigen::Index>(p.basis().size()));
    std::span<double> out(values.data(), p.basis().size());
    std::int64_t hits = 0;
    for (std::size_t i = begin; i < end; ++i) {
      for (int axis = 0; axis < n; ++axis) {
        x[axis] = box.lower(axis) + box.width(axis) * uniform_coordinate(seed, kVolumeStream, i, axis);
      }
      p.basis().evaluate(x, out);
      if (p.coeffs().dot(values) >= 1.0) ++hits;
    }
    partial[chunk] = hits;
  });
  VolumeEstimate est;
  est.samples = samples;
  est.seed = seed;
  for (auto h : partial) est.hits += h;
  const double fraction = static_cast<double>(est.hits) / static_cast<double>(samples);
  est.estimate = fraction * box.volume();
  est.standard_error = std::sqrt(fraction * (1.0 - fraction) / static_cast<double>(samples)) * box.volume();
  return est;
}

ChebyshevReport chebyshev_check(const Polynomial& p, const MomentVector& moments, const VolumeEstimate& volume) {
  ChebyshevReport report;
  report.w = moments.integrate(p);
  report.volume = volume.estimate;
  report.gap = report.w - volume.estimate;
  report.pass = report.w >= volume.estimate - 3.0 * volume.standard_error;
  return report;
}

ScanResult nonnegativity_scan(const Polynomial& p, const BoxDomain& box, int points_per_axis) {
  if (box.dimension() != p.dimension()) throw std::invalid_argument("nonnegativity_scan: dimension mismatch");
  const Points grid = build_grid(box, GridSpec::tensor(points_per_axis));
  const auto count = static_cast<std::size_t>(grid.rows());
  std::vector<std::pair<double, std::size_t>> partial(max_parallel_chunks(),
                                                      {std::numeric_limits<double>::infinity(), 0});
  parallel_chunks(count, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    Eigen::VectorXd values(static_cast<Eigen::Index>(p.basis().size()));
    std::span<double> out(values.data(), p.basis().size());
    auto best = std::make_pair(std::numeric_limits<double>::infinity(), begin);
    for (std::size_t i = begin; i < end; ++i) {
      p.basis().evaluate(point(grid, static_cast<Eigen::Index>(i)), out);
      const double v = p.coeffs().dot(values);
      if (v < best.first) best = {v, i};
    }
    partial[chunk] = best;
  });
  // Lowest value, earliest index on ties.
  auto best = partial.front();
  for (const auto& candidate : partial) {
    if (candidate.first < best.first || (candidate.first == best.first && candidate.second < best.second))
      best = candidate;
  }
  ScanResult result;
  result.min_value = best.first;
  result.points = grid.rows();
  const auto row = point(grid, static_cast<Eigen::Index>(best.second));
  result.argmin.assign(row.begin(), row.end());
  return result;
}

int default_scan_points(int dimension, std::optional<int> fit_points_per_axis) {
  const int cap = static_cast<int>(std::floor(std::pow(4e6, 1.0 / dimension)));
  int base = fit_points_per_axis ? 4 * (*fit_points_per_axis - 1) + 1
                                 : 4 * static_cast<int>(std::ceil(std::pow(1e5, 1.0 / dimension)));
  return std::max(2, std::min(base, cap));
}

int count_components(const Polynomial& p, const BoxDomain& box, int resolution) {
  const int n = box.dimension();
  if (n > 3) throw std::invalid_argument("count_components supports n <= 3");
  if (resolution < 64) throw std::invalid_argument("count_components: resolution must be >= 64");
  if (p.dimension() != n) throw std::invalid_argument("count_components: dimension mismatch");
  const std::vector<std::uint8_t> inside = label_cells(p, box, resolution);

  if (n == 1) {
    int runs = 0;
    for (std::size_t i = 0; i < inside.size(); ++i) {
      if (inside[i] && (i == 0 || !inside[i - 1])) ++runs;
    }
    return runs;
  }

  const auto res = static_cast<std::size_t>(resolution);
  std::vector<std::size_t> stride(static_cast<std::size_t>(n), 1);
  for (int axis = n - 2; axis >= 0; --axis) stride[axis] = stride[axis + 1] * res;

  std::vector<std::uint8_t> seen(inside.size(), 0);
  std::vector<std::size_t> stack;
  int components = 0;
  for (std::size_t start = 0; start < inside.size(); ++start) {
    if (!inside[start] || seen[start]) continue;
    ++components;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t cell = stack.back();
      stack.pop_back();
      for (int axis = 0; axis < n; ++axis) {
        const std::size_t coord = (cell / stride[axis]) % res;
        if (coord > 0) {
          const std::size_t nb = cell - stride[axis];
          if (inside[nb] && !seen[nb]) {
            seen[nb] = 1;
            stack.push_back(nb);
          }
        }
        if (coord + 1 < res) {
          const std::size_t nb = cell + stride[axis];
          if (inside[nb] && !seen[nb]) {
            seen[nb] = 1;
            stack.push_back(nb);
          }
        }
      }
    }
  }
  return components;
}

TraceReport trace_report(const Polynomial& p, const BoxDomain& box) {
  if (p.basis().kind() != BasisKind::kMonomial) throw std::invalid_argument("trace_report: monomial basis required");
  TraceReport report;
  const GramMatrix gram = poly_to_gram(p);
  const MomentMatrix moments = moment_matrix(gram.basis, box);
  long double trace = 0.0L;
  for (Eigen::Index j = 0; j < gram.entries.cols(); ++j) {
    for (Eigen::Index i = 0; i < gram.entries.rows(); ++i)
      trace += static_cast<long double>(gram.entries(i, j)) * moments.entries(i, j);
  }
  report.trace_pm = static_cast<double>(trace);
  report.integral = moment_vector(p.basis(), box).integrate(p);
  report.moment_condition = moments.condition_number();
  report.identity_holds = trace_agrees(report.trace_pm, report.integral);
  if (report.moment_condition > kMomentConditionWarning) {
    report.warnings.push_back("moment matrix condition number " + std::to_string(report.moment_condition) +
                              " exceeds 1e12; the chebyshev basis is better conditioned at this degree");
  }
  try {
    const Orthonormalizer ortho = orthonormalize(moments);
    report.trace_orthonormal = ortho.transform_gram(gram.entries).trace();
  } catch (const NumericalError& e) {
    report.warnings.emplace_back(e.what());
  }
  return report;
}

double containment_margin(const Polynomial& p, const Points& cloud) {
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < cloud.rows(); ++i) margin = std::min(margin, p(point(cloud, i)) - 1.0);
  return margin;
}

VerificationReport verify_polynomial(const Polynomial& p, const BoxDomain& box, const Points& cloud,
                                     const VerifyOptions& options) {
  const int n = box.dimension();
  if (p.dimension() != n || cloud.cols() != n) throw std::invalid_argument("verify: dimension mismatch");
  VerificationReport report;
  const MomentVector moments = moment_vector(p.basis(), box);
  report.w = moments.integrate(p);
  report.containment_margin = containment_margin(p, cloud);
  report.containment_ok = report.containment_margin >= -kContainmentTolerance;

  report.volume = mc_volume(p, box, options.mc_samples, options.seed);
  report.chebyshev = chebyshev_check(p, moments, report.volume);

  const int scan_points =
      options.scan_points > 0 ? options.scan_points : default_scan_points(n, options.fit_points_per_axis);
  report.scan = nonnegativity_scan(p, box, scan_points);
  if (report.scan.negative()) {
    report.warnings.push_back("p dips below zero on the scan grid (min " + format_double(report.scan.min_value) +
                              "); the Chebyshev volume bound is not certified");
  }
  if (!report.chebyshev.pass) report.warnings.push_back("Chebyshev bound check failed beyond 3 standard errors");

  if (n <= 3) {
    const int resolution = options.component_resolution > 0 ? options.component_resolution : (n <= 2 ? 512 : 128);
    report.components = count_components(p, box, resolution);
  }
  if (p.basis().kind() == BasisKind::kMonomial) {
    report.trace = trace_report(p, box);
    for (const auto& w : report.trace->warnings) report.warnings.push_back(w);
  }
  return report;
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json j;
  j["w"] = report.w;
  j["mc_volume"] = report.volume.estimate;
  j["mc_stderr"] = report.volume.standard_error;
  j["mc_samples"] = report.volume.samples;
  j["mc_seed"] = report.volume.seed;
  j["cheb_gap"] = report.chebyshev.gap;
  j["cheb_pass"] = report.chebyshev.pass;
  j["min_scan_value"] = report.scan.min_value;
  j["min_scan_argmin"] = report.scan.argmin;
  j["scan_points"] = report.scan.points;
  j["components"] = report.components ? nlohmann::json(*report.components) : nlohmann::json(nullptr);
  if (report.trace) {
    j["trace_PM"] = report.trace->trace_pm;
    j["trace_identity_holds"] = report.trace->identity_holds;
    j["trace_orthonormal"] =
        report.trace->trace_orthonormal ? nlohmann::json(*report.trace->trace_orthonormal) : nlohmann::json(nullptr);
    j["moment_condition"] = report.trace->moment_condition;
  } else {
    j["trace_PM"] = nullptr;
  }
  j["containment_margin"] = report.containment_margin;
  j["containment_ok"] = report.containment_ok;
  j["warnings"] = report.warnings;
  return j;
}

}  // namespace levelfit
