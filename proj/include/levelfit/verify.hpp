#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "levelfit/box.hpp"
#include "levelfit/grid.hpp"
#include "levelfit/moments.hpp"
#include "levelfit/polybasis.hpp"

namespace levelfit {

/// Monte Carlo estimate of vol U(p) = vol{x in B : p(x) >= 1}.
struct VolumeEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::int64_t hits = 0;
};

/// Uniform Philox samples in B; deterministic in (seed, samples) regardless
/// of thread count. Requires samples >= 1000.
VolumeEstimate mc_volume(const Polynomial& p, const BoxDomain& box, std::int64_t samples, std::uint64_t seed);

struct ChebyshevReport {
  double w = 0.0;          // integral of p over B
  double volume = 0.0;     // MC estimate of vol U(p)
  double gap = 0.0;        // w - volume
  bool pass = false;       // w >= volume - 3 sigma
};

ChebyshevReport chebyshev_check(const Polynomial& p, const MomentVector& moments, const VolumeEstimate& volume);

struct ScanResult {
  double min_value = 0.0;
  std::vector<double> argmin;
  std::int64_t points = 0;
  bool negative() const { return min_value < 0.0; }
};

/// Minimum of p over a tensor grid with `points_per_axis` nodes per axis.
ScanResult nonnegativity_scan(const Polynomial& p, const BoxDomain& box, int points_per_axis);

/// Scan resolution used after a fit: 4x refinement of a tensor fit grid
/// (nested), capped at about 4e6 points in total.
int default_scan_points(int dimension, std::optional<int> fit_points_per_axis);

/// Connected components of {p >= 1} on a resolution^n cell grid labelled by
/// p(cell center) >= 1, with face adjacency. n <= 3, resolution >= 64.
int count_components(const Polynomial& p, const BoxDomain& box, int resolution);

struct TraceReport {
  double trace_pm = 0.0;          // trace(P M), canonical Gram P
  double integral = 0.0;          // sum_alpha p_alpha y_alpha
  std::optional<double> trace_orthonormal;  // trace(L^T P L); empty if M is not factorable
  double moment_condition = 0.0;
  bool identity_holds = false;    // |trace_pm - integral| <= 1e-9 (1 + |integral|)
  std::vector<std::string> warnings;
};

/// Trace geometry of a monomial-basis polynomial: the L1 objective equals
/// trace(P M) for any Gram representative P.
TraceReport trace_report(const Polynomial& p, const BoxDomain& box);

/// Relative agreement used for trace identities.
inline bool trace_agrees(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)); }

/// Settings for the post-fit verification suite. Zero means "pick from the
/// fit": scan resolution via default_scan_points, component resolution 512
/// for n <= 2 and 128 for n = 3.
struct VerifyOptions {
  std::int64_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;
  int scan_points = 0;
  int component_resolution = 0;
  std::optional<int> fit_points_per_axis;
};

/// Containment tolerance: min_i p(x_i) >= 1 - kContainmentTolerance.
inline constexpr double kContainmentTolerance = 1e-6;

struct VerificationReport {
  double w = 0.0;
  VolumeEstimate volume;
  ChebyshevReport chebyshev;
  ScanResult scan;
  std::optional<int> components;     // n <= 3 only
  std::optional<TraceReport> trace;  // monomial basis only
  double containment_margin = 0.0;   // min_i p(x_i) - 1
  bool containment_ok = false;
  std::vector<std::string> warnings;
};

/// Runs every check on p against the cloud K and box B.
VerificationReport verify_polynomial(const Polynomial& p, const BoxDomain& box, const Points& cloud,
                                     const VerifyOptions& options);

/// min_i p(x_i) - 1 over the cloud rows.
double containment_margin(const Polynomial& p, const Points& cloud);

/// {w, mc_volume, mc_stderr, cheb_gap, min_scan_value, components, trace_PM, ...}.
nlohmann::json to_json(const VerificationReport& report);

}  // namespace levelfit
