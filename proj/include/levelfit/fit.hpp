#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levelfit/box.hpp"
#include "levelfit/grid.hpp"
#include "levelfit/lp.hpp"
#include "levelfit/moments.hpp"
#include "levelfit/polybasis.hpp"
#include "levelfit/verify.hpp"

namespace levelfit {

/// The finite set K, one point per row.
struct PointCloud {
  Points points;

  int dimension() const { return static_cast<int>(points.cols()); }
  Eigen::Index size() const { return points.rows(); }
};

/// LP of the discrete fit: minimize y . v subject to pi(x_i) . v >= 1 for
/// every cloud point and pi(x_j) . v >= 0 for every grid point. Rows are
/// ordered cloud points first, then grid points, each in input order.
LpProblem assemble(const PointCloud& cloud, const Points& grid, const PolyBasis& basis, const MomentVector& moments);

struct FitOptions {
  BasisKind basis = BasisKind::kMonomial;
  std::optional<GridSpec> grid;  // defaults to GridSpec::default_for(n)
  SolverOptions solver;
  /// Box inflation about its center; 1 leaves B unchanged.
  double inflate = 1.0;
  /// Adds |v_k| <= bound rows when set (off by default).
  std::optional<double> coefficient_bound;
  /// Nonnegativity scan resolution; 0 picks default_scan_points.
  int scan_points = 0;
};

enum class FitStatus { kOptimal, kUnbounded, kSolverFailure };

std::string_view to_string(FitStatus status);

struct FitResult {
  FitResult(Polynomial p, BoxDomain b) : polynomial(std::move(p)), box(std::move(b)) {}

  FitStatus status = FitStatus::kSolverFailure;
  std::string message;
  Polynomial polynomial;
  BoxDomain box;            // effective box (after inflation)
  double w = 0.0;           // LP objective, the integral of p over B
  int degree = 0;
  std::int64_t grid_size = 0;
  std::int64_t lp_rows = 0;
  int lp_iterations = 0;
  double containment_margin = 0.0;  // min_i p(x_i) - 1 by direct evaluation
  double min_grid_value = 0.0;      // min of p over the fit grid
  ScanResult scan;                  // finer nonnegativity scan
  std::optional<double> trace_pm;   // monomial basis only
  std::vector<std::string> warnings;

  bool optimal() const { return status == FitStatus::kOptimal; }
  bool contains_cloud() const { return containment_margin >= -kContainmentTolerance; }
};

/// Solves the discrete L1 fit for one degree. Throws std::invalid_argument
/// for malformed input (empty cloud, dimension mismatch, points outside B);
/// solver outcomes are reported through FitResult::status.
FitResult fit(const PointCloud& cloud, const BoxDomain& box, int degree, const FitOptions& options = {});

struct SweepResult {
  std::vector<FitResult> fits;
  /// w_d >= w_d' - 1e-6 for every pair of optimal fits with d < d'.
  bool monotone = true;
};

inline constexpr double kMonotonicityTolerance = 1e-6;

/// Fits each degree (strictly ascending) on the same grid. A failing degree
/// is recorded and the sweep continues.
SweepResult degree_sweep(const PointCloud& cloud, const BoxDomain& box, const std::vector<int>& degrees,
                         const FitOptions& options = {});

/// Fit summary for report.json: status, degree, w, grid and LP sizes,
/// diagnostics and warnings.
nlohmann::json to_json(const FitResult& result);

}  // namespace levelfit
