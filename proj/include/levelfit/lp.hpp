#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace levelfit {

/// Where an LP row came from; kept for reporting and MPS row naming.
enum class RowOrigin : std::uint8_t { kCloudPoint, kGridPoint, kCoefficientBound, kGeneric };

/// min c^T v  s.t.  A v >= b, v free.
struct LpProblem {
  Eigen::VectorXd objective;    // c, one entry per column
  Eigen::MatrixXd rows;         // A, one row per constraint
  Eigen::VectorXd lower;        // b
  std::vector<RowOrigin> origin;

  Eigen::Index num_rows() const { return rows.rows(); }
  Eigen::Index num_cols() const { return rows.cols(); }

  /// Throws std::invalid_argument on shape mismatch or non-finite data.
  void validate() const;
};

enum class LpStatus { kOptimal, kUnbounded, kSolverFailure };

std::string_view to_string(LpStatus status);

struct SolverOptions {
  int max_iters = 200000;
  double feas_tol = 1e-9;  // relative to 1 + ||b||_inf
  double opt_tol = 1e-8;   // multiplier tolerance relative to ||c||_inf
  double pivot_tol = 1e-11;
  /// Rebuild the working-set inverse every this many pivots (0 means 50). It
  /// is also rebuilt whenever a residual check of an update fails.
  int refactor_interval = 0;
  /// Consecutive zero-length pivots tolerated before reporting a stall.
  int max_degenerate = 100000;
  /// Solve on a subset of rows and add violated rows until every row holds.
  /// Used when rows outnumber columns by more than 16 to 1 and there are
  /// over 1000 rows. Same optimal value as a direct solve.
  bool row_generation = true;

  /// Keys: max_iters, feas_tol, opt_tol, pivot_tol, refactor_interval,
  /// max_degenerate, row_generation (0 or 1). Unknown keys throw.
  static SolverOptions from_key_values(const std::map<std::string, std::string>& config);
  /// "key=value,key=value".
  static SolverOptions parse(std::string_view text);
};

struct LpSolution {
  LpStatus status = LpStatus::kSolverFailure;
  Eigen::VectorXd v;
  double objective = 0.0;
  double max_infeasibility = 0.0;  // max_i (b_i - a_i^T v)_+
  /// gamma_n * max_i |a_i|^T |v|: floating-point error bound of a row
  /// evaluation. Optimal solves satisfy
  /// max_infeasibility <= feas_tol (1 + ||b||_inf) + rounding_bound.
  double rounding_bound = 0.0;
  int iterations = 0;
  /// Row multipliers (>= 0) for optimal solves; empty otherwise.
  Eigen::VectorXd duals;
  double duality_gap = 0.0;
  /// Direction r with A r >= 0 and c^T r < 0 when unbounded.
  Eigen::VectorXd ray;
  std::string message;
};

/// Dense active-set (inequality-form primal simplex) solver. Free columns are
/// handled by free slots in the working set. Dantzig pricing with a switch to
/// smallest-index selection after zero-length steps. Deterministic for a given
/// input. `start`, when feasible, skips phase one.
LpSolution solve(const LpProblem& problem, const SolverOptions& options = {},
                 const std::optional<Eigen::VectorXd>& start = std::nullopt);

/// Fixed-format MPS (G rows, FR bounds, OBJSENSE MIN). Row names R0000001...,
/// column names C0000001...; values printed in shortest round-trip form.
void export_mps(const LpProblem& problem, std::ostream& out, std::string_view name = "LEVELFIT");

}  // namespace levelfit
