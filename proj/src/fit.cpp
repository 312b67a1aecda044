#include "levelfit/fit.hpp"

#include <limits>
#include <stdexcept>

#include "levelfit/format.hpp"
#include "levelfit/parallel.hpp"

namespace levelfit {

std::string_view to_string(FitStatus status) {
  switch (status) {
    case FitStatus::kOptimal:
      return "optimal";
    case FitStatus::kUnbounded:
      return "unbounded";
    case FitStatus::kSolverFailure:
      return "solver_failure";
  }
  return "solver_failure";
}

LpProblem assemble(const PointCloud& cloud, const Points& grid, const PolyBasis& basis, const MomentVector& moments) {
  const int n = basis.dimension();
  if (cloud.size() == 0) throw std::invalid_argument("assemble: point cloud is empty");
  if (cloud.dimension() != n || grid.cols() != n)
    throw std::invalid_argument("assemble: cloud/grid/basis dimensions disagree");
  if (!(moments.basis == basis)) throw std::invalid_argument("assemble: moment basis differs from fit basis");

  const Eigen::Index k_rows = cloud.size();
  const Eigen::Index m = k_rows + grid.rows();
  const auto cols = static_cast<Eigen::Index>(basis.size());
  LpProblem lp;
  lp.objective = moments.values;
  lp.rows.resize(m, cols);
  lp.lower.resize(m);
  lp.origin.resize(static_cast<std::size_t>(m));

  parallel_chunks(static_cast<std::size_t>(m), [&](std::size_t begin, std::size_t end, std::size_t) {
    Eigen::RowVectorXd row(cols);
    std::span<double> out(row.data(), static_cast<std::size_t>(cols));
    for (std::size_t r = begin; r < end; ++r) {
      const auto i = static_cast<Eigen::Index>(r);
      const bool from_cloud = i < k_rows;
      basis.evaluate(from_cloud ? point(cloud.points, i) : point(grid, i - k_rows), out);
      lp.rows.row(i) = row;
      lp.lower[i] = from_cloud ? 1.0 : 0.0;
      lp.origin[r] = from_cloud ? RowOrigin::kCloudPoint : RowOrigin::kGridPoint;
    }
  }, 2048);
  return lp;
}

namespace {

// |(coeff_map v)_k| <= bound for every k; coeff_map takes LP columns to the
// coefficients of the reported basis.
void append_coefficient_bound(LpProblem& lp, const Eigen::MatrixXd& coeff_map, double bound) {
  const Eigen::Index m = lp.num_rows();
  const Eigen::Index n = lp.num_cols();
  lp.rows.conservativeResize(m + 2 * n, n);
  lp.lower.conservativeResize(m + 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    lp.rows.row(m + 2 * k) = coeff_map.row(k);
    lp.rows.row(m + 2 * k + 1) = -coeff_map.row(k);
    lp.lower[m + 2 * k] = -bound;
    lp.lower[m + 2 * k + 1] = -bound;
  }
  lp.origin.resize(static_cast<std::size_t>(m + 2 * n), RowOrigin::kCoefficientBound);
}

Polynomial to_monomial_if(const PolyBasis& target, const Polynomial& p) {
  return target.kind() == BasisKind::kMonomial ? to_monomial(p) : p;
}

PolyBasis make_basis(BasisKind kind, int dimension, int degree, const BoxDomain& box) {
  return kind == BasisKind::kMonomial ? PolyBasis::monomial(dimension, degree)
                                      : PolyBasis::chebyshev(dimension, degree, box);
}

}  // namespace

FitResult fit(const PointCloud& cloud, const BoxDomain& box, int degree, const FitOptions& options) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  if (cloud.size() == 0) throw std::invalid_argument("point cloud is empty");
  const int n = box.dimension();
  if (cloud.dimension() != n)
    throw std::invalid_argument("point cloud has dimension " + std::to_string(cloud.dimension()) + ", box has " +
                                std::to_string(n));
  const BoxDomain eff_box = box.inflated(options.inflate);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    if (!eff_box.contains(point(cloud.points, i))) {
      throw std::invalid_argument("point " + std::to_string(i + 1) + " of the cloud lies outside the bounding box");
    }
  }

  const GridSpec spec = options.grid.value_or(GridSpec::default_for(n));
  const Points grid = build_grid(eff_box, spec);
  const PolyBasis basis = make_basis(options.basis, n, degree, eff_box);
  // The LP is always posed in the tensor Chebyshev basis on the box: its
  // working matrices stay well conditioned where monomial Vandermonde rows
  // are numerically singular. Monomial fits are mapped back exactly.
  const PolyBasis work = basis.kind() == BasisKind::kChebyshev ? basis : PolyBasis::chebyshev(n, degree, eff_box);
  const auto cols = static_cast<Eigen::Index>(basis.size());
  const Eigen::MatrixXd coeff_map =
      basis.kind() == BasisKind::kChebyshev ? Eigen::MatrixXd::Identity(cols, cols) : chebyshev_to_monomial(work);
  LpProblem lp = assemble(cloud, grid, work, moment_vector(work, eff_box));
  if (options.coefficient_bound) append_coefficient_bound(lp, coeff_map, *options.coefficient_bound);

  // p == 1 is always feasible and has the constant as its first coefficient.
  Eigen::VectorXd start = Eigen::VectorXd::Zero(cols);
  start[0] = 1.0;
  const LpSolution sol = solve(lp, options.solver, start);
  const auto in_basis = [&](const Eigen::VectorXd& v) { return to_monomial_if(basis, Polynomial(work, v)); };

  FitResult result(Polynomial::constant(basis, 1.0), eff_box);
  result.message = sol.message;
  result.degree = degree;
  result.grid_size = grid.rows();
  result.lp_rows = lp.num_rows();
  result.lp_iterations = sol.iterations;

  switch (sol.status) {
    case LpStatus::kOptimal:
      result.status = FitStatus::kOptimal;
      break;
    case LpStatus::kUnbounded:
      result.status = FitStatus::kUnbounded;
      result.message = "LP unbounded at degree " + std::to_string(degree) + " with " + std::to_string(grid.rows()) +
                       " grid points: p can decrease without bound between grid nodes; refine the grid "
                       "or set a coefficient bound";
      return result;
    case LpStatus::kSolverFailure:
      result.status = FitStatus::kSolverFailure;
      if (sol.v.size() == cols && sol.v.allFinite()) result.polynomial = in_basis(sol.v);
      return result;
  }

  result.polynomial = in_basis(sol.v);
  result.w = moment_vector(basis, eff_box).integrate(result.polynomial);
  result.containment_margin = containment_margin(result.polynomial, cloud.points);
  const Eigen::VectorXd row_values = lp.rows * sol.v;
  result.min_grid_value = grid.rows() ? row_values.segment(cloud.size(), grid.rows()).minCoeff() : 0.0;

  const int scan_points =
      options.scan_points > 0 ? options.scan_points : default_scan_points(n, spec.points_per_axis);
  result.scan = nonnegativity_scan(result.polynomial, eff_box, scan_points);
  if (result.scan.negative()) {
    result.warnings.push_back("p is negative between grid nodes (scan minimum " + format_double(result.scan.min_value) +
                              ")");
  }
  if (!result.contains_cloud()) {
    result.warnings.push_back("containment check failed: min p(x_i) - 1 = " + format_double(result.containment_margin));
  }
  if (options.basis == BasisKind::kMonomial) {
    const TraceReport trace = trace_report(result.polynomial, eff_box);
    result.trace_pm = trace.trace_pm;
    if (trace.moment_condition > kMomentConditionWarning) {
      result.warnings.push_back("monomial moment matrix is ill-conditioned at this degree; consider --basis chebyshev");
    }
  }
  return result;
}

SweepResult degree_sweep(const PointCloud& cloud, const BoxDomain& box, const std::vector<int>& degrees,
                         const FitOptions& options) {
  if (degrees.empty()) throw std::invalid_argument("degree sweep needs at least one degree");
  for (std::size_t i = 1; i < degrees.size(); ++i) {
    if (degrees[i] <= degrees[i - 1]) throw std::invalid_argument("sweep degrees must be strictly ascending");
  }
  SweepResult sweep;
  for (int d : degrees) {
    try {
      sweep.fits.push_back(fit(cloud, box, d, options));
    } catch (const std::exception& e) {
      FitResult failed(Polynomial::constant(PolyBasis::monomial(box.dimension(), d), 1.0), box);
      failed.message = e.what();
      failed.degree = d;
      sweep.fits.push_back(std::move(failed));
    }
  }
  for (std::size_t i = 0; i < sweep.fits.size(); ++i) {
    for (std::size_t j = i + 1; j < sweep.fits.size(); ++j) {
      const auto& lo = sweep.fits[i];
      const auto& hi = sweep.fits[j];
      if (lo.optimal() && hi.optimal() && lo.w < hi.w - kMonotonicityTolerance) sweep.monotone = false;
    }
  }
  return sweep;
}

nlohmann::json to_json(const FitResult& result) {
  nlohmann::json j;
  j["status"] = std::string(to_string(result.status));
  j["message"] = result.message;
  j["degree"] = result.degree;
  j["basis"] = std::string(to_string(result.polynomial.basis().kind()));
  j["box"] = {{"lower", result.box.lower()}, {"upper", result.box.upper()}};
  j["w"] = result.w;
  j["grid_size"] = result.grid_size;
  j["lp_rows"] = result.lp_rows;
  j["lp_cols"] = result.polynomial.basis().size();
  j["lp_iterations"] = result.lp_iterations;
  j["containment_margin"] = result.containment_margin;
  j["min_grid_value"] = result.min_grid_value;
  j["min_scan_value"] = result.scan.min_value;
  j["trace_PM"] = result.trace_pm ? nlohmann::json(*result.trace_pm) : nlohmann::json(nullptr);
  j["warnings"] = result.warnings;
  return j;
}

}  // namespace levelfit
