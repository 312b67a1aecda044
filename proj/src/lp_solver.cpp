#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "levelfit/format.hpp"
#include "levelfit/lp.hpp"

namespace levelfit {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kSolverFailure:
      return "solver_failure";
  }
  return "solver_failure";
}

void LpProblem::validate() const {
  if (rows.cols() != objective.size())
    throw std::invalid_argument("lp: constraint rows have " + std::to_string(rows.cols()) + " columns, objective has " +
                                std::to_string(objective.size()));
  if (lower.size() != rows.rows()) throw std::invalid_argument("lp: bound vector length differs from row count");
  if (!origin.empty() && static_cast<Eigen::Index>(origin.size()) != rows.rows())
    throw std::invalid_argument("lp: row origin metadata length differs from row count");
  if (objective.size() == 0) throw std::invalid_argument("lp: no columns");
  if (!objective.allFinite() || !rows.allFinite() || !lower.allFinite())
    throw std::invalid_argument("lp: non-finite data");
}

SolverOptions SolverOptions::from_key_values(const std::map<std::string, std::string>& config) {
  SolverOptions opts;
  for (const auto& [key, text] : config) {
    double value = 0.0;
    if (!parse_double(text, value)) throw std::invalid_argument("solver option " + key + ": not a number: " + text);
    if (key == "max_iters") {
      opts.max_iters = static_cast<int>(value);
    } else if (key == "feas_tol") {
      opts.feas_tol = value;
    } else if (key == "opt_tol") {
      opts.opt_tol = value;
    } else if (key == "pivot_tol") {
      opts.pivot_tol = value;
    } else if (key == "refactor_interval") {
      opts.refactor_interval = static_cast<int>(value);
    } else if (key == "max_degenerate") {
      opts.max_degenerate = static_cast<int>(value);
    } else if (key == "row_generation") {
      if (value != 0.0 && value != 1.0) throw std::invalid_argument("solver option row_generation: expected 0 or 1");
      opts.row_generation = value == 1.0;
    } else {
      throw std::invalid_argument("unknown solver option '" + key + "'");
    }
  }
  if (opts.max_iters < 1 || opts.feas_tol <= 0 || opts.opt_tol <= 0 || opts.pivot_tol <= 0 ||
      opts.refactor_interval < 0 || opts.max_degenerate < 1)
    throw std::invalid_argument("solver options out of range");
  return opts;
}

SolverOptions SolverOptions::parse(std::string_view text) {
  std::map<std::string, std::string> config;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("solver option '" + std::string(item) + "' lacks '='");
    config[std::string(trim(item.substr(0, eq)))] = std::string(trim(item.substr(eq + 1)));
  }
  return from_key_values(config);
}

namespace {

constexpr Eigen::Index kFreeSlot = -1;
constexpr int kResnapInterval = 50;
constexpr double kInverseResidualTol = 1e-10;

// Primal simplex on the inequality form. The working set holds n slots; a
// slot is either a constraint row held at equality or a free coordinate held
// at its current value. The n x n matrix of slot rows is kept as an explicit
// inverse, updated by Sherman-Morrison and rebuilt periodically.
// Slot contents: a row index, or kFreeSlot with the coordinate it holds.
struct WorkingSet {
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> axes;
};

class ActiveSetSimplex {
 public:
  ActiveSetSimplex(const LpProblem& problem, const SolverOptions& options)
      : a_(problem.rows),
        b_(problem.lower),
        c_(problem.objective),
        opts_(options),
        m_(problem.rows.rows()),
        n_(problem.rows.cols()) {
    row_scale_ = a_.cwiseAbs().rowwise().maxCoeff();
    c_scale_ = c_.size() ? c_.cwiseAbs().maxCoeff() : 0.0;
    b_scale_ = 1.0 + (b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0);
    refactor_interval_ = opts_.refactor_interval > 0 ? opts_.refactor_interval : 50;
    harris_tol_ = 0.1 * opts_.feas_tol * b_scale_;
  }

  LpSolution run(Eigen::VectorXd start) {
    LpSolution sol;
    slot_row_.assign(static_cast<std::size_t>(n_), kFreeSlot);
    slot_axis_.resize(static_cast<std::size_t>(n_));
    for (Eigen::Index k = 0; k < n_; ++k) slot_axis_[static_cast<std::size_t>(k)] = k;
    in_work_.assign(static_cast<std::size_t>(m_), 0);
    binv_ = Eigen::MatrixXd::Identity(n_, n_);
    v_ = std::move(start);
    r_ = a_ * v_ - b_;
    return primal(sol, 0);
  }

  // Dual simplex from a working set whose multipliers are nonnegative (the
  // optimal set of a problem with fewer rows), then primal polishing. Returns
  // nullopt when the set is singular, not dual feasible, or the dual phase
  // fails; the caller then starts over with run().
  std::optional<LpSolution> run_warm(Eigen::VectorXd start, const WorkingSet& working) {
    LpSolution sol;
    slot_row_ = working.rows;
    slot_axis_ = working.axes;
    in_work_.assign(static_cast<std::size_t>(m_), 0);
    for (const Eigen::Index row : slot_row_)
      if (row != kFreeSlot) in_work_[static_cast<std::size_t>(row)] = 1;
    v_ = std::move(start);
    if (!snap()) return std::nullopt;

    const double mult_tol = opts_.opt_tol * c_scale_;
    const double infeas_tol = opts_.feas_tol * b_scale_;
    for (int iter = 0; iter < opts_.max_iters; ++iter) {
      Eigen::VectorXd y = binv_.transpose() * c_;
      if (!solves_transposed(y, c_)) {
        if (!refactor()) return std::nullopt;
        y = binv_.transpose() * c_;
      }
      for (Eigen::Index k = 0; k < n_; ++k) {
        const bool free_slot = slot_row_[static_cast<std::size_t>(k)] == kFreeSlot;
        if (free_slot ? std::abs(y[k]) > mult_tol : y[k] < -mult_tol) return std::nullopt;
      }
      Eigen::Index entering = -1;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (in_work_[static_cast<std::size_t>(i)] || r_[i] >= -infeas_tol) continue;
        if (entering < 0 || r_[i] < r_[entering]) entering = i;
      }
      if (entering < 0) {
        sol.iterations = iter;
        return primal(sol, iter);
      }
      const Eigen::VectorXd u = (a_.row(entering) * binv_).transpose();
      const Eigen::Index k = dual_ratio_test(u, y, mult_tol, a_.row(entering).cwiseAbs().maxCoeff());
      if (k < 0) return std::nullopt;
      if (!solves_unit(k)) {
        if (!refactor()) return std::nullopt;
        --iter;
        continue;
      }
      const Eigen::VectorXd d = binv_.col(k);
      const Eigen::VectorXd ad = a_ * d;
      const double t = -r_[entering] / ad[entering];
      v_ += t * d;
      r_ += t * ad;
      r_[entering] = 0.0;
      replace_slot(k, entering, ad[entering]);
      if ((iter + 1) % refactor_interval_ == 0 && !refactor()) return std::nullopt;
      if ((iter + 1) % kResnapInterval == 0 && !snap()) return std::nullopt;
    }
    return std::nullopt;
  }

  WorkingSet working_set() const { return {slot_row_, slot_axis_}; }

 private:
  // Leaving slot when row `entering` joins with coordinates u = W^-T a_e.
  // Free slots go first; otherwise the Harris-relaxed minimum of y_k / u_k.
  Eigen::Index dual_ratio_test(const Eigen::VectorXd& u, const Eigen::VectorXd& y, double mult_tol,
                               double row_scale) const {
    const double pivot = opts_.pivot_tol * std::max(row_scale, 1e-300);
    Eigen::Index best = -1;
    for (Eigen::Index k = 0; k < n_; ++k) {
      if (slot_row_[static_cast<std::size_t>(k)] != kFreeSlot || std::abs(u[k]) <= pivot) continue;
      if (best < 0 || std::abs(u[k]) > std::abs(u[best])) best = k;
    }
    if (best >= 0) return best;
    double theta_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n_; ++k) {
      if (u[k] > pivot) theta_max = std::min(theta_max, (std::max(y[k], 0.0) + mult_tol) / u[k]);
    }
    for (Eigen::Index k = 0; k < n_; ++k) {
      if (u[k] <= pivot || std::max(y[k], 0.0) / u[k] > theta_max) continue;
      if (best < 0 || u[k] > u[best]) best = k;
    }
    return best;
  }

  LpSolution primal(LpSolution& sol, int first_iter) {
    const double mult_tol = opts_.opt_tol * c_scale_;
    int degenerate_run = 0;
    int since_snap = 0;
    bool fresh = false;  // no pivot since the last snap

    for (int iter = first_iter; iter < opts_.max_iters; ++iter) {
      sol.iterations = iter;
      if (iter > first_iter && iter % refactor_interval_ == 0) {
        if (!refactor()) return failure(sol, "working-set matrix became singular");
      }
      if (++since_snap >= kResnapInterval) {
        if (!snap()) return failure(sol, "working-set matrix became singular");
        since_snap = 0;
        fresh = true;
      }
      Eigen::VectorXd y = binv_.transpose() * c_;
      if (!solves_transposed(y, c_)) {
        if (!refactor()) return failure(sol, "working-set matrix became singular");
        y = binv_.transpose() * c_;
      }
      const bool bland = degenerate_run > 0;
      const Eigen::Index k = choose_leaving_slot(y, mult_tol, bland);
      if (k < 0) {
        if (fresh) return finish_optimal(sol, y);
        // Confirm optimality from a freshly snapped vertex.
        if (!snap()) return failure(sol, "working-set matrix became singular");
        since_snap = 0;
        fresh = true;
        continue;
      }

      const bool free_slot = slot_row_[static_cast<std::size_t>(k)] == kFreeSlot;
      const double sign = free_slot && y[k] > 0.0 ? -1.0 : 1.0;
      if (!solves_unit(k)) {
        if (!refactor()) return failure(sol, "working-set matrix became singular");
        --iter;
        continue;
      }
      const Eigen::VectorXd d = sign * binv_.col(k);
      const Eigen::VectorXd ad = a_ * d;
      const double d_norm = d.cwiseAbs().maxCoeff();

      const Eigen::Index entering = ratio_test(ad, d_norm, bland);
      if (entering < 0) return finish_unbounded(sol, d);

      const double t = std::max(r_[entering], 0.0) / (-ad[entering]);
      v_ += t * d;
      r_ += t * ad;
      r_[entering] = 0.0;
      fresh = false;

      if (t * d_norm <= 1e-14 * (1.0 + v_.cwiseAbs().maxCoeff())) {
        if (++degenerate_run > opts_.max_degenerate)
          return failure(sol, "stalled: " + std::to_string(degenerate_run) + " consecutive degenerate pivots");
      } else {
        degenerate_run = 0;
      }

      replace_slot(k, entering, ad[entering] * sign);
    }
    sol.iterations = opts_.max_iters;
    return failure(sol, "iteration cap of " + std::to_string(opts_.max_iters) + " reached");
  }

  // Puts row `entering` into slot k by a Sherman-Morrison update of the
  // inverse; denom = a_entering^T W^-1 e_k.
  void replace_slot(Eigen::Index k, Eigen::Index entering, double denom) {
    const Eigen::VectorXd col = binv_.col(k);
    Eigen::RowVectorXd rowvec = a_.row(entering) * binv_;
    rowvec[k] -= 1.0;
    binv_.noalias() -= (col / denom) * rowvec;
    const Eigen::Index old_row = slot_row_[static_cast<std::size_t>(k)];
    if (old_row != kFreeSlot) in_work_[static_cast<std::size_t>(old_row)] = 0;
    slot_row_[static_cast<std::size_t>(k)] = entering;
    in_work_[static_cast<std::size_t>(entering)] = 1;
  }

  Eigen::Index choose_leaving_slot(const Eigen::VectorXd& y, double tol, bool bland) const {
    Eigen::Index best = -1;
    double best_score = 0.0;
    // Free coordinates are released first; any nonzero multiplier is improvable.
    for (Eigen::Index k = 0; k < n_; ++k) {
      if (slot_row_[static_cast<std::size_t>(k)] != kFreeSlot || std::abs(y[k]) <= tol) continue;
      if (bland) return k;
      if (std::abs(y[k]) > best_score) {
        best = k;
        best_score = std::abs(y[k]);
      }
    }
    if (best >= 0) return best;
    Eigen::Index best_row = std::numeric_limits<Eigen::Index>::max();
    for (Eigen::Index k = 0; k < n_; ++k) {
      const Eigen::Index row = slot_row_[static_cast<std::size_t>(k)];
      if (row == kFreeSlot || y[k] >= -tol) continue;
      if (bland) {
        if (row < best_row) {
          best_row = row;
          best = k;
        }
      } else if (-y[k] > best_score) {
        best = k;
        best_score = -y[k];
      }
    }
    return best;
  }

  // Harris two-pass ratio test: rows may end up violated by at most
  // harris_tol_, which lets the pass pick the largest pivot among near ties.
  Eigen::Index ratio_test(const Eigen::VectorXd& ad, double d_norm, bool bland) const {
    double t_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (in_work_[static_cast<std::size_t>(i)] || !blocks(ad[i], i, d_norm)) continue;
      t_max = std::min(t_max, (std::max(r_[i], 0.0) + harris_tol_) / (-ad[i]));
    }
    if (!std::isfinite(t_max)) return -1;
    Eigen::Index chosen = -1;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (in_work_[static_cast<std::size_t>(i)] || !blocks(ad[i], i, d_norm)) continue;
      if (std::max(r_[i], 0.0) / (-ad[i]) > t_max) continue;
      if (chosen < 0) {
        chosen = i;
        if (bland) break;
      } else if (-ad[i] > -ad[chosen]) {
        chosen = i;
      }
    }
    return chosen;
  }

  bool blocks(double ad_i, Eigen::Index i, double d_norm) const {
    return ad_i < -opts_.pivot_tol * std::max(row_scale_[i], 1e-300) * d_norm;
  }

  // Residual checks of the updated inverse against the explicit working rows,
  // O(n^2) each; a failed check triggers a refactorization.
  bool solves_transposed(const Eigen::VectorXd& y, const Eigen::VectorXd& rhs) const {
    const Eigen::MatrixXd w = working_matrix();
    const double scale = (w.transpose().cwiseAbs() * y.cwiseAbs()).maxCoeff() + rhs.cwiseAbs().maxCoeff();
    return (w.transpose() * y - rhs).cwiseAbs().maxCoeff() <= kInverseResidualTol * std::max(scale, 1e-300);
  }

  bool solves_unit(Eigen::Index k) const {
    const Eigen::MatrixXd w = working_matrix();
    Eigen::VectorXd residual = w * binv_.col(k);
    const double scale = (w.cwiseAbs() * binv_.col(k).cwiseAbs()).maxCoeff() + 1.0;
    residual[k] -= 1.0;
    return residual.cwiseAbs().maxCoeff() <= kInverseResidualTol * scale;
  }

  Eigen::MatrixXd working_matrix() const {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_, n_);
    for (Eigen::Index k = 0; k < n_; ++k) {
      const Eigen::Index row = slot_row_[static_cast<std::size_t>(k)];
      if (row == kFreeSlot) {
        w(k, slot_axis_[static_cast<std::size_t>(k)]) = 1.0;
      } else {
        w.row(k) = a_.row(row);
      }
    }
    return w;
  }

  bool refactor() {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(working_matrix());
    Eigen::MatrixXd inv = lu.inverse();
    if (!inv.allFinite()) return false;
    binv_ = std::move(inv);
    return true;
  }

  // Refactors, moves v back onto the working constraints and recomputes
  // slacks. An updated inverse is never trusted for this solve.
  bool snap() {
    if (!refactor()) return false;
    Eigen::VectorXd rhs(n_);
    for (Eigen::Index k = 0; k < n_; ++k) {
      const Eigen::Index row = slot_row_[static_cast<std::size_t>(k)];
      rhs[k] = row == kFreeSlot ? v_[slot_axis_[static_cast<std::size_t>(k)]] : b_[row];
    }
    Eigen::VectorXd snapped = binv_ * rhs;
    // One step of iterative refinement against the explicit working rows.
    snapped += binv_ * (rhs - working_matrix() * snapped);
    if (snapped.allFinite()) v_ = std::move(snapped);
    r_ = a_ * v_ - b_;
    return true;
  }

  LpSolution& failure(LpSolution& sol, std::string message) {
    sol.status = LpStatus::kSolverFailure;
    sol.v = v_;
    sol.objective = c_.dot(v_);
    sol.max_infeasibility = max_infeasibility();
    sol.message = std::move(message);
    return sol;
  }

  double max_infeasibility() const {
    if (m_ == 0) return 0.0;
    return std::max(0.0, -(a_ * v_ - b_).minCoeff());
  }

  LpSolution& finish_optimal(LpSolution& sol, const Eigen::VectorXd& y) {
    sol.v = v_;
    sol.objective = c_.dot(v_);
    sol.max_infeasibility = max_infeasibility();
    // A priori bound on the rounding error of evaluating a_i^T v in double;
    // violations below it cannot be distinguished from zero.
    const double unit = 0.5 * std::numeric_limits<double>::epsilon();
    const double gamma = static_cast<double>(n_) * unit / (1.0 - static_cast<double>(n_) * unit);
    sol.rounding_bound = m_ ? gamma * (a_.cwiseAbs() * v_.cwiseAbs()).maxCoeff() : 0.0;
    if (sol.max_infeasibility > opts_.feas_tol * b_scale_ + sol.rounding_bound) {
      sol.status = LpStatus::kSolverFailure;
      sol.message = "optimal basis found but primal infeasibility " + format_double(sol.max_infeasibility) +
                    " exceeds tolerance";
      return sol;
    }
    sol.duals = Eigen::VectorXd::Zero(m_);
    for (Eigen::Index k = 0; k < n_; ++k) {
      const Eigen::Index row = slot_row_[static_cast<std::size_t>(k)];
      if (row != kFreeSlot) sol.duals[row] = std::max(y[k], 0.0);
    }
    sol.duality_gap = sol.objective - b_.dot(sol.duals);
    sol.status = LpStatus::kOptimal;
    sol.message = "optimal";
    return sol;
  }

  LpSolution& finish_unbounded(LpSolution& sol, const Eigen::VectorXd& d) {
    const Eigen::VectorXd ray = d / d.cwiseAbs().maxCoeff();
    const double descent = c_.dot(ray);
    const double worst = m_ ? (a_ * ray).minCoeff() : 0.0;
    if (!(descent < 0.0) || worst < -1e-10) {
      return failure(sol, "unbounded direction failed verification (min A r = " + format_double(worst) +
                              ", c.r = " + format_double(descent) + ")");
    }
    sol.status = LpStatus::kUnbounded;
    sol.v = v_;
    sol.objective = -std::numeric_limits<double>::infinity();
    sol.max_infeasibility = max_infeasibility();
    sol.ray = ray;
    sol.message = "unbounded";
    return sol;
  }

  const Eigen::MatrixXd& a_;
  const Eigen::VectorXd& b_;
  const Eigen::VectorXd& c_;
  SolverOptions opts_;
  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::VectorXd row_scale_;
  double c_scale_ = 0.0;
  double b_scale_ = 1.0;
  int refactor_interval_ = 1;
  double harris_tol_ = 0.0;

  std::vector<Eigen::Index> slot_row_;
  std::vector<Eigen::Index> slot_axis_;
  std::vector<char> in_work_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd v_;
  Eigen::VectorXd r_;
};

// Phase one: min s  s.t.  A v + s >= b, s >= 0, from (start, s0).
std::optional<Eigen::VectorXd> find_feasible_point(const LpProblem& problem, const SolverOptions& options,
                                                   const Eigen::VectorXd& start, LpSolution& report) {
  const Eigen::Index m = problem.num_rows();
  const Eigen::Index n = problem.num_cols();
  LpProblem aux;
  aux.rows.resize(m + 1, n + 1);
  aux.rows.topLeftCorner(m, n) = problem.rows;
  aux.rows.topRightCorner(m, 1).setOnes();
  aux.rows.bottomRows(1).setZero();
  aux.rows(m, n) = 1.0;
  aux.lower.resize(m + 1);
  aux.lower.head(m) = problem.lower;
  aux.lower[m] = 0.0;
  aux.objective = Eigen::VectorXd::Zero(n + 1);
  aux.objective[n] = 1.0;

  Eigen::VectorXd aux_start(n + 1);
  aux_start.head(n) = start;
  aux_start[n] = std::max(0.0, (problem.lower - problem.rows * start).maxCoeff());

  ActiveSetSimplex phase_one(aux, options);
  LpSolution sol = phase_one.run(aux_start);
  report.iterations = sol.iterations;
  if (sol.status != LpStatus::kOptimal) {
    report.message = "phase one: " + sol.message;
    return std::nullopt;
  }
  const double b_scale = 1.0 + problem.lower.cwiseAbs().maxCoeff();
  if (sol.v[n] > options.feas_tol * b_scale) {
    report.message = "infeasible: minimum total violation " + format_double(sol.v[n]);
    return std::nullopt;
  }
  return Eigen::VectorXd(sol.v.head(n));
}

// `warm`, when given, is tried first with the dual simplex; `final_set`
// receives the working set of the run that produced the answer.
LpSolution solve_direct(const LpProblem& problem, const SolverOptions& options, Eigen::VectorXd v0,
                        const WorkingSet* warm = nullptr, WorkingSet* final_set = nullptr) {
  if (warm) {
    ActiveSetSimplex simplex(problem, options);
    std::optional<LpSolution> sol = simplex.run_warm(v0, *warm);
    if (sol && sol->status == LpStatus::kOptimal) {
      if (final_set) *final_set = simplex.working_set();
      return *sol;
    }
  }
  const double b_scale = 1.0 + (problem.num_rows() ? problem.lower.cwiseAbs().maxCoeff() : 0.0);
  const double violation =
      problem.num_rows() ? std::max(0.0, (problem.lower - problem.rows * v0).maxCoeff()) : 0.0;
  int phase_one_iterations = 0;
  if (violation > options.feas_tol * b_scale) {
    LpSolution report;
    auto feasible = find_feasible_point(problem, options, v0, report);
    if (!feasible) {
      report.status = LpStatus::kSolverFailure;
      report.v = v0;
      report.max_infeasibility = violation;
      return report;
    }
    phase_one_iterations = report.iterations;
    v0 = std::move(*feasible);
  }
  ActiveSetSimplex simplex(problem, options);
  LpSolution sol = simplex.run(std::move(v0));
  sol.iterations += phase_one_iterations;
  if (final_set) *final_set = simplex.working_set();
  return sol;
}

constexpr Eigen::Index kRowGenerationMinRows = 1000;
constexpr Eigen::Index kRowGenerationRatio = 16;

bool use_row_generation(const LpProblem& problem, const SolverOptions& options) {
  return options.row_generation && problem.num_rows() > kRowGenerationMinRows &&
         problem.num_rows() > kRowGenerationRatio * problem.num_cols();
}

LpProblem restrict_rows(const LpProblem& problem, const std::vector<Eigen::Index>& rows) {
  LpProblem sub;
  sub.objective = problem.objective;
  sub.rows.resize(static_cast<Eigen::Index>(rows.size()), problem.num_cols());
  sub.lower.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    sub.rows.row(static_cast<Eigen::Index>(k)) = problem.rows.row(rows[k]);
    sub.lower[static_cast<Eigen::Index>(k)] = problem.lower[rows[k]];
  }
  return sub;
}

// Cutting-plane loop. The working subset starts with every non-grid row and
// an evenly strided sample of the rest; each round adds up to n of the most
// violated rows (or rows cut by an unbounded ray). It terminates because every
// round adds at least one row, and an answer is returned only when it holds on
// the full problem.
LpSolution solve_with_row_generation(const LpProblem& problem, const SolverOptions& options, Eigen::VectorXd v) {
  const Eigen::Index m = problem.num_rows();
  const Eigen::Index n = problem.num_cols();
  const double b_scale = 1.0 + problem.lower.cwiseAbs().maxCoeff();
  const double unit = 0.5 * std::numeric_limits<double>::epsilon();
  const double gamma = static_cast<double>(n) * unit / (1.0 - static_cast<double>(n) * unit);

  std::vector<char> active(static_cast<std::size_t>(m), 0);
  const Eigen::Index stride = std::max<Eigen::Index>(1, m / (4 * n));
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool grid = !problem.origin.empty() && problem.origin[static_cast<std::size_t>(i)] == RowOrigin::kGridPoint;
    if (!grid || i % stride == 0) active[static_cast<std::size_t>(i)] = 1;
  }

  int iterations = 0;
  std::optional<WorkingSet> basis;  // in full-problem row indices
  while (true) {
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> position(static_cast<std::size_t>(m), -1);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      position[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(rows.size());
      rows.push_back(i);
    }
    std::optional<WorkingSet> warm;
    if (basis) {
      warm = basis;
      for (auto& row : warm->rows)
        if (row != kFreeSlot) row = position[static_cast<std::size_t>(row)];
    }
    SolverOptions sub_options = options;
    sub_options.max_iters = options.max_iters - iterations;
    WorkingSet final_set;
    LpSolution sol = solve_direct(restrict_rows(problem, rows), sub_options, v, warm ? &*warm : nullptr, &final_set);
    iterations += sol.iterations;
    basis.reset();
    if (sol.status == LpStatus::kOptimal) {
      for (auto& row : final_set.rows)
        if (row != kFreeSlot) row = rows[static_cast<std::size_t>(row)];
      basis = std::move(final_set);
    }
    sol.iterations = iterations;
    if (sol.status == LpStatus::kSolverFailure) {
      sol.max_infeasibility = std::max(0.0, (problem.lower - problem.rows * sol.v).maxCoeff());
      return sol;
    }

    const bool optimal = sol.status == LpStatus::kOptimal;
    Eigen::VectorXd probe;
    double threshold = 0.0;
    if (optimal) {
      probe = problem.rows * sol.v - problem.lower;
      sol.rounding_bound = gamma * (problem.rows.cwiseAbs() * sol.v.cwiseAbs()).maxCoeff();
      threshold = -(options.feas_tol * b_scale + sol.rounding_bound);
    } else {
      probe = problem.rows * sol.ray;
      threshold = -1e-10;
    }
    std::vector<Eigen::Index> violated;
    for (Eigen::Index i = 0; i < m; ++i)
      if (!active[static_cast<std::size_t>(i)] && probe[i] < threshold) violated.push_back(i);

    if (violated.empty()) {
      sol.max_infeasibility = std::max(0.0, -(problem.rows * sol.v - problem.lower).minCoeff());
      if (optimal) {
        Eigen::VectorXd duals = Eigen::VectorXd::Zero(m);
        for (std::size_t k = 0; k < rows.size(); ++k) duals[rows[k]] = sol.duals[static_cast<Eigen::Index>(k)];
        sol.duals = std::move(duals);
      }
      return sol;
    }
    // Most violated first, lower index on ties.
    const auto keep = std::min<std::size_t>(violated.size(), static_cast<std::size_t>(n));
    std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(keep), violated.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return probe[a] < probe[b] || (probe[a] == probe[b] && a < b); });
    for (std::size_t k = 0; k < keep; ++k) active[static_cast<std::size_t>(violated[k])] = 1;
    v = sol.v;
  }
}

}  // namespace

LpSolution solve(const LpProblem& problem, const SolverOptions& options, const std::optional<Eigen::VectorXd>& start) {
  problem.validate();
  const Eigen::Index n = problem.num_cols();
  Eigen::VectorXd v0 = start.value_or(Eigen::VectorXd::Zero(n));
  if (v0.size() != n) throw std::invalid_argument("lp: start vector has wrong length");
  if (use_row_generation(problem, options)) return solve_with_row_generation(problem, options, std::move(v0));
  return solve_direct(problem, options, std::move(v0));
}

}  // namespace levelfit
