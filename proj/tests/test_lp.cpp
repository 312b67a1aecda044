#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "levelfit/fit.hpp"
#include "levelfit/lp.hpp"
#include "oracles.hpp"

namespace levelfit {
namespace {

LpProblem make_problem(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::VectorXd c) {
  LpProblem lp;
  lp.rows = std::move(a);
  lp.lower = std::move(b);
  lp.objective = std::move(c);
  lp.origin.assign(static_cast<std::size_t>(lp.rows.rows()), RowOrigin::kGeneric);
  return lp;
}

/// Feasible (b = A x0 - slack) and bounded (c = A^T lambda, lambda >= 0).
LpProblem random_bounded_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cols(1, 6);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = cols(rng);
  const int m = std::uniform_int_distribution<int>(n + 1, 12)(rng);
  Eigen::MatrixXd a(m, n);
  for (auto& x : a.reshaped()) x = g(rng);
  Eigen::VectorXd x0(n);
  for (auto& x : x0) x = g(rng);
  Eigen::VectorXd slack(m);
  for (auto& s : slack) s = u(rng) < 0.3 ? 0.0 : u(rng);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    if (u(rng) < 0.7) lambda[i] = u(rng);
  }
  for (int i = 0; i < n; ++i) lambda[i] += 0.1;  // at least n active multipliers
  Eigen::VectorXd b = a * x0 - slack;
  Eigen::VectorXd c = a.transpose() * lambda;
  return make_problem(std::move(a), std::move(b), std::move(c));
}

void expect_ray_certified(const LpProblem& lp, const LpSolution& sol) {
  ASSERT_EQ(sol.ray.size(), lp.num_cols());
  if (lp.num_rows() > 0) {
    EXPECT_GE((lp.rows * sol.ray).minCoeff(), -1e-10);
  }
  EXPECT_LT(lp.objective.dot(sol.ray), -1e-10);
}

TEST(Solve, SingleVariable) {
  const LpProblem lp = make_problem(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, 2.0));
  const LpSolution sol = solve(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_DOUBLE_EQ(sol.v[0], 1.0);
  EXPECT_DOUBLE_EQ(sol.objective, 2.0);
}

TEST(Solve, NoRowsIsUnbounded) {
  const LpProblem lp = make_problem(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), Eigen::VectorXd::Constant(1, -1.0));
  const LpSolution sol = solve(lp);
  ASSERT_EQ(sol.status, LpStatus::kUnbounded);
  expect_ray_certified(lp, sol);
}

TEST(Solve, ZeroObjectiveWithoutRowsIsOptimal) {
  const LpProblem lp = make_problem(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), Eigen::VectorXd::Zero(2));
  EXPECT_EQ(solve(lp).status, LpStatus::kOptimal);
}

TEST(Solve, InfeasibleStartTriggersPhaseOne) {
  // v0 >= 3, v1 >= -1, v0 + v1 >= 4; min v0 + 2 v1 -> (5, -1), objective 3.
  Eigen::MatrixXd a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  const LpProblem lp = make_problem(a, Eigen::Vector3d(3, -1, 4), Eigen::Vector2d(1, 2));
  const LpSolution sol = solve(lp, {}, Eigen::Vector2d(0, 0));
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 3.0, 1e-12);
  EXPECT_NEAR(sol.v[0], 5.0, 1e-12);
}

TEST(Solve, InfeasibleProblemIsASolverFailure) {
  Eigen::MatrixXd a(2, 1);
  a << 1, -1;
  const LpProblem lp = make_problem(a, Eigen::Vector2d(1, 0), Eigen::VectorXd::Ones(1));
  const LpSolution sol = solve(lp);
  EXPECT_EQ(sol.status, LpStatus::kSolverFailure);
  EXPECT_FALSE(sol.message.empty());
}

TEST(Solve, IterationCapIsReported) {
  std::mt19937_64 rng(1);
  LpProblem lp = random_bounded_lp(rng);
  SolverOptions opts;
  opts.max_iters = 0;
  const LpSolution sol = solve(lp, opts);
  if (sol.status != LpStatus::kOptimal) {
    EXPECT_NE(sol.message.find("iteration"), std::string::npos) << sol.message;
  }
}

TEST(Solve, MalformedProblemThrows) {
  LpProblem lp = make_problem(Eigen::MatrixXd::Ones(2, 2), Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(2));
  EXPECT_THROW(solve(lp), std::invalid_argument);
  lp = make_problem(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Constant(1, NAN), Eigen::VectorXd::Ones(1));
  EXPECT_THROW(solve(lp), std::invalid_argument);
}

TEST(Solve, MatchesVertexEnumeration) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const LpProblem lp = random_bounded_lp(rng);
    const auto expected = oracle::vertex_enumeration(lp.rows, lp.lower, lp.objective);
    ASSERT_TRUE(expected.has_value()) << "trial " << trial;
    const LpSolution sol = solve(lp);
    ASSERT_EQ(sol.status, LpStatus::kOptimal) << "trial " << trial << ": " << sol.message;
    EXPECT_NEAR(sol.objective, *expected, 1e-7 * (1.0 + std::abs(*expected))) << "trial " << trial;
    const double scale = 1.0 + lp.lower.cwiseAbs().maxCoeff();
    EXPECT_GE((lp.rows * sol.v - lp.lower).minCoeff(), -1e-9 * scale) << "trial " << trial;
    EXPECT_LE(sol.max_infeasibility, 1e-9 * scale);
    EXPECT_LE(sol.duality_gap, 1e-8 * (1.0 + std::abs(sol.objective)));
    ASSERT_EQ(sol.duals.size(), lp.num_rows());
    EXPECT_GE(sol.duals.minCoeff(), 0.0);
  }
}

TEST(Solve, UnboundedStatusAlwaysCarriesAVerifiedRay) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  int unbounded = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const int m = trial % 13;
    Eigen::MatrixXd a(m, n);
    for (auto& x : a.reshaped()) x = g(rng);
    Eigen::VectorXd x0(n), c(n);
    for (auto& x : x0) x = g(rng);
    for (auto& x : c) x = g(rng);
    const LpProblem lp = make_problem(a, a * x0 - Eigen::VectorXd::Ones(m), c);
    const LpSolution sol = solve(lp);
    ASSERT_NE(sol.status, LpStatus::kSolverFailure) << sol.message;
    if (sol.status == LpStatus::kUnbounded) {
      ++unbounded;
      expect_ray_certified(lp, sol);
    } else {
      const auto expected = oracle::vertex_enumeration(lp.rows, lp.lower, lp.objective);
      ASSERT_TRUE(expected.has_value());
      EXPECT_NEAR(sol.objective, *expected, 1e-7 * (1.0 + std::abs(*expected)));
    }
  }
  EXPECT_GT(unbounded, 20);
}

/// Feasible (b = A x0 - slack) with many rows; may be unbounded.
LpProblem random_tall_lp(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a(m, n);
  for (auto& x : a.reshaped()) x = g(rng);
  Eigen::VectorXd x0(n);
  for (auto& x : x0) x = g(rng);
  Eigen::VectorXd slack(m);
  for (auto& s : slack) s = u(rng);
  Eigen::VectorXd c(n);
  for (auto& x : c) x = g(rng);
  return make_problem(a, a * x0 - slack, c);
}

TEST(RowGeneration, MatchesTheDirectSolve) {
  std::mt19937_64 rng(2718);
  SolverOptions direct;
  direct.row_generation = false;
  int optimal = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 5;
    const LpProblem lp = random_tall_lp(rng, n, 1500 + 100 * trial);
    const LpSolution a = solve(lp);
    const LpSolution b = solve(lp, direct);
    ASSERT_EQ(a.status, b.status) << "trial " << trial << ": " << a.message << " / " << b.message;
    if (a.status == LpStatus::kOptimal) {
      ++optimal;
      EXPECT_NEAR(a.objective, b.objective, 1e-9 * (1.0 + std::abs(b.objective))) << "trial " << trial;
      EXPECT_LE(a.max_infeasibility, 1e-9 * (1.0 + lp.lower.cwiseAbs().maxCoeff()) + a.rounding_bound);
      ASSERT_EQ(a.duals.size(), lp.num_rows());
      EXPECT_LE(std::abs(a.duality_gap), 1e-8 * (1.0 + std::abs(a.objective)));
    } else {
      expect_ray_certified(lp, a);
    }
  }
  EXPECT_GT(optimal, 5);
}

TEST(RowGeneration, FitProblemMatchesTheDirectSolve) {
  PointCloud k;
  k.points.resize(3, 1);
  k.points << -0.5, 0.0, 0.25;
  const BoxDomain box = BoxDomain::symmetric_unit(1);
  for (int d : {4, 9}) {
    const PolyBasis basis = PolyBasis::chebyshev(1, d, box);
    const LpProblem lp = assemble(k, build_grid(box, GridSpec::tensor(2001)), basis, moment_vector(basis, box));
    SolverOptions direct;
    direct.row_generation = false;
    const LpSolution a = solve(lp);
    const LpSolution b = solve(lp, direct);
    ASSERT_EQ(a.status, LpStatus::kOptimal) << a.message;
    ASSERT_EQ(b.status, LpStatus::kOptimal) << b.message;
    EXPECT_NEAR(a.objective, b.objective, 1e-10) << "d=" << d;
  }
}

TEST(Solve, RareRefactorizationStillMatchesVertexEnumeration) {
  std::mt19937_64 rng(77);
  SolverOptions opts;
  opts.refactor_interval = 1000000;
  for (int trial = 0; trial < 50; ++trial) {
    const LpProblem lp = random_bounded_lp(rng);
    const auto expected = oracle::vertex_enumeration(lp.rows, lp.lower, lp.objective);
    ASSERT_TRUE(expected.has_value());
    const LpSolution sol = solve(lp, opts);
    ASSERT_EQ(sol.status, LpStatus::kOptimal) << "trial " << trial << ": " << sol.message;
    EXPECT_NEAR(sol.objective, *expected, 1e-7 * (1.0 + std::abs(*expected))) << "trial " << trial;
  }
}

TEST(Solve, ScalingTheObjectiveLeavesTheArgminUnchanged) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const LpProblem lp = random_bounded_lp(rng);
    const LpSolution base = solve(lp);
    ASSERT_EQ(base.status, LpStatus::kOptimal);
    for (double lambda : {0.5, 2.0, 3.0, 1000.0}) {
      LpProblem scaled = lp;
      scaled.objective *= lambda;
      const LpSolution sol = solve(scaled);
      ASSERT_EQ(sol.status, LpStatus::kOptimal);
      EXPECT_EQ(sol.v, base.v) << "trial " << trial << " lambda " << lambda;
      EXPECT_NEAR(sol.objective, lambda * base.objective, 1e-12 * lambda * (1.0 + std::abs(base.objective)));
    }
  }
}

TEST(Solve, IsDeterministic) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const LpProblem lp = random_bounded_lp(rng);
    const LpSolution a = solve(lp);
    const LpSolution b = solve(lp);
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.objective, b.objective);
  }
}

TEST(SolverOptions, ParsesKeyValueText) {
  const SolverOptions o = SolverOptions::parse("max_iters=50, feas_tol=1e-7,opt_tol=2e-9");
  EXPECT_EQ(o.max_iters, 50);
  EXPECT_EQ(o.feas_tol, 1e-7);
  EXPECT_EQ(o.opt_tol, 2e-9);
  EXPECT_TRUE(o.row_generation);
  EXPECT_FALSE(SolverOptions::parse("row_generation=0").row_generation);
  EXPECT_THROW(SolverOptions::parse("row_generation=2"), std::invalid_argument);
  EXPECT_THROW(SolverOptions::parse("bogus=1"), std::invalid_argument);
  EXPECT_THROW(SolverOptions::parse("feas_tol=abc"), std::invalid_argument);
}

TEST(Mps, TrivialProblem) {
  const LpProblem lp = make_problem(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, 2.0));
  std::ostringstream out;
  export_mps(lp, out, "TINY");
  std::istringstream in(out.str());
  const auto model = oracle::read_mps(in);
  EXPECT_EQ(model.name, "TINY");
  EXPECT_TRUE(model.minimize);
  EXPECT_EQ(model.col_names.size(), 1u);
  EXPECT_EQ(model.row_names.size(), 1u);
  EXPECT_EQ(model.free_columns.size(), 1u);
  EXPECT_NE(out.str().find("ENDATA"), std::string::npos);
}

TEST(Mps, RoundTripIsExact) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    LpProblem lp = random_bounded_lp(rng);
    lp.rows(0, 0) = 0.0;  // sparse entries are omitted and read back as zero
    lp.rows /= 3.0;
    std::ostringstream out;
    export_mps(lp, out);
    std::istringstream in(out.str());
    const auto model = oracle::read_mps(in);
    EXPECT_EQ(model.c, lp.objective);
    EXPECT_EQ(model.a, lp.rows);
    EXPECT_EQ(model.b, lp.lower);
    EXPECT_EQ(model.free_columns.size(), static_cast<std::size_t>(lp.num_cols()));
  }
}

TEST(Mps, FitProblemCountsMatchAssembly) {
  PointCloud k;
  k.points.resize(3, 1);
  k.points << -0.5, 0.0, 0.25;
  const BoxDomain box = BoxDomain::symmetric_unit(1);
  const PolyBasis basis = PolyBasis::monomial(1, 2);
  const LpProblem lp = assemble(k, build_grid(box, GridSpec::tensor(2001)), basis, moment_vector(basis, box));
  std::ostringstream out;
  export_mps(lp, out);
  std::istringstream in(out.str());
  const auto model = oracle::read_mps(in);
  EXPECT_EQ(model.row_names.size(), 2004u);
  EXPECT_EQ(model.col_names.size(), 3u);
  EXPECT_EQ(model.a, lp.rows);
  EXPECT_EQ(model.b, lp.lower);
}

}  // namespace
}  // namespace levelfit
