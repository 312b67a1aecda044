// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// detail lines. Usage: acceptance [path-to-levelfit-cli [work-dir]].
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levelfit/fit.hpp"
#include "levelfit/format.hpp"
#include "levelfit/random.hpp"
#include "levelfit/verify.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace levelfit;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

int failures = 0;

void report(int number, const std::string& title, const Outcome& o) {
  std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", number, title.c_str());
  for (const auto& d : o.details) std::printf("       %s\n", d.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(double v) { return format_double(v); }

PointCloud three_points() {
  PointCloud k;
  k.points.resize(3, 1);
  k.points << -0.5, 0.0, 0.25;
  return k;
}

/// Two clusters of 50 points, Box-Muller normals from fixed Philox streams,
/// sigma 0.1 around (-0.45,-0.35) and (0.4,0.45), clipped to [-0.95,0.95].
PointCloud two_clusters() {
  PointCloud k;
  k.points.resize(100, 2);
  const double centers[2][2] = {{-0.45, -0.35}, {0.4, 0.45}};
  for (int i = 0; i < 100; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const double u1 = 1.0 - uniform_coordinate(2024, 7, idx, 0);
    const double u2 = uniform_coordinate(2024, 7, idx, 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double z[2] = {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    for (int axis = 0; axis < 2; ++axis) {
      k.points(i, axis) = std::clamp(centers[i / 50][axis] + 0.1 * z[axis], -0.95, 0.95);
    }
  }
  return k;
}

struct TimedFit {
  FitResult result;
  double seconds;
};

std::vector<TimedFit> three_point_fits() {
  std::vector<TimedFit> fits;
  FitOptions o;
  o.grid = GridSpec::tensor(2001);
  for (int d : {2, 7, 17, 26}) {
    const auto t0 = std::chrono::steady_clock::now();
    FitResult r = fit(three_points(), BoxDomain::symmetric_unit(1), d, o);
    fits.push_back({std::move(r), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  }
  return fits;
}

void criterion_1(const std::vector<TimedFit>& fits) {
  Outcome o;
  const int expected[] = {1, 2, 3, 3};
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const FitResult& r = fits[i].result;
    const std::string d = "d=" + std::to_string(r.degree);
    o.check(r.optimal(), d + " status " + std::string(to_string(r.status)));
    if (!r.optimal()) continue;
    const int comps = count_components(r.polynomial, r.box, 512);
    o.check(comps == expected[i], d + " components at resolution 512: " + std::to_string(comps) + " (expected " +
                                      std::to_string(expected[i]) + ")");
    o.note(d + " components at resolution 8192 (diagnostic): " +
           std::to_string(count_components(r.polynomial, r.box, 8192)));
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) worst = std::min(worst, r.polynomial(three_points().points(k, 0)) - 1.0);
    o.check(worst >= -1e-6, d + " min_i p(x_i) - 1 = " + fmt(worst) + " (>= -1e-6)");
    o.check(fits[i].seconds < 10.0, d + " fit time " + fmt(std::round(fits[i].seconds * 1e4) / 1e4) + " s (< 10 s)");
  }
  report(1, "three-point structure: components (1,2,3,3), containment, runtime", o);
}

void criterion_2(const std::vector<TimedFit>& fits) {
  Outcome o;
  FitOptions opts;
  opts.grid = GridSpec::tensor(2001);
  const FitResult zero = fit(three_points(), BoxDomain::symmetric_unit(1), 0, opts);
  o.check(zero.optimal() && zero.w == 2.0, "w*_0 = " + fmt(zero.w) + " (exactly 2)");
  for (std::size_t i = 1; i < fits.size(); ++i) {
    const double a = fits[i - 1].result.w, b = fits[i].result.w;
    o.check(a >= b - 1e-6, "w*_" + std::to_string(fits[i - 1].result.degree) + " = " + fmt(a) + " >= w*_" +
                               std::to_string(fits[i].result.degree) + " = " + fmt(b));
  }
  report(2, "objective nonincreasing in degree on a fixed grid", o);
}

void criterion_3(const std::vector<TimedFit>& fits) {
  Outcome o;
  int checked = 0;
  for (const auto& f : fits) {
    const FitResult& r = f.result;
    const std::string d = "d=" + std::to_string(r.degree);
    if (!r.optimal()) continue;
    if (r.scan.min_value < -1e-9) {
      o.note(d + " skipped: scan minimum " + fmt(r.scan.min_value) + " < -1e-9");
      continue;
    }
    const VolumeEstimate v = mc_volume(r.polynomial, r.box, 1'000'000, 0);
    const ChebyshevReport c = chebyshev_check(r.polynomial, moment_vector(r.polynomial.basis(), r.box), v);
    o.check(c.pass, d + " w = " + fmt(c.w) + " >= vol " + fmt(v.estimate) + " - 3*" + fmt(v.standard_error));
    ++checked;
  }
  o.check(checked > 0, std::to_string(checked) + " fit(s) with a nonnegative scan checked");
  report(3, "Chebyshev volume bound at 1e6 samples", o);
}

void criterion_4(const std::vector<TimedFit>& fits) {
  Outcome o;
  std::mt19937_64 rng(404);
  std::normal_distribution<double> g;
  int agree = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 2;
    const int d = trial % 7;
    const BoxDomain box = n == 1 ? BoxDomain({-1.5}, {0.5}) : BoxDomain({-1.0, 0.0}, {1.0, 1.0});
    const PolyBasis basis = PolyBasis::monomial(n, d);
    Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
    for (auto& ci : c) ci = g(rng);
    const TraceReport t = trace_report(Polynomial(basis, c), box);
    agree += std::abs(t.trace_pm - t.integral) <= 1e-9 * (1.0 + std::abs(t.integral));
  }
  o.check(agree == 50, std::to_string(agree) + "/50 random polynomials satisfy |trace(PM) - sum p_a y_a| <= 1e-9 (1+|.|)");
  for (const auto& f : fits) {
    if (!f.result.optimal()) continue;
    const TraceReport t = trace_report(f.result.polynomial, f.result.box);
    o.check(std::abs(t.trace_pm - t.integral) <= 1e-9 * (1.0 + std::abs(t.integral)),
            "d=" + std::to_string(f.result.degree) + " trace(PM) = " + fmt(t.trace_pm) + ", integral = " +
                fmt(t.integral));
  }
  const Orthonormalizer orth = orthonormalize(moment_matrix(PolyBasis::monomial(1, 1), BoxDomain::symmetric_unit(1)));
  const double coeff = orth.orthonormal_coefficients()(1, 1);
  o.check(std::abs(coeff - std::sqrt(6.0) / 2.0) <= 1e-12, "orthonormal linear element coefficient " + fmt(coeff) +
                                                                "  (sqrt(6)/2 = " + fmt(std::sqrt(6.0) / 2.0) + ")");
  report(4, "trace identity and orthonormal basis", o);
}

void criterion_5() {
  Outcome o;
  std::mt19937_64 rng(505);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int matched = 0, bounded = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(u(rng) * 6);
    const int m = n + 1 + static_cast<int>(u(rng) * (12 - n));
    LpProblem lp;
    lp.rows.resize(m, n);
    for (auto& x : lp.rows.reshaped()) x = g(rng);
    Eigen::VectorXd x0(n);
    for (auto& x : x0) x = g(rng);
    Eigen::VectorXd lambda(m);
    for (int i = 0; i < m; ++i) lambda[i] = (i < n || u(rng) < 0.6) ? u(rng) + 0.05 : 0.0;
    lp.lower = lp.rows * x0 - Eigen::VectorXd::NullaryExpr(m, [&] { return u(rng) < 0.3 ? 0.0 : u(rng); });
    lp.objective = lp.rows.transpose() * lambda;
    lp.origin.assign(static_cast<std::size_t>(m), RowOrigin::kGeneric);
    const auto expected = oracle::vertex_enumeration(lp.rows, lp.lower, lp.objective);
    const LpSolution sol = solve(lp);
    if (!expected) continue;
    ++bounded;
    matched += sol.status == LpStatus::kOptimal && std::abs(sol.objective - *expected) <= 1e-7 * (1.0 + std::abs(*expected));
  }
  o.check(bounded == 100 && matched == 100,
          std::to_string(matched) + "/" + std::to_string(bounded) + " bounded LPs match vertex enumeration within 1e-7");

  int unbounded = 0, certified = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const int m = trial % 13;
    LpProblem lp;
    lp.rows.resize(m, n);
    for (auto& x : lp.rows.reshaped()) x = g(rng);
    Eigen::VectorXd x0(n);
    for (auto& x : x0) x = g(rng);
    lp.lower = lp.rows * x0 - Eigen::VectorXd::Ones(m);
    lp.objective.resize(n);
    for (auto& x : lp.objective) x = g(rng);
    lp.origin.assign(static_cast<std::size_t>(m), RowOrigin::kGeneric);
    const LpSolution sol = solve(lp);
    if (sol.status != LpStatus::kUnbounded) continue;
    ++unbounded;
    const bool ray_ok = sol.ray.size() == n && (m == 0 || (lp.rows * sol.ray).minCoeff() >= -1e-10) &&
                        lp.objective.dot(sol.ray) < -1e-10;
    certified += ray_ok;
  }
  o.check(unbounded > 0 && certified == unbounded,
          std::to_string(certified) + "/" + std::to_string(unbounded) + " unbounded results carry a verified ray");
  report(5, "LP solver soundness", o);
}

void criterion_6() {
  using boost::math::quadrature::gauss_kronrod;
  Outcome o;
  auto quad = [](const std::function<double(double)>& f, double a, double b) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 5, 1e-13);
  };
  int compared = 0, agree = 0;
  const BoxDomain box1({-0.7}, {1.3});
  for (const auto& alpha : enumerate_indices(1, 10)) {
    const int k = alpha[0];
    const double q = quad([k](double x) { return std::pow(x, k); }, -0.7, 1.3);
    const double scale = quad([k](double x) { return std::abs(std::pow(x, k)); }, -0.7, 1.3);
    ++compared;
    agree += std::abs(box_monomial_moment(box1, alpha) - q) <= 1e-12 * scale;
  }
  const BoxDomain box2({-1.2, 0.3}, {0.4, 1.1});
  for (const auto& alpha : enumerate_indices(2, 10)) {
    const int a = alpha[0], b = alpha[1];
    auto nested = [&](bool absolute) {
      return quad(
          [&](double x) {
            return quad(
                [&](double y) {
                  const double v = std::pow(x, a) * std::pow(y, b);
                  return absolute ? std::abs(v) : v;
                },
                0.3, 1.1);
          },
          -1.2, 0.4);
    };
    ++compared;
    agree += std::abs(box_monomial_moment(box2, alpha) - nested(false)) <= 1e-12 * nested(true);
  }
  o.check(agree == compared, std::to_string(agree) + "/" + std::to_string(compared) +
                                 " closed-form moments match adaptive quadrature within 1e-12 relative");

  std::mt19937_64 rng(606);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const BoxDomain square = BoxDomain::symmetric_unit(2);
  const PolyBasis basis = PolyBasis::monomial(2, 6);
  const MomentVector y = moment_vector(basis, square);
  int within = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
    for (auto& ci : c) ci = g(rng);
    const Polynomial p(basis, c);
    double sum = 0.0, sum_sq = 0.0;
    constexpr int kSamples = 1'000'000;
    for (int i = 0; i < kSamples; ++i) {
      const double x[2] = {u(rng), u(rng)};
      const double f = p(x);
      sum += f;
      sum_sq += f * f;
    }
    const double mean = sum / kSamples;
    const double sigma = std::sqrt((sum_sq / kSamples - mean * mean) / kSamples) * 4.0;
    within += std::abs(y.integrate(p) - 4.0 * mean) <= 3.0 * sigma;
  }
  o.check(within == 10, std::to_string(within) + "/10 degree-6 integrals within 3 sigma of Monte Carlo at 1e6 samples");
  report(6, "moment correctness", o);
}

std::vector<FitResult> cluster_fits() {
  std::vector<FitResult> fits;
  FitOptions o;
  o.grid = GridSpec::tensor(201);
  for (int d : {2, 5, 9, 14}) fits.push_back(fit(two_clusters(), BoxDomain::symmetric_unit(2), d, o));
  return fits;
}

void criterion_7(const std::vector<FitResult>& fits) {
  Outcome o;
  bool disconnected = false;
  for (const auto& r : fits) {
    const std::string d = "d=" + std::to_string(r.degree);
    if (!r.optimal()) {
      o.check(false, d + " status " + std::string(to_string(r.status)) + ": " + r.message);
      continue;
    }
    const int comps = count_components(r.polynomial, r.box, 512);
    if (r.degree == 2) o.check(comps == 1, d + " components " + std::to_string(comps) + " (expected 1)");
    else o.note(d + " components " + std::to_string(comps) + ", w = " + fmt(r.w));
    if (r.degree <= 14 && comps >= 2) disconnected = true;
    o.check(r.contains_cloud(), d + " containment margin " + fmt(r.containment_margin));
  }
  o.check(disconnected, "some degree <= 14 yields >= 2 components");
  report(7, "two-cluster disconnection", o);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_points(const fs::path& path, const PointCloud& k) {
  std::ofstream out(path);
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    for (Eigen::Index j = 0; j < k.points.cols(); ++j) out << (j ? "," : "") << fmt(k.points(i, j));
    out << "\n";
  }
}

void criterion_8(const std::string& cli, const fs::path& work) {
  Outcome o;
  if (cli.empty()) {
    o.check(false, "no CLI path given");
    report(8, "end-to-end determinism", o);
    return;
  }
  fs::create_directories(work);
  write_points(work / "three_points.csv", three_points());
  write_points(work / "two_clusters.csv", two_clusters());
  struct Case {
    std::string name, points, box;
    std::vector<int> degrees;
    int grid;
  };
  const std::vector<Case> cases = {{"line", "three_points.csv", "-1,1", {2, 7, 17, 26}, 2001},
                                   {"clusters", "two_clusters.csv", "-1,1;-1,1", {2, 5, 9, 14}, 201}};
  for (const auto& c : cases) {
    for (int d : c.degrees) {
      std::string outputs[2][2];
      for (int run = 0; run < 2; ++run) {
        const fs::path dir = work / (c.name + "_d" + std::to_string(d) + (run ? "_b" : "_a"));
        fs::remove_all(dir);
        const std::string cmd = "\"" + cli + "\" fit --points \"" + (work / c.points).string() + "\" --box \"" + c.box +
                                "\" --degree " + std::to_string(d) + " --grid " + std::to_string(c.grid) +
                                " --seed 1 --out \"" + dir.string() + "\" > \"" + (dir.string() + ".log") + "\" 2>&1";
        const int status = std::system(cmd.c_str());
        if (status == -1) o.check(false, "could not run " + cmd);
        outputs[run][0] = slurp(dir / "coeffs.json");
        outputs[run][1] = slurp(dir / "report.json");
      }
      const bool same = !outputs[0][0].empty() && !outputs[0][1].empty() && outputs[0][0] == outputs[1][0] &&
                        outputs[0][1] == outputs[1][1];
      o.check(same, c.name + " d=" + std::to_string(d) + " coeffs.json and report.json byte-identical across two runs");
    }
  }
  report(8, "end-to-end determinism", o);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "levelfit_acceptance";

  const auto fits = three_point_fits();
  criterion_1(fits);
  criterion_2(fits);
  criterion_3(fits);
  criterion_4(fits);
  criterion_5();
  criterion_6();
  criterion_7(cluster_fits());
  criterion_8(cli, work);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
