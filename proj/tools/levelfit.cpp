// levelfit: fit polynomial superlevel sets around point clouds.
//
// Exit codes: 0 success, 2 usage, 3 input file, 4 solver, 5 verification
// (containment, Chebyshev bound, trace identity, or sweep monotonicity),
// 6 output I/O, 1 unexpected internal error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "levelfit/fit.hpp"
#include "levelfit/format.hpp"
#include "levelfit/io.hpp"
#include "levelfit/lp.hpp"
#include "levelfit/verify.hpp"

namespace fs = std::filesystem;
using namespace levelfit;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIngest = 3,
  kSolve = 4,
  kVerification = 5,
  kOutput = 6,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string points;
  std::string box;
  int degree = 2;
  std::string degrees;
  std::string basis = "monomial";
  int grid = 0;
  std::int64_t grid_samples = 0;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::int64_t mc_samples = 1'000'000;
  double inflate = 1.0;
  std::string solver;
  double coefficient_bound = 0.0;
  std::string coeffs;
  int resolution = 0;
  int component_resolution = 0;
};

void add_input_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--points", cfg.points, "CSV point cloud, one point per line")->required();
  cmd->add_option("--box", cfg.box, "Bounding box \"l1,u1;l2,u2;...\"")->required();
  cmd->add_option("--basis", cfg.basis, "monomial or chebyshev")->check(CLI::IsMember({"monomial", "chebyshev"}));
  auto* grid = cmd->add_option("--grid", cfg.grid, "Tensor grid nodes per axis")->check(CLI::Range(2, 10'000'000));
  auto* samples =
      cmd->add_option("--grid-samples", cfg.grid_samples, "Quasi-random grid size")->check(CLI::Range(1, 10'000'000));
  grid->excludes(samples);
  cmd->add_option("--seed", cfg.seed, "Seed for quasi-random grids and Monte Carlo sampling");
  cmd->add_option("--inflate", cfg.inflate, "Box inflation factor about its center")->check(CLI::Range(1.0, 1e6));
  cmd->add_option("--solver", cfg.solver, "Solver options \"max_iters=..,feas_tol=..,opt_tol=..\"");
  cmd->add_option("--coefficient-bound", cfg.coefficient_bound, "Add |v_k| <= bound rows (0 = off)")
      ->check(CLI::NonNegativeNumber);
}

void add_verify_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo samples for the volume estimate")
      ->check(CLI::Range(std::int64_t{1000}, std::int64_t{1'000'000'000}));
  cmd->add_option("--component-resolution", cfg.component_resolution, "Cells per axis for component counting (0 = auto)");
}

PointCloud load_points(const RunConfig& cfg) { return ingest_points(cfg.points); }

BoxDomain load_box(const std::string& text) {
  try {
    return parse_box(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--box: ") + e.what());
  }
}

FitOptions fit_options(const RunConfig& cfg) {
  FitOptions o;
  o.basis = basis_kind_from_string(cfg.basis);
  if (cfg.grid > 0) o.grid = GridSpec::tensor(cfg.grid);
  if (cfg.grid_samples > 0) o.grid = GridSpec::quasi_random(cfg.grid_samples, cfg.seed);
  o.inflate = cfg.inflate;
  if (cfg.coefficient_bound > 0) o.coefficient_bound = cfg.coefficient_bound;
  try {
    if (!cfg.solver.empty()) o.solver = SolverOptions::parse(cfg.solver);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--solver: ") + e.what());
  }
  return o;
}

VerifyOptions verify_options(const RunConfig& cfg, const FitOptions& fit_opts, int dimension) {
  VerifyOptions v;
  v.mc_samples = cfg.mc_samples;
  v.seed = cfg.seed;
  v.component_resolution = cfg.component_resolution;
  const GridSpec spec = fit_opts.grid.value_or(GridSpec::default_for(dimension));
  v.fit_points_per_axis = spec.points_per_axis;
  return v;
}

fs::path output_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw OutputError("cannot create output directory " + cfg.out + ": " + ec.message());
  return cfg.out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw OutputError("write failed for " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json box_json(const BoxDomain& box) { return {{"lower", box.lower()}, {"upper", box.upper()}}; }

/// coeffs.json: the polynomial plus the box it was fitted on.
nlohmann::json coeffs_json(const Polynomial& p, const BoxDomain& box) {
  nlohmann::json j = to_json(p);
  j["domain"] = box_json(box);
  return j;
}

nlohmann::json config_json(const RunConfig& cfg, const FitOptions& o, int dimension) {
  const GridSpec spec = o.grid.value_or(GridSpec::default_for(dimension));
  nlohmann::json grid;
  if (spec.points_per_axis) grid["points_per_axis"] = *spec.points_per_axis;
  if (spec.sample_count) {
    grid["samples"] = *spec.sample_count;
    grid["seed"] = spec.seed;
  }
  return {{"basis", cfg.basis},
          {"grid", grid},
          {"inflate", cfg.inflate},
          {"seed", cfg.seed},
          {"mc_samples", cfg.mc_samples},
          {"coefficient_bound", cfg.coefficient_bound > 0 ? nlohmann::json(cfg.coefficient_bound) : nlohmann::json()},
          {"solver",
           {{"max_iters", o.solver.max_iters},
            {"feas_tol", o.solver.feas_tol},
            {"opt_tol", o.solver.opt_tol},
            {"pivot_tol", o.solver.pivot_tol}}}};
}

/// Verification verdict: containment, the Chebyshev bound where it is
/// certified (p >= 0 on the scan grid), and the trace identity.
bool verification_passes(const VerificationReport& v) {
  if (!v.containment_ok) return false;
  if (v.scan.min_value >= -1e-9 && !v.chebyshev.pass) return false;
  if (v.trace && !v.trace->identity_holds) return false;
  return true;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_fit(const RunConfig& cfg) {
  const PointCloud cloud = load_points(cfg);
  const BoxDomain box = load_box(cfg.box);
  const FitOptions o = fit_options(cfg);
  const fs::path dir = output_dir(cfg);

  const FitResult r = fit(cloud, box, cfg.degree, o);
  nlohmann::json report;
  report["config"] = config_json(cfg, o, box.dimension());
  report["fit"] = to_json(r);
  std::cout << "degree " << r.degree << ": " << to_string(r.status) << "\n";
  if (!r.optimal()) {
    write_json(dir / "report.json", report);
    std::cerr << "error: " << r.message << "\n";
    return kSolve;
  }
  const VerificationReport v = verify_polynomial(r.polynomial, r.box, cloud.points, verify_options(cfg, o, box.dimension()));
  report["verification"] = to_json(v);
  write_json(dir / "coeffs.json", coeffs_json(r.polynomial, r.box));
  write_json(dir / "report.json", report);

  std::cout << "w = " << format_double(r.w) << "\n"
            << "mc volume = " << format_double(v.volume.estimate) << " +- " << format_double(v.volume.standard_error)
            << "\n"
            << "containment margin = " << format_double(v.containment_margin) << "\n";
  if (v.components) std::cout << "components = " << *v.components << "\n";
  print_warnings(r.warnings);
  print_warnings(v.warnings);
  std::cout << "wrote " << (dir / "coeffs.json").string() << " and " << (dir / "report.json").string() << "\n";
  return verification_passes(v) ? kOk : kVerification;
}

int cmd_sweep(const RunConfig& cfg) {
  const PointCloud cloud = load_points(cfg);
  const BoxDomain box = load_box(cfg.box);
  std::vector<int> degrees;
  try {
    degrees = parse_degrees(cfg.degrees);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--degrees: ") + e.what());
  }
  for (std::size_t i = 1; i < degrees.size(); ++i) {
    if (degrees[i] <= degrees[i - 1]) throw UsageError("--degrees must be strictly ascending");
  }
  const FitOptions o = fit_options(cfg);
  const fs::path dir = output_dir(cfg);
  const int n = box.dimension();
  const int resolution = cfg.component_resolution > 0 ? cfg.component_resolution : (n <= 2 ? 512 : 128);

  std::ostringstream table;
  table << "degree,status,w,components,containment_margin,min_scan_value,lp_iterations,seconds\n";
  nlohmann::json summary;
  summary["config"] = config_json(cfg, o, n);
  summary["fits"] = nlohmann::json::array();
  bool all_optimal = true, all_contained = true;
  std::vector<FitResult> fits;
  std::printf("%6s  %-14s  %-20s  %10s  %8s\n", "degree", "status", "w", "components", "seconds");
  for (int d : degrees) {
    const auto t0 = std::chrono::steady_clock::now();
    FitResult r = fit(cloud, box, d, o);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::optional<int> components;
    if (r.optimal() && n <= 3) components = count_components(r.polynomial, r.box, resolution);
    all_optimal = all_optimal && r.optimal();
    all_contained = all_contained && (!r.optimal() || r.contains_cloud());

    const std::string comp = components ? std::to_string(*components) : "";
    table << d << "," << to_string(r.status) << "," << format_double(r.w) << "," << comp << ","
          << format_double(r.containment_margin) << "," << format_double(r.scan.min_value) << "," << r.lp_iterations
          << "," << format_double(seconds) << "\n";
    std::printf("%6d  %-14s  %-20s  %10s  %8.3f\n", d, std::string(to_string(r.status)).c_str(),
                format_double(r.w).c_str(), comp.c_str(), seconds);
    nlohmann::json entry = to_json(r);
    entry["components"] = components ? nlohmann::json(*components) : nlohmann::json();
    summary["fits"].push_back(entry);
    if (r.optimal()) write_json(dir / ("coeffs_d" + std::to_string(d) + ".json"), coeffs_json(r.polynomial, r.box));
    if (!r.optimal()) std::cerr << "degree " << d << ": " << r.message << "\n";
    print_warnings(r.warnings);
    fits.push_back(std::move(r));
  }
  bool monotone = true;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    for (std::size_t j = i + 1; j < fits.size(); ++j) {
      if (fits[i].optimal() && fits[j].optimal() && fits[i].w < fits[j].w - kMonotonicityTolerance) monotone = false;
    }
  }
  summary["monotone"] = monotone;
  write_text(dir / "sweep.csv", table.str());
  write_json(dir / "sweep.json", summary);
  std::cout << "w nonincreasing in degree: " << (monotone ? "yes" : "NO") << "\n";
  std::cout << "wrote " << (dir / "sweep.csv").string() << " and " << (dir / "sweep.json").string() << "\n";
  if (!all_optimal) return kSolve;
  return monotone && all_contained ? kOk : kVerification;
}

std::pair<Polynomial, BoxDomain> load_coeffs(const RunConfig& cfg) {
  std::ifstream in(cfg.coeffs);
  if (!in) throw IngestError(cfg.coeffs + ": cannot open file");
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    Polynomial p = polynomial_from_json(j);
    if (!cfg.box.empty()) return {std::move(p), load_box(cfg.box)};
    if (!j.contains("domain")) throw IngestError(cfg.coeffs + ": no \"domain\" entry; pass --box");
    BoxDomain box(j.at("domain").at("lower").get<std::vector<double>>(),
                  j.at("domain").at("upper").get<std::vector<double>>());
    return {std::move(p), std::move(box)};
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(cfg.coeffs + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IngestError(cfg.coeffs + ": " + e.what());
  }
}

int cmd_plotdata(const RunConfig& cfg) {
  auto [p, box] = load_coeffs(cfg);
  const int n = box.dimension();
  const int resolution = cfg.resolution > 0 ? cfg.resolution : (n == 1 ? 1001 : n == 2 ? 201 : 41);
  if (resolution < 2) throw UsageError("--resolution must be >= 2");
  std::ostringstream text;
  write_plot_data(text, p, box, resolution);
  if (cfg.out == "-") {
    std::cout << text.str();
  } else {
    const fs::path path(cfg.out);
    if (path.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(path.parent_path(), ec);
      if (ec) throw OutputError("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    write_text(path, text.str());
    std::cerr << "wrote " << path.string() << "\n";
  }
  return kOk;
}

int cmd_verify(const RunConfig& cfg) {
  auto [p, box] = load_coeffs(cfg);
  const PointCloud cloud = load_points(cfg);
  if (cloud.dimension() != box.dimension())
    throw IngestError(cfg.points + ": dimension " + std::to_string(cloud.dimension()) + " does not match the box");
  const fs::path dir = output_dir(cfg);
  VerifyOptions v;
  v.mc_samples = cfg.mc_samples;
  v.seed = cfg.seed;
  v.component_resolution = cfg.component_resolution;
  if (cfg.grid > 0) v.fit_points_per_axis = cfg.grid;
  const VerificationReport r = verify_polynomial(p, box, cloud.points, v);
  write_json(dir / "report.json", nlohmann::json{{"verification", to_json(r)}});
  std::cout << "w = " << format_double(r.w) << "\nmc volume = " << format_double(r.volume.estimate) << " +- "
            << format_double(r.volume.standard_error) << "\ncontainment margin = "
            << format_double(r.containment_margin) << "\n";
  if (r.components) std::cout << "components = " << *r.components << "\n";
  print_warnings(r.warnings);
  return verification_passes(r) ? kOk : kVerification;
}

int cmd_export_mps(const RunConfig& cfg) {
  const PointCloud cloud = load_points(cfg);
  const BoxDomain box = load_box(cfg.box);
  FitOptions o = fit_options(cfg);
  const BoxDomain eff = box.inflated(o.inflate);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    if (!eff.contains(point(cloud.points, i)))
      throw UsageError("point " + std::to_string(i + 1) + " of the cloud lies outside the bounding box");
  }
  const PolyBasis basis = o.basis == BasisKind::kMonomial ? PolyBasis::monomial(box.dimension(), cfg.degree)
                                                          : PolyBasis::chebyshev(box.dimension(), cfg.degree, eff);
  const Points grid = build_grid(eff, o.grid.value_or(GridSpec::default_for(box.dimension())));
  const LpProblem lp = assemble(cloud, grid, basis, moment_vector(basis, eff));
  std::ostringstream text;
  export_mps(lp, text);
  const fs::path path = cfg.out == "." ? fs::path("levelfit.mps") : fs::path(cfg.out);
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw OutputError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  write_text(path, text.str());
  std::cout << "rows: " << lp.num_rows() << " (" << cloud.size() << " cloud, " << grid.rows() << " grid)\n"
            << "columns: " << lp.num_cols() << "\n"
            << "wrote " << path.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit polynomial superlevel sets {p >= 1} around point clouds by L1-norm linear programming"};
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);
  RunConfig cfg;

  auto* fit_cmd = app.add_subcommand("fit", "Fit one degree, verify, write coeffs.json and report.json");
  add_input_options(fit_cmd, cfg);
  add_verify_options(fit_cmd, cfg);
  fit_cmd->add_option("--degree", cfg.degree, "Polynomial degree")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--out", cfg.out, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "Fit a strictly ascending list of degrees, write sweep.csv");
  add_input_options(sweep_cmd, cfg);
  sweep_cmd->add_option("--degrees", cfg.degrees, "Comma-separated degrees, e.g. 2,7,17,26")->required();
  sweep_cmd->add_option("--component-resolution", cfg.component_resolution, "Cells per axis (0 = auto)");
  sweep_cmd->add_option("--out", cfg.out, "Output directory");

  auto* plot_cmd = app.add_subcommand("plotdata", "Evaluate a fitted polynomial on a tensor grid as CSV");
  plot_cmd->add_option("--coeffs", cfg.coeffs, "coeffs.json written by fit or sweep")->required();
  plot_cmd->add_option("--box", cfg.box, "Override the box stored with the coefficients");
  plot_cmd->add_option("--resolution", cfg.resolution, "Nodes per axis (default 1001/201/41 for n=1/2/3)");
  plot_cmd->add_option("--out", cfg.out, "Output CSV path, or - for stdout (default)");

  auto* verify_cmd = app.add_subcommand("verify", "Re-run verification on stored coefficients");
  verify_cmd->add_option("--coeffs", cfg.coeffs, "coeffs.json")->required();
  verify_cmd->add_option("--points", cfg.points, "CSV point cloud")->required();
  verify_cmd->add_option("--box", cfg.box, "Override the box stored with the coefficients");
  verify_cmd->add_option("--grid", cfg.grid, "Fit grid nodes per axis (sets the scan refinement)");
  verify_cmd->add_option("--seed", cfg.seed, "Monte Carlo seed");
  add_verify_options(verify_cmd, cfg);
  verify_cmd->add_option("--out", cfg.out, "Output directory for report.json");

  auto* mps_cmd = app.add_subcommand("export-mps", "Write the fit LP in fixed-format MPS");
  add_input_options(mps_cmd, cfg);
  mps_cmd->add_option("--degree", cfg.degree, "Polynomial degree")->check(CLI::NonNegativeNumber);
  mps_cmd->add_option("--out", cfg.out, "Output MPS path (default levelfit.mps)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (plot_cmd->parsed() && plot_cmd->count("--out") == 0) cfg.out = "-";

  try {
    if (fit_cmd->parsed()) return cmd_fit(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (plot_cmd->parsed()) return cmd_plotdata(cfg);
    if (verify_cmd->parsed()) return cmd_verify(cfg);
    if (mps_cmd->parsed()) return cmd_export_mps(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IngestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIngest;
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOutput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolve;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
