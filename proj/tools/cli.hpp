#pragma once

// `robot` command-line front end. run() is the whole program minus process
// setup so the test suite can drive it in-process.
//
// Exit codes: 0 ok, 1 unreadable or malformed CSV, 2 bad flags, 3 solver
// failure. Errors go to `err` as one-line JSON {"error", "detail"}.

#include "robot/robot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace robot::cli {

using Json = nlohmann::ordered_json;

enum Exit { kOk = 0, kCsv = 1, kFlags = 2, kSolver = 3 };

struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Flag parsing helpers

inline double parse_real(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw FlagError(flag + ": not a number: '" + text + "'");
  }
  if (used != text.size()) throw FlagError(flag + ": not a number: '" + text + "'");
  return v;
}

/// Positive real or "inf".
inline double parse_lambda(const std::string& text) {
  if (text == "inf" || text == "+inf") return kInfinity;
  const double v = parse_real(text, "--lambda");
  if (!(v > 0.0) || !std::isfinite(v)) throw FlagError("--lambda must be a positive number or 'inf'");
  return v;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, flag));
  if (out.empty()) throw FlagError(flag + ": empty list");
  return out;
}

inline Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())); }

inline CostSpec parse_cost(const std::string& name) {
  if (name == "sqeuclidean") return {CostKind::squared_euclidean};
  if (name == "euclidean") return {CostKind::euclidean};
  throw FlagError("--cost must be sqeuclidean or euclidean");
}

inline DetectMethod parse_method(const std::string& name) {
  if (name == "exact") return DetectMethod::exact;
  if (name == "sinkhorn") return DetectMethod::sinkhorn;
  throw FlagError("--method must be exact or sinkhorn");
}

inline Json lambda_json(double lambda) { return std::isfinite(lambda) ? Json(lambda) : Json("inf"); }

inline Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw CsvError(path + ": cannot open for writing");
  return f;
}

inline void emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------
// Commands. Each fills its option struct through CLI11 and returns the
// JSON document to print.

struct SolveArgs {
  std::string source, target, lambda, method = "exact", cost = "sqeuclidean", plan_out;
  double alpha = 0.05;
  double tol = 1e-9;
  long max_iter = 10000;
};

inline Json cmd_solve(const SolveArgs& a) {
  const double lambda = parse_lambda(a.lambda);
  const DetectMethod method = parse_method(a.method);
  const CostSpec spec = parse_cost(a.cost);
  if (method == DetectMethod::sinkhorn && !(a.alpha > 0.0)) throw FlagError("--alpha must be > 0");
  const DiscreteMeasure mu = read_measure_csv(a.source);
  const DiscreteMeasure nu = read_measure_csv(a.target);
  if (mu.dim() != nu.dim()) throw CsvError("source and target have different dimensions");

  const CostMatrix C = cost_matrix(mu.points(), nu.points(), spec);
  TransportPlan plan;
  SolveReport rep;
  if (method == DetectMethod::exact)
    std::tie(plan, rep) = solve_transport(mu, nu, truncate(C, lambda));
  else
    std::tie(plan, rep) = sinkhorn_solve(mu, nu, truncate(C, lambda), a.alpha, a.tol, a.max_iter);

  double slack_l1 = 0.0;
  if (std::isfinite(lambda)) {
    const ReconstructOptions gate{std::max(1e-6, a.tol)};
    if (plan.row_residual > gate.marginal_tol || plan.col_residual > gate.marginal_tol)
      throw SolverError("solve: no convergence within max_iter");
    const RobotSolution sol = f2_to_f1(plan, C, lambda, gate);
    rep.objective = sol.objective;
    slack_l1 = sol.s1.cwiseAbs().sum() + sol.t1.cwiseAbs().sum();
  }
  if (!a.plan_out.empty()) {
    auto f = open_out(a.plan_out);
    write_matrix_csv(f, plan.mass);
  }
  Json j;
  j["objective"] = rep.objective;
  j["lambda"] = lambda_json(lambda);
  j["method"] = a.method;
  j["cost"] = a.cost;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["row_residual"] = rep.row_residual;
  j["col_residual"] = rep.col_residual;
  j["slack_l1"] = slack_l1;
  j["seconds"] = rep.seconds;
  return j;
}

struct DetectArgs {
  std::string contaminated, clean, lambda, method = "exact", cost = "sqeuclidean";
  double alpha = 0.01;
  double percentile = 99.0;
  long subsample = 0;  // 0: half the clean sample, at most 500
  std::uint64_t seed = 0;
  std::optional<double> threshold;
};

inline Json cmd_detect(const DetectArgs& a) {
  const DetectMethod method = parse_method(a.method);
  const CostSpec spec = parse_cost(a.cost);
  const bool automatic = a.lambda == "auto";
  const double given = automatic ? 0.0 : parse_lambda(a.lambda);
  if (method == DetectMethod::sinkhorn && !(a.alpha > 0.0)) throw FlagError("--alpha must be > 0");
  if (!(a.percentile > 0.0 && a.percentile <= 100.0)) throw FlagError("--percentile must lie in (0, 100]");
  const DiscreteMeasure x = read_measure_csv(a.contaminated);
  const DiscreteMeasure y = read_measure_csv(a.clean);
  if (x.dim() != y.dim()) throw CsvError("contaminated and clean data have different dimensions");

  double lambda = given;
  if (automatic) {
    const Index sub = a.subsample > 0 ? a.subsample : std::min<Index>(y.size() / 2, 500);
    if (sub < 1) throw FlagError("--lambda auto needs at least two clean points");
    lambda = select_lambda(y, sub, a.percentile, spec, a.seed);
  }
  DetectOptions opt;
  opt.threshold = a.threshold;
  const DetectionResult r = detect_outliers(x, y, spec, lambda, method, a.alpha, opt);
  Json j;
  j["outlier_indices"] = r.outlier_indices;
  j["n_outliers"] = r.outlier_indices.size();
  j["lambda"] = lambda_json(lambda);
  j["lambda_source"] = automatic ? "auto" : "flag";
  j["method"] = a.method;
  j["threshold"] = r.threshold;
  j["slack"] = vector_json(r.s1);
  j["seconds"] = r.report.seconds;
  return j;
}

struct EstimateArgs {
  std::string data, lambda = "0.5", true_mean, trace_out, noise = "gaussian";
  SgdConfig cfg;
};

inline Json cmd_estimate_mean(EstimateArgs a) {
  a.cfg.lambda = parse_lambda(a.lambda);
  if (a.noise == "cauchy")
    a.cfg.noise = GeneratorNoise::cauchy;
  else if (a.noise != "gaussian")
    throw FlagError("--noise must be gaussian or cauchy");
  const DiscreteMeasure x = read_measure_csv(a.data);
  std::optional<Vector> truth;
  if (!a.true_mean.empty()) {
    truth = to_vector(parse_list(a.true_mean, "--true-mean"));
    if (truth->size() != x.dim()) throw FlagError("--true-mean has the wrong dimension");
  }
  try {
    validate_config(a.cfg, x.dim());
  } catch (const InvalidArgument& e) {
    throw FlagError(e.what());
  }
  const auto start = std::chrono::steady_clock::now();
  const EstimateTrace tr = estimate_mean(x, a.cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!a.trace_out.empty()) {
    auto f = open_out(a.trace_out);
    write_measure_csv(f, make_measure(tr.thetas));
  }
  Json j;
  j["theta"] = vector_json(tr.theta);
  j["error_vs"] = truth ? Json((tr.theta - *truth).norm()) : Json(nullptr);
  j["trace_path"] = a.trace_out.empty() ? Json(nullptr) : Json(a.trace_out);
  j["lambda"] = lambda_json(a.cfg.lambda);
  j["seed"] = a.cfg.seed;
  j["seconds"] = seconds;
  return j;
}

struct GenArgs {
  std::string model, clean_mean, outlier_mean, out, mask_out, reference_out;
  long n = 1000;
  long d = 5;
  double eps = 0.2;
  bool fixed_count = false;
  long n_clean = 800;
  long n_out = 200;
  long n_reference = 0;
  double separation = 6.0;
  std::uint64_t seed = 0;
};

inline void write_mask(const std::string& path, const std::vector<bool>& mask) {
  auto f = open_out(path);
  f << "outlier\n";
  for (bool b : mask) f << (b ? 1 : 0) << '\n';
}

inline Json cmd_gen(const GenArgs& a, std::ostream& out) {
  std::optional<LabelledSample> huber;
  std::optional<ClusterSample> clusters;
  try {
    if (a.model == "gaussian-huber" || a.model == "cauchy-huber") {
      const Vector c0 = a.clean_mean.empty() ? Vector::Zero(a.d) : to_vector(parse_list(a.clean_mean, "--clean-mean"));
      const Vector c1 = a.outlier_mean.empty() ? Vector::Constant(a.d, 2.0) : to_vector(parse_list(a.outlier_mean, "--outlier-mean"));
      huber = a.model == "gaussian-huber" ? gen_huber_gaussian(a.n, a.d, a.eps, c0, c1, a.seed, a.fixed_count)
                                          : gen_huber_cauchy(a.n, a.d, a.eps, c0, c1, a.seed, a.fixed_count);
    } else if (a.model == "clusters") {
      clusters = gen_cluster_outliers(a.n_clean, a.n_out, a.d, a.separation, a.seed, a.n_reference);
    } else {
      throw FlagError("--model must be gaussian-huber, cauchy-huber or clusters");
    }
  } catch (const InvalidArgument& e) {
    throw FlagError(e.what());
  }
  const DiscreteMeasure& data = huber ? huber->data : clusters->contaminated;
  const std::vector<bool>& mask = huber ? huber->outlier : clusters->outlier;
  if (a.out.empty()) {
    write_measure_csv(out, data);
  } else {
    auto f = open_out(a.out);
    write_measure_csv(f, data);
  }
  if (!a.mask_out.empty()) write_mask(a.mask_out, mask);
  if (clusters && !a.reference_out.empty()) {
    auto f = open_out(a.reference_out);
    write_measure_csv(f, clusters->reference);
  }
  Json j;
  j["model"] = a.model;
  j["n"] = data.size();
  j["d"] = data.dim();
  j["n_outliers"] = std::count(mask.begin(), mask.end(), true);
  j["seed"] = a.seed;
  return j;
}

struct BenchArgs {
  long trials = 200;
  long max_size = 8;
  std::uint64_t seed = 1;
  std::string lambdas = "0.1,0.5,1";
  std::string csv_out;
};

inline Json cmd_bench_equivalence(const BenchArgs& a) {
  const std::vector<double> lambdas = parse_list(a.lambdas, "--lambdas");
  if (a.trials < 1) throw FlagError("--trials must be >= 1");
  if (a.max_size < 2) throw FlagError("--max-size must be >= 2");
  for (double l : lambdas)
    if (!(l > 0.0) || !std::isfinite(l)) throw FlagError("--lambdas must be positive finite numbers");
  const auto start = std::chrono::steady_clock::now();
  const EquivalenceReport rep = equivalence_suite(a.seed, a.trials, a.max_size, lambdas);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!a.csv_out.empty()) {
    auto f = open_out(a.csv_out);
    f << "lambda,seed,trial,cost,n,m,gap_f1_f2,gap_f1_f3,gap_f1_f4,reconstruction_gap\n";
    for (const auto& t : rep.trials) {
      if (!t.error.empty()) continue;
      f << format_number(t.lambda) << ',' << a.seed << ',' << t.trial << ',' << to_string(t.kind) << ',' << t.n << ',' << t.m << ','
        << format_number(std::abs(t.f1 - t.f2)) << ',' << format_number(std::abs(t.f1 - t.f3)) << ',' << format_number(std::abs(t.f1 - t.f4))
        << ',' << format_number(std::max(std::abs(t.reconstructed - t.f2), t.reconstruction_residual)) << '\n';
    }
  }
  Json j;
  j["trials"] = a.trials;
  j["max_size"] = a.max_size;
  j["seed"] = a.seed;
  j["max_gap_f1_f2"] = rep.gap_f1_f2;
  j["max_gap_f1_f3"] = rep.gap_f1_f3;
  j["max_gap_f1_f4"] = rep.gap_f1_f4;
  j["max_reconstruction_gap"] = rep.reconstruction_gap;
  j["failures"] = rep.failures;
  Json errs = Json::array();
  for (const auto& t : rep.trials)
    if (!t.error.empty()) errs.push_back({{"trial", t.trial}, {"error", t.error}});
  j["failed_trials"] = errs;
  j["seconds"] = seconds;
  return j;
}

struct ScanArgs {
  std::string contaminated, clean, grid, method = "exact", cost = "sqeuclidean", csv_out;
  double alpha = 0.01;
};

inline Json cmd_scan(const ScanArgs& a) {
  const std::vector<double> grid = parse_list(a.grid, "--grid");
  const DetectMethod method = parse_method(a.method);
  const CostSpec spec = parse_cost(a.cost);
  if (grid.size() < 2) throw FlagError("--grid needs at least two values");
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (!(grid[k] > 0.0) || (k > 0 && !(grid[k] > grid[k - 1]))) throw FlagError("--grid must be positive and strictly ascending");
  const DiscreteMeasure x = read_measure_csv(a.contaminated);
  const DiscreteMeasure y = read_measure_csv(a.clean);
  if (x.dim() != y.dim()) throw CsvError("contaminated and clean data have different dimensions");
  const auto start = std::chrono::steady_clock::now();
  const LambdaScan scan = scan_lambda(x, y, spec, grid, method, a.alpha);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!a.csv_out.empty()) {
    auto f = open_out(a.csv_out);
    f << "lambda,n_outliers\n";
    for (const auto& r : scan.results) f << format_number(r.lambda) << ',' << r.outlier_indices.size() << '\n';
  }
  Json per = Json::array();
  for (const auto& r : scan.results) per.push_back({{"lambda", r.lambda}, {"outlier_indices", r.outlier_indices}});
  Json pairs = Json::array();
  for (std::size_t k = 0; k < scan.nested.size(); ++k)
    pairs.push_back({{"lambda_small", grid[k]}, {"lambda_large", grid[k + 1]}, {"nested", static_cast<bool>(scan.nested[k])}});
  Json j;
  j["method"] = a.method;
  j["results"] = per;
  j["pairs"] = pairs;
  j["violations"] = scan.violations.size();
  j["seconds"] = seconds;
  return j;
}

// ---------------------------------------------------------------------------

inline void report_error(std::ostream& err, const std::string& kind, const std::string& detail) {
  err << Json{{"error", kind}, {"detail", detail}}.dump() << '\n';
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Outlier-robust optimal transport tools", "robot"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Robust OT between two point clouds");
  s->add_option("--source", solve.source, "source CSV")->required();
  s->add_option("--target", solve.target, "target CSV")->required();
  s->add_option("--lambda", solve.lambda, "truncation parameter (positive or inf)")->required();
  s->add_option("--method", solve.method, "exact|sinkhorn")->capture_default_str();
  s->add_option("--alpha", solve.alpha, "entropic regularization")->capture_default_str();
  s->add_option("--cost", solve.cost, "sqeuclidean|euclidean")->capture_default_str();
  s->add_option("--tol", solve.tol, "sinkhorn L1 marginal tolerance")->capture_default_str();
  s->add_option("--max-iter", solve.max_iter, "sinkhorn iteration cap")->capture_default_str();
  s->add_option("--plan-out", solve.plan_out, "write the n x m plan on the truncated cost");

  DetectArgs detect;
  auto* d = app.add_subcommand("detect", "Flag outliers in contaminated data against a clean reference");
  d->add_option("--contaminated", detect.contaminated, "contaminated CSV")->required();
  d->add_option("--clean", detect.clean, "clean reference CSV")->required();
  d->add_option("--lambda", detect.lambda, "positive number, inf, or auto")->required();
  d->add_option("--method", detect.method, "exact|sinkhorn")->capture_default_str();
  d->add_option("--alpha", detect.alpha, "entropic regularization (sinkhorn)")->capture_default_str();
  d->add_option("--cost", detect.cost, "sqeuclidean|euclidean")->capture_default_str();
  d->add_option("--percentile", detect.percentile, "matched-cost percentile for --lambda auto")->capture_default_str();
  d->add_option("--subsample", detect.subsample, "subsample size for --lambda auto (0: min(n/2, 500))")->capture_default_str();
  d->add_option("--seed", detect.seed, "seed for --lambda auto")->capture_default_str();
  d->add_option("--threshold", detect.threshold, "flag i when mu_i + s1_i is below this");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate-mean", "Robust mean estimation with a shift generator");
  e->add_option("--data", est.data, "data CSV")->required();
  e->add_option("--lambda", est.lambda, "truncation parameter (positive or inf)")->capture_default_str();
  e->add_option("--alpha", est.cfg.alpha, "entropic regularization")->capture_default_str();
  e->add_option("--outer", est.cfg.outer_iters, "outer iterations")->capture_default_str();
  e->add_option("--inner", est.cfg.inner_iters, "dual steps per outer iteration")->capture_default_str();
  e->add_option("--tau", est.cfg.tau, "theta step size")->capture_default_str();
  e->add_option("--gamma", est.cfg.gamma, "dual step size")->capture_default_str();
  e->add_option("--seed", est.cfg.seed, "sampling seed")->capture_default_str();
  e->add_option("--noise", est.noise, "generator noise: gaussian|cauchy")->capture_default_str();
  e->add_option("--true-mean", est.true_mean, "comma-separated mean to report the error against");
  e->add_option("--trace-out", est.trace_out, "write theta after every outer step as CSV");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate synthetic data as CSV");
  g->add_option("--model", gen.model, "gaussian-huber|cauchy-huber|clusters")->required();
  g->add_option("--n", gen.n, "sample size (huber models)")->capture_default_str();
  g->add_option("--d", gen.d, "dimension")->capture_default_str();
  g->add_option("--eps", gen.eps, "contamination probability")->capture_default_str();
  g->add_option("--clean-mean", gen.clean_mean, "comma-separated clean location (default 0)");
  g->add_option("--outlier-mean", gen.outlier_mean, "comma-separated outlier location (default 2)");
  g->add_flag("--fixed-count", gen.fixed_count, "contaminate exactly floor(eps * n) points");
  g->add_option("--n-clean", gen.n_clean, "clean points (clusters)")->capture_default_str();
  g->add_option("--n-out", gen.n_out, "outliers (clusters)")->capture_default_str();
  g->add_option("--n-reference", gen.n_reference, "reference size (clusters; 0: n-clean)")->capture_default_str();
  g->add_option("--separation", gen.separation, "outlier cluster offset (clusters)")->capture_default_str();
  g->add_option("--seed", gen.seed, "seed")->capture_default_str();
  g->add_option("--out", gen.out, "data CSV path (default stdout)");
  g->add_option("--mask-out", gen.mask_out, "ground-truth outlier mask CSV");
  g->add_option("--reference-out", gen.reference_out, "clean reference CSV (clusters)");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Diagnostics suites");
  b->require_subcommand(1);
  auto* be = b->add_subcommand("equivalence", "Agreement of the robust formulations on random instances");
  be->add_option("--trials", bench.trials, "number of instances")->capture_default_str();
  be->add_option("--max-size", bench.max_size, "largest support size")->capture_default_str();
  be->add_option("--seed", bench.seed, "seed")->capture_default_str();
  be->add_option("--lambdas", bench.lambdas, "comma-separated lambda values")->capture_default_str();
  be->add_option("--csv-out", bench.csv_out, "per-trial long-format CSV");

  ScanArgs scan;
  auto* sc = app.add_subcommand("scan-lambda", "Outlier sets along an ascending lambda grid");
  sc->add_option("--contaminated", scan.contaminated, "contaminated CSV")->required();
  sc->add_option("--clean", scan.clean, "clean reference CSV")->required();
  sc->add_option("--grid", scan.grid, "comma-separated ascending lambda values")->required();
  sc->add_option("--method", scan.method, "exact|sinkhorn")->capture_default_str();
  sc->add_option("--alpha", scan.alpha, "entropic regularization (sinkhorn)")->capture_default_str();
  sc->add_option("--cost", scan.cost, "sqeuclidean|euclidean")->capture_default_str();
  sc->add_option("--csv-out", scan.csv_out, "per-lambda long-format CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& ex) {
    report_error(err, "invalid_flags", ex.what());
    return kFlags;
  }

  try {
    if (*s) emit(out, cmd_solve(solve));
    else if (*d) emit(out, cmd_detect(detect));
    else if (*e) emit(out, cmd_estimate_mean(est));
    else if (*g) {
      std::ostringstream data;
      const Json j = cmd_gen(gen, data);
      // Data goes to stdout only when no --out path was given.
      if (gen.out.empty()) out << data.str();
      else emit(out, j);
    } else if (*be) emit(out, cmd_bench_equivalence(bench));
    else if (*sc) emit(out, cmd_scan(scan));
  } catch (const FlagError& ex) {
    report_error(err, "invalid_flags", ex.what());
    return kFlags;
  } catch (const CsvError& ex) {
    report_error(err, "bad_csv", ex.what());
    return kCsv;
  } catch (const InvalidArgument& ex) {
    report_error(err, "invalid_argument", ex.what());
    return kFlags;
  } catch (const SolverError& ex) {
    report_error(err, "solver_failure", ex.what());
    return kSolver;
  } catch (const std::exception& ex) {
    report_error(err, "solver_failure", ex.what());
    return kSolver;
  }
  return kOk;
}

}  // namespace robot::cli
