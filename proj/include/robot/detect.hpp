#pragma once

// Outlier detection from the source slack of the robust problem, the
// matched-cost heuristic for picking lambda, and the lambda sweep that
// checks whether outlier sets shrink as lambda grows.

#include "robot/cost.hpp"
#include "robot/random.hpp"
#include "robot/reconstruct.hpp"
#include "robot/sinkhorn.hpp"
#include "robot/transport.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace robot {

/// Exact robust solve: network simplex on the truncated cost, then the
/// slack reconstruction.
inline std::pair<RobotSolution, SolveReport> robot_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostSpec spec, double lambda) {
  check_lambda(lambda, "robot_exact");
  const CostMatrix C = cost_matrix(mu.points(), nu.points(), spec);
  auto [plan, rep] = solve_transport(mu, nu, truncate(C, lambda));
  RobotSolution sol = f2_to_f1(plan, C, lambda);
  rep.objective = sol.objective;
  return {std::move(sol), rep};
}

enum class DetectMethod { exact, sinkhorn };

inline std::string to_string(DetectMethod m) { return m == DetectMethod::exact ? "exact" : "sinkhorn"; }

struct DetectOptions {
  std::optional<double> threshold;  // default 1e-9 (exact) or 1/n^2 (sinkhorn)
  double sinkhorn_tol = 1e-8;
  long sinkhorn_max_iter = 20000;
};

struct DetectionResult {
  std::vector<Index> outlier_indices;  // ascending
  Vector s1;
  double lambda = 0.0;
  DetectMethod method = DetectMethod::exact;
  double threshold = 0.0;
  SolveReport report;
};

inline DetectionResult detect_outliers(const DiscreteMeasure& contaminated, const DiscreteMeasure& clean, CostSpec spec, double lambda,
                                       DetectMethod method = DetectMethod::exact, std::optional<double> alpha = std::nullopt,
                                       DetectOptions opt = {}) {
  check_lambda(lambda, "detect_outliers");
  const Index n = contaminated.size();
  DetectionResult out;
  out.lambda = lambda;
  out.method = method;

  const CostMatrix C = cost_matrix(contaminated.points(), clean.points(), spec);
  const CostMatrix Ct = truncate(C, lambda);
  TransportPlan plan;
  if (method == DetectMethod::exact) {
    std::tie(plan, out.report) = solve_transport(contaminated, clean, Ct);
    out.threshold = opt.threshold.value_or(1e-9);
  } else {
    if (!alpha || !(*alpha > 0.0) || !std::isfinite(*alpha)) throw InvalidArgument("detect_outliers: sinkhorn needs alpha > 0");
    std::tie(plan, out.report) = sinkhorn_solve(contaminated, clean, Ct, *alpha, opt.sinkhorn_tol, opt.sinkhorn_max_iter);
    out.threshold = opt.threshold.value_or(1.0 / (static_cast<double>(n) * static_cast<double>(n)));
  }
  const ReconstructOptions gate{std::max(1e-6, opt.sinkhorn_tol)};
  if (plan.row_residual > gate.marginal_tol || plan.col_residual > gate.marginal_tol)
    throw SolverError("detect_outliers: no convergence within max_iter; raise alpha or max_iter");
  const Slacks sl = f2_to_f1_slacks(plan, C, lambda, gate);
  out.s1 = sl.s1;
  const Vector& w = contaminated.weights();
  for (Index i = 0; i < n; ++i)
    if (w(i) + out.s1(i) < out.threshold) out.outlier_indices.push_back(i);
  return out;
}

/// Linear-interpolation percentile (numpy's default), p in (0, 100].
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("percentile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline constexpr double kLambdaFloor = 1e-6;
inline constexpr double kPlanSupportTol = 1e-12;

/// Half the given percentile of the costs between matched points of two
/// disjoint random halves of the clean data.
inline double select_lambda(const DiscreteMeasure& clean, Index subsample_size, double pct, CostSpec spec, std::uint64_t seed) {
  if (!(pct > 0.0 && pct <= 100.0)) throw InvalidArgument("select_lambda: percentile must lie in (0, 100]");
  if (subsample_size < 1 || 2 * subsample_size > clean.size()) throw InvalidArgument("select_lambda: clean data too small to split");
  Rng rng(seed);
  const auto perm = rng.permutation(static_cast<std::size_t>(clean.size()));
  const Index d = clean.dim();
  Matrix A(subsample_size, d), B(subsample_size, d);
  for (Index k = 0; k < subsample_size; ++k) {
    A.row(k) = clean.points().row(static_cast<Index>(perm[static_cast<std::size_t>(k)]));
    B.row(k) = clean.points().row(static_cast<Index>(perm[static_cast<std::size_t>(subsample_size + k)]));
  }
  const DiscreteMeasure a = make_measure(std::move(A));
  const DiscreteMeasure b = make_measure(std::move(B));
  const CostMatrix C = cost_matrix(a.points(), b.points(), spec);
  const auto [plan, rep] = solve_transport(a, b, C);
  std::vector<double> matched;
  for (Index j = 0; j < C.cols(); ++j)
    for (Index i = 0; i < C.rows(); ++i)
      if (plan.mass(i, j) > kPlanSupportTol) matched.push_back(C.values(i, j));
  return std::max(kLambdaFloor, percentile(std::move(matched), pct) / 2.0);
}

struct LambdaScan {
  std::vector<DetectionResult> results;  // one per grid value
  std::vector<bool> nested;              // pair k: outliers(grid[k+1]) within outliers(grid[k])
  std::vector<std::size_t> violations;   // indices k with nested[k] == false
};

inline LambdaScan scan_lambda(const DiscreteMeasure& contaminated, const DiscreteMeasure& clean, CostSpec spec, const std::vector<double>& grid,
                              DetectMethod method = DetectMethod::exact, std::optional<double> alpha = std::nullopt) {
  if (grid.size() < 2) throw InvalidArgument("scan_lambda: grid needs at least two values");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    check_lambda(grid[k], "scan_lambda");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw InvalidArgument("scan_lambda: grid must be strictly ascending");
  }
  LambdaScan scan;
  for (double lambda : grid) scan.results.push_back(detect_outliers(contaminated, clean, spec, lambda, method, alpha));
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const auto& small = scan.results[k].outlier_indices;
    const auto& large = scan.results[k + 1].outlier_indices;
    const bool ok = std::includes(small.begin(), small.end(), large.begin(), large.end());
    scan.nested.push_back(ok);
    if (!ok) scan.violations.push_back(k);
  }
  return scan;
}

}  // namespace robot
