#pragma once

// Entropy-regularised transport in the log domain.
//
// Dual potentials f, g give the plan P_ij = exp((f_i + g_j - C_ij) / alpha).
// Each sweep sets f so rows match mu exactly, then g so columns match nu.
// Everything is a log-sum-exp, so alpha far below the cost scale does not
// underflow.

#include "robot/cost.hpp"
#include "robot/reconstruct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace robot {

struct SinkhornOptions {
  double tol = 1e-9;        // L1 marginal residual
  long max_iter = 10000;
  // Warm-start along alpha_k = max(alpha, alpha_0 * factor^k) with alpha_0 the
  // largest cost entry. Off by default.
  bool eps_scaling = false;
  double scaling_factor = 0.5;
};

struct SinkhornResult {
  TransportPlan plan;
  SolveReport report;
  Vector f;
  Vector g;
};

namespace detail {

// out_j = log sum_i exp((f_i - C_ij) / alpha) for every column j, evaluated
// stably. Columns are contiguous, so each one is a single vectorized pass;
// row reductions call this with the transposed cost.
inline void lse_cols(const Matrix& C, const Vector& f, double alpha, Vector& out) {
  Eigen::ArrayXd buf(C.rows());
  for (Index j = 0; j < C.cols(); ++j) {
    buf = (f - C.col(j)).array() / alpha;
    const double hi = buf.maxCoeff();
    out(j) = std::isfinite(hi) ? hi + std::log((buf - hi).exp().sum()) : -kInfinity;
  }
}

inline Vector safe_log(const Vector& w) {
  return w.unaryExpr([](double x) { return x > 0.0 ? std::log(x) : -kInfinity; });
}

// Runs sweeps at a fixed alpha from the given potentials. Returns
// (iterations, converged).
inline std::pair<long, bool> sinkhorn_sweeps(const Matrix& C, const Matrix& Ct, const Vector& mu, const Vector& nu, const Vector& log_mu,
                                             const Vector& log_nu, double alpha, double tol, long max_iter, Vector& f, Vector& g) {
  const Index n = C.rows();
  const Index m = C.cols();
  Vector lse_r(n), lse_c(m);
  for (long it = 0; it < max_iter; ++it) {
    lse_cols(Ct, g, alpha, lse_r);
    // Row sums of the current plan are mu_i * exp((f_i - f_new_i) / alpha).
    Vector f_new(n);
    double row_res = 0.0;
    for (Index i = 0; i < n; ++i) {
      f_new(i) = mu(i) > 0.0 ? alpha * (log_mu(i) - lse_r(i)) : -kInfinity;
      if (mu(i) > 0.0 && it > 0) row_res += std::abs(mu(i) * std::expm1((f(i) - f_new(i)) / alpha));
    }
    if (it > 0 && row_res <= tol) return {it, true};
    f = f_new;
    lse_cols(C, f, alpha, lse_c);
    for (Index j = 0; j < m; ++j) g(j) = nu(j) > 0.0 ? alpha * (log_nu(j) - lse_c(j)) : -kInfinity;
    if (f.array().isNaN().any() || g.array().isNaN().any()) throw SolverError("sinkhorn: non-finite potentials");
  }
  return {max_iter, false};
}

}  // namespace detail

inline SinkhornResult sinkhorn_solve_full(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& C, double alpha,
                                          SinkhornOptions opt = {}) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("sinkhorn: alpha must be a positive finite number");
  if (!(opt.tol > 0.0)) throw InvalidArgument("sinkhorn: tol must be > 0");
  if (C.rows() != mu.size() || C.cols() != nu.size()) throw InvalidArgument("sinkhorn: cost dimensions do not match measures");
  if (!C.values.allFinite()) throw InvalidArgument("sinkhorn: non-finite cost entries");
  const auto start = std::chrono::steady_clock::now();

  const Vector& a = mu.weights();
  const Vector& b = nu.weights();
  const Vector log_a = detail::safe_log(a);
  const Vector log_b = detail::safe_log(b);
  Vector f = Vector::Zero(a.size());
  Vector g = Vector::Zero(b.size());
  const Matrix Ct = C.values.transpose();

  long iters = 0;
  bool converged = false;
  if (opt.eps_scaling) {
    double eps = std::max(alpha, C.values.maxCoeff());
    while (eps > alpha) {
      iters += detail::sinkhorn_sweeps(C.values, Ct, a, b, log_a, log_b, eps, opt.tol, opt.max_iter, f, g).first;
      eps = std::max(alpha, eps * opt.scaling_factor);
    }
  }
  auto [k, ok] = detail::sinkhorn_sweeps(C.values, Ct, a, b, log_a, log_b, alpha, opt.tol, opt.max_iter, f, g);
  iters += k;
  converged = ok;

  Matrix P(a.size(), b.size());
  for (Index j = 0; j < P.cols(); ++j)
    for (Index i = 0; i < P.rows(); ++i) P(i, j) = std::exp((f(i) + g(j) - C.values(i, j)) / alpha);

  SinkhornResult out{make_plan(std::move(P), a, b), {}, std::move(f), std::move(g)};
  SolveReport& rep = out.report;
  rep.objective = C.values.cwiseProduct(out.plan.mass).sum();
  double neg_entropy = 0.0;
  for (Index j = 0; j < out.plan.mass.cols(); ++j)
    for (Index i = 0; i < out.plan.mass.rows(); ++i) {
      const double p = out.plan.mass(i, j);
      if (p > 0.0) neg_entropy += p * (std::log(p) - 1.0);
    }
  rep.regularized_objective = rep.objective + alpha * neg_entropy;
  rep.iterations = iters;
  rep.row_residual = out.plan.row_residual;
  rep.col_residual = out.plan.col_residual;
  rep.converged = converged;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Entropic plan for cost C (pass a truncated matrix for the robust problem).
/// The reported objective is <C, P> without the entropy term.
inline std::pair<TransportPlan, SolveReport> sinkhorn_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& C,
                                                            double alpha, double tol = 1e-9, long max_iter = 10000) {
  SinkhornOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  auto r = sinkhorn_solve_full(mu, nu, C, alpha, opt);
  return {std::move(r.plan), r.report};
}

/// truncate -> entropic solve -> reconstruction of the slack solution.
inline std::pair<RobotSolution, SolveReport> robot_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostSpec spec,
                                                            double lambda, double alpha, double tol = 1e-9, long max_iter = 10000) {
  check_lambda(lambda, "robot_sinkhorn");
  const CostMatrix C = cost_matrix(mu.points(), nu.points(), spec);
  auto [plan, rep] = sinkhorn_solve(mu, nu, truncate(C, lambda), alpha, tol, max_iter);
  const ReconstructOptions gate{std::max(tol, 1e-6)};
  if (plan.row_residual > gate.marginal_tol || plan.col_residual > gate.marginal_tol)
    throw SolverError("robot_sinkhorn: no convergence within max_iter; raise alpha or max_iter");
  RobotSolution sol = f2_to_f1(plan, C, lambda, gate);
  rep.objective = sol.objective;
  return {std::move(sol), rep};
}

}  // namespace robot
