#pragma once

// Maps a truncated-cost transport plan to a solution of the slack
// formulation: mass sitting on entries with C > 2*lambda is taken out of the
// transport block and parked on the target's diagonal slot, and the source
// row is debited by the same amount.

#include "robot/cost.hpp"

#include <algorithm>

namespace robot {

struct ReconstructOptions {
  double marginal_tol = 1e-6;  // gate on the incoming plan's L1 residuals
};

struct Slacks {
  Vector s1;  // -(row mass on truncated entries)
  Vector t1;  // column mass on truncated entries
};

namespace detail {

inline void check_reconstruct_inputs(const TransportPlan& plan, const CostMatrix& C, double lambda, const ReconstructOptions& opt) {
  check_lambda(lambda, "f2_to_f1");
  if (plan.mass.rows() != C.rows() || plan.mass.cols() != C.cols()) throw InvalidArgument("f2_to_f1: plan and cost dimensions differ");
  if (C.truncation && std::isfinite(*C.truncation)) throw InvalidArgument("f2_to_f1: cost must be the untruncated ground cost");
  if (plan.row_residual > opt.marginal_tol || plan.col_residual > opt.marginal_tol)
    throw InvalidArgument("f2_to_f1: plan marginal residual exceeds tolerance");
}

}  // namespace detail

/// Slack vectors only; skips the (n+m)^2 plan.
inline Slacks f2_to_f1_slacks(const TransportPlan& plan, const CostMatrix& C, double lambda, ReconstructOptions opt = {}) {
  detail::check_reconstruct_inputs(plan, C, lambda, opt);
  const Matrix cut = plan.mass.cwiseProduct(truncated_mask(C.values, lambda).cast<double>().matrix());
  return Slacks{-cut.rowwise().sum(), cut.colwise().sum().transpose()};
}

inline RobotSolution f2_to_f1(const TransportPlan& plan, const CostMatrix& C, double lambda, ReconstructOptions opt = {}) {
  detail::check_reconstruct_inputs(plan, C, lambda, opt);
  const Index n = C.rows();
  const Index m = C.cols();
  const Matrix cut = plan.mass.cwiseProduct(truncated_mask(C.values, lambda).cast<double>().matrix());
  const Matrix kept = plan.mass - cut;

  RobotSolution sol;
  sol.lambda = lambda;
  sol.s1 = -cut.rowwise().sum();
  sol.t1 = cut.colwise().sum().transpose();
  sol.plan = Matrix::Zero(n + m, n + m);
  sol.plan.topRightCorner(n, m) = kept;
  sol.plan.bottomRightCorner(m, m).diagonal() = sol.t1;
  // Bottom-right diagonal entries sit on zero augmented cost.
  sol.objective = C.values.cwiseProduct(kept).sum() + lambda * (sol.s1.cwiseAbs().sum() + sol.t1.cwiseAbs().sum());
  return sol;
}

/// Largest violation of each constraint of the slack formulation.
struct F1Residuals {
  double row = 0.0;           // |row sums - [mu + s1; t1]|
  double col = 0.0;           // |column sums - [0; nu]|
  double nonnegativity = 0.0; // max(0, -plan)
  double balance = 0.0;       // |sum s1 + sum t1|
  double source_mass = 0.0;   // max(0, -(mu + s1))

  double max() const { return std::max({row, col, nonnegativity, balance, source_mass}); }
};

inline F1Residuals check_f1_feasibility(const RobotSolution& sol, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const Index n = mu.size();
  const Index m = nu.size();
  if (sol.plan.rows() != n + m || sol.plan.cols() != n + m || sol.s1.size() != n || sol.t1.size() != m)
    throw InvalidArgument("check_f1_feasibility: dimension mismatch");
  Vector row_target(n + m);
  row_target << mu.weights() + sol.s1, sol.t1;
  Vector col_target(n + m);
  col_target << Vector::Zero(n), nu.weights();

  F1Residuals r;
  r.row = (sol.plan.rowwise().sum() - row_target).cwiseAbs().maxCoeff();
  r.col = (sol.plan.colwise().sum().transpose() - col_target).cwiseAbs().maxCoeff();
  r.nonnegativity = std::max(0.0, -sol.plan.minCoeff());
  r.balance = std::abs(sol.s1.sum() + sol.t1.sum());
  r.source_mass = std::max(0.0, -(mu.weights() + sol.s1).minCoeff());
  return r;
}

}  // namespace robot
