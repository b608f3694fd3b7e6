#pragma once

// LP forms of the slack-variable robust OT problems, solved with the dense
// simplex. These are the exact references the truncated-cost route is checked
// against, so they are built straight from their constraint systems with no
// shortcuts beyond dropping columns that the constraints force to zero.
//
// Every |s| term uses the split s = s_plus - s_minus with both parts priced
// at lambda.

#include "robot/cost.hpp"
#include "robot/simplex.hpp"

#include <chrono>
#include <vector>

namespace robot {

namespace detail {

// Accumulates an equality-form LP one variable / one constraint at a time.
class LpBuilder {
 public:
  explicit LpBuilder(Index rows) : rows_(rows), rhs_(Vector::Zero(rows)) {}

  Index add_var(double cost, double lower = 0.0) {
    costs_.push_back(cost);
    lower_.push_back(lower);
    coef_.emplace_back();
    return static_cast<Index>(costs_.size()) - 1;
  }
  void set(Index row, Index var, double value) { coef_[static_cast<std::size_t>(var)].emplace_back(row, value); }
  void rhs(Index row, double value) { rhs_(row) = value; }

  // Adds a free variable as a (plus, minus) pair priced at `weight` each.
  std::pair<Index, Index> add_abs(double weight, bool allow_positive = true) {
    const Index plus = allow_positive ? add_var(weight) : -1;
    const Index minus = add_var(weight);
    return {plus, minus};
  }
  void set_signed(Index row, std::pair<Index, Index> v, double value) {
    if (v.first >= 0) set(row, v.first, value);
    set(row, v.second, -value);
  }

  LpProblem build() const {
    const auto n = static_cast<Index>(costs_.size());
    LpProblem p{Vector(n), Matrix::Zero(rows_, n), rhs_, Vector(n)};
    for (Index j = 0; j < n; ++j) {
      p.objective(j) = costs_[static_cast<std::size_t>(j)];
      p.lower_bounds(j) = lower_[static_cast<std::size_t>(j)];
      for (auto [r, v] : coef_[static_cast<std::size_t>(j)]) p.eq_matrix(r, j) += v;
    }
    return p;
  }

 private:
  Index rows_;
  Vector rhs_;
  std::vector<double> costs_;
  std::vector<double> lower_;
  std::vector<std::vector<std::pair<Index, double>>> coef_;
};

inline double signed_value(const Vector& x, std::pair<Index, Index> v) {
  return (v.first >= 0 ? x(v.first) : 0.0) - x(v.second);
}

inline SolveReport lp_report(const LpResult& r, std::chrono::steady_clock::time_point start) {
  SolveReport rep;
  rep.objective = r.objective;
  rep.iterations = r.pivots;
  rep.row_residual = r.max_violation;
  rep.col_residual = r.max_violation;
  rep.converged = true;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace detail

/// One-sided slack formulation on the augmented support. The first n
/// columns of the plan must sum to zero, so they are left out of the LP and
/// come back as exact zeros.
inline std::pair<RobotSolution, SolveReport> solve_f1(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostSpec spec, double lambda) {
  check_lambda(lambda, "solve_f1");
  if (!std::isfinite(lambda)) throw InvalidArgument("solve_f1: lambda must be finite");
  const auto start = std::chrono::steady_clock::now();
  const Index n = mu.size();
  const Index m = nu.size();
  const Index N = n + m;
  const Matrix Caug = augmented_cost(mu.points(), nu.points(), spec).values;

  // rows: [0, N) row sums, [N, N+m) target column sums, N+m balance.
  detail::LpBuilder lp(N + m + 1);
  std::vector<Index> pi(static_cast<std::size_t>(N * m));
  for (Index r = 0; r < N; ++r) {
    for (Index j = 0; j < m; ++j) {
      const Index v = lp.add_var(Caug(r, n + j));
      pi[static_cast<std::size_t>(r * m + j)] = v;
      lp.set(r, v, 1.0);
      lp.set(N + j, v, 1.0);
    }
  }
  std::vector<std::pair<Index, Index>> slack(static_cast<std::size_t>(N));
  for (Index r = 0; r < N; ++r) {
    slack[static_cast<std::size_t>(r)] = lp.add_abs(lambda);
    lp.set_signed(r, slack[static_cast<std::size_t>(r)], -1.0);
    lp.set_signed(N + m, slack[static_cast<std::size_t>(r)], 1.0);
  }
  for (Index i = 0; i < n; ++i) lp.rhs(i, mu.weights()(i));
  for (Index j = 0; j < m; ++j) lp.rhs(N + j, nu.weights()(j));

  const LpResult res = simplex_solve(lp.build());

  RobotSolution sol;
  sol.lambda = lambda;
  sol.plan = Matrix::Zero(N, N);
  for (Index r = 0; r < N; ++r)
    for (Index j = 0; j < m; ++j) sol.plan(r, n + j) = res.x(pi[static_cast<std::size_t>(r * m + j)]);
  sol.s1.resize(n);
  sol.t1.resize(m);
  for (Index i = 0; i < n; ++i) sol.s1(i) = detail::signed_value(res.x, slack[static_cast<std::size_t>(i)]);
  for (Index j = 0; j < m; ++j) sol.t1(j) = detail::signed_value(res.x, slack[static_cast<std::size_t>(n + j)]);
  sol.objective = res.objective;
  return {std::move(sol), detail::lp_report(res, start)};
}

/// Two-sided slack formulation: both marginals may be modified.
struct TwoSidedSolution {
  Matrix plan;  // (n+m) x (n+m)
  Vector s1, t1, s2, t2;
  double objective = 0.0;
};

inline std::pair<TwoSidedSolution, SolveReport> solve_f3(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostSpec spec, double lambda) {
  check_lambda(lambda, "solve_f3");
  if (!std::isfinite(lambda)) throw InvalidArgument("solve_f3: lambda must be finite");
  const auto start = std::chrono::steady_clock::now();
  const Index n = mu.size();
  const Index m = nu.size();
  const Index N = n + m;
  const Matrix Caug = augmented_cost(mu.points(), nu.points(), spec).values;

  // rows: [0, N) row sums, [N, 2N) column sums, 2N and 2N+1 the two balances.
  detail::LpBuilder lp(2 * N + 2);
  std::vector<Index> pi(static_cast<std::size_t>(N * N));
  for (Index r = 0; r < N; ++r) {
    for (Index c = 0; c < N; ++c) {
      const Index v = lp.add_var(Caug(r, c));
      pi[static_cast<std::size_t>(r * N + c)] = v;
      lp.set(r, v, 1.0);
      lp.set(N + c, v, 1.0);
    }
  }
  std::vector<std::pair<Index, Index>> row_slack(static_cast<std::size_t>(N)), col_slack(static_cast<std::size_t>(N));
  for (Index r = 0; r < N; ++r) {
    row_slack[static_cast<std::size_t>(r)] = lp.add_abs(lambda);
    lp.set_signed(r, row_slack[static_cast<std::size_t>(r)], -1.0);
    lp.set_signed(2 * N, row_slack[static_cast<std::size_t>(r)], 1.0);
  }
  for (Index c = 0; c < N; ++c) {
    col_slack[static_cast<std::size_t>(c)] = lp.add_abs(lambda);
    lp.set_signed(N + c, col_slack[static_cast<std::size_t>(c)], -1.0);
    lp.set_signed(2 * N + 1, col_slack[static_cast<std::size_t>(c)], 1.0);
  }
  for (Index i = 0; i < n; ++i) lp.rhs(i, mu.weights()(i));
  for (Index j = 0; j < m; ++j) lp.rhs(N + n + j, nu.weights()(j));

  const LpResult res = simplex_solve(lp.build());

  TwoSidedSolution sol;
  sol.plan.resize(N, N);
  for (Index r = 0; r < N; ++r)
    for (Index c = 0; c < N; ++c) sol.plan(r, c) = res.x(pi[static_cast<std::size_t>(r * N + c)]);
  sol.s1.resize(n);
  sol.s2.resize(n);
  sol.t1.resize(m);
  sol.t2.resize(m);
  for (Index i = 0; i < n; ++i) {
    sol.s1(i) = detail::signed_value(res.x, row_slack[static_cast<std::size_t>(i)]);
    sol.s2(i) = detail::signed_value(res.x, col_slack[static_cast<std::size_t>(i)]);
  }
  for (Index j = 0; j < m; ++j) {
    sol.t1(j) = detail::signed_value(res.x, row_slack[static_cast<std::size_t>(n + j)]);
    sol.t2(j) = detail::signed_value(res.x, col_slack[static_cast<std::size_t>(n + j)]);
  }
  sol.objective = res.objective;
  return {std::move(sol), detail::lp_report(res, start)};
}

/// Auxiliary formulation on the original n x m cost: both marginals are
/// relaxed by L1-priced slacks and no balance row is imposed.
struct AuxiliarySolution {
  Matrix plan;  // n x m
  Vector s1;    // length n
  Vector s2;    // length m
  double objective = 0.0;
};

/// With `nonpositive_slacks` the slacks may only remove mass; the optimum is
/// unchanged because an optimal solution with s1, s2 <= 0 always exists.
inline std::pair<AuxiliarySolution, SolveReport> solve_f4(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& C,
                                                         double lambda, bool nonpositive_slacks = false) {
  check_lambda(lambda, "solve_f4");
  if (!std::isfinite(lambda)) throw InvalidArgument("solve_f4: lambda must be finite");
  if (C.rows() != mu.size() || C.cols() != nu.size()) throw InvalidArgument("solve_f4: cost dimensions do not match measures");
  const auto start = std::chrono::steady_clock::now();
  const Index n = mu.size();
  const Index m = nu.size();

  detail::LpBuilder lp(n + m);
  std::vector<Index> pi(static_cast<std::size_t>(n * m));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      const Index v = lp.add_var(C.values(i, j));
      pi[static_cast<std::size_t>(i * m + j)] = v;
      lp.set(i, v, 1.0);
      lp.set(n + j, v, 1.0);
    }
  }
  std::vector<std::pair<Index, Index>> slack(static_cast<std::size_t>(n + m));
  for (Index r = 0; r < n + m; ++r) {
    slack[static_cast<std::size_t>(r)] = lp.add_abs(lambda, !nonpositive_slacks);
    lp.set_signed(r, slack[static_cast<std::size_t>(r)], -1.0);
  }
  for (Index i = 0; i < n; ++i) lp.rhs(i, mu.weights()(i));
  for (Index j = 0; j < m; ++j) lp.rhs(n + j, nu.weights()(j));

  const LpResult res = simplex_solve(lp.build());

  AuxiliarySolution sol;
  sol.plan.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) sol.plan(i, j) = res.x(pi[static_cast<std::size_t>(i * m + j)]);
  sol.s1.resize(n);
  sol.s2.resize(m);
  for (Index i = 0; i < n; ++i) sol.s1(i) = detail::signed_value(res.x, slack[static_cast<std::size_t>(i)]);
  for (Index j = 0; j < m; ++j) sol.s2(j) = detail::signed_value(res.x, slack[static_cast<std::size_t>(n + j)]);
  sol.objective = res.objective;
  return {std::move(sol), detail::lp_report(res, start)};
}

/// The truncated-cost transportation problem written as a generic LP; used to
/// cross-check the network simplex.
inline LpProblem transport_lp(const Vector& mu, const Vector& nu, const Matrix& C) {
  const Index n = mu.size();
  const Index m = nu.size();
  detail::LpBuilder lp(n + m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      const Index v = lp.add_var(C(i, j));
      lp.set(i, v, 1.0);
      lp.set(n + j, v, 1.0);
    }
  }
  for (Index i = 0; i < n; ++i) lp.rhs(i, mu(i));
  for (Index j = 0; j < m; ++j) lp.rhs(n + j, nu(j));
  return lp.build();
}

}  // namespace robot
