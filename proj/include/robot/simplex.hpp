#pragma once

// Dense two-phase primal simplex for small equality-form LPs:
//
//   min c^T x  s.t.  A x = b,  x >= lower   (lower_j is 0, finite, or -inf)
//
// Bland's rule (lowest eligible index enters, lowest basic index breaks ratio
// ties) rules out cycling. Redundant rows are detected at the end of phase 1
// and dropped. The final basic solution is recomputed from the original data
// with a QR solve so accumulated tableau round-off does not leak into x.

#include "robot/core.hpp"

#include <algorithm>
#include <vector>

namespace robot {

struct LpProblem {
  Vector objective;    // length N
  Matrix eq_matrix;    // M x N
  Vector eq_rhs;       // length M
  Vector lower_bounds; // length N; each 0, finite or -inf
};

struct LpResult {
  Vector x;
  double objective = 0.0;
  long pivots = 0;
  double max_violation = 0.0;  // max |A x - b|
};

class LpError : public SolverError {
 public:
  enum class Kind { infeasible, unbounded, pivot_limit };
  LpError(Kind kind, const std::string& what) : SolverError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SimplexOptions {
  double feasibility_tol = 1e-10;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  long pivot_limit = 0;  // 0 means 10 * (M + N)^2
};

namespace detail {

class Tableau {
 public:
  // Rows 0..M-1 are constraints, row M is the reduced-cost row; the last
  // column is the right-hand side.
  Tableau(const Matrix& A, const Vector& b) : rows_(A.rows()), cols_(A.cols() + A.rows()) {
    t_ = Matrix::Zero(rows_ + 1, cols_ + 1);
    t_.topLeftCorner(rows_, A.cols()) = A;
    t_.block(0, A.cols(), rows_, rows_).setIdentity();
    t_.col(cols_).head(rows_) = b;
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Index i = 0; i < rows_; ++i) basis_[static_cast<std::size_t>(i)] = A.cols() + i;
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Matrix& data() { return t_; }
  std::vector<Index>& basis() { return basis_; }

  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Sets the objective row to reduced costs of `cost` under the current basis.
  void load_objective(const Vector& cost) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(cost.size()) = cost.transpose();
    for (Index i = 0; i < rows_; ++i) {
      const double cb = t_(rows_, basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(i);
    }
  }

  void drop_row(Index r) {
    const Index last = rows_ - 1;
    if (r != last) {
      t_.row(r).swap(t_.row(last));
      std::swap(basis_[static_cast<std::size_t>(r)], basis_[static_cast<std::size_t>(last)]);
    }
    t_.row(last).swap(t_.row(rows_));
    Matrix shrunk = t_.topRows(rows_);
    t_ = std::move(shrunk);
    basis_.pop_back();
    --rows_;
  }

  // Runs simplex iterations over columns [0, active_cols) until optimal.
  // Returns false when unbounded.
  bool optimize(Index active_cols, const SimplexOptions& opt, long& pivots, long limit) {
    for (;;) {
      Index enter = -1;
      for (Index j = 0; j < active_cols; ++j) {
        if (t_(rows_, j) < -opt.optimality_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;

      Index leave = -1;
      double best = kInfinity;
      for (Index i = 0; i < rows_; ++i) {
        const double a = t_(i, enter);
        if (a <= opt.pivot_tol) continue;
        const double ratio = std::max(t_(i, cols_), 0.0) / a;
        if (leave < 0 || ratio < best - 1e-14) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + 1e-14 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;
      if (++pivots > limit) throw LpError(LpError::Kind::pivot_limit, "simplex: pivot limit exceeded");
      pivot(leave, enter);
    }
  }

 private:
  Index rows_;
  Index cols_;
  Matrix t_;
  std::vector<Index> basis_;
};

}  // namespace detail

/// Solves the LP to an optimal basic feasible solution. Throws LpError when
/// the problem is infeasible, unbounded or exceeds the pivot limit.
inline LpResult simplex_solve(const LpProblem& p, SimplexOptions opt = {}) {
  const Index M = p.eq_matrix.rows();
  const Index N = p.eq_matrix.cols();
  if (p.objective.size() != N || p.eq_rhs.size() != M || p.lower_bounds.size() != N)
    throw InvalidArgument("simplex_solve: inconsistent dimensions");
  if (!p.eq_matrix.allFinite() || !p.eq_rhs.allFinite() || !p.objective.allFinite())
    throw InvalidArgument("simplex_solve: non-finite data");

  // Column map into standard form: shifted bounded columns keep their index,
  // free variables gain a trailing negative-part column.
  std::vector<Index> neg_col(static_cast<std::size_t>(N), -1);
  Index n_std = N;
  for (Index j = 0; j < N; ++j)
    if (!std::isfinite(p.lower_bounds(j))) neg_col[static_cast<std::size_t>(j)] = n_std++;

  Matrix A(M, n_std);
  Vector c(n_std);
  Vector b = p.eq_rhs;
  A.leftCols(N) = p.eq_matrix;
  c.head(N) = p.objective;
  for (Index j = 0; j < N; ++j) {
    const Index k = neg_col[static_cast<std::size_t>(j)];
    if (k >= 0) {
      A.col(k) = -p.eq_matrix.col(j);
      c(k) = -p.objective(j);
    } else if (p.lower_bounds(j) != 0.0) {
      b -= p.eq_matrix.col(j) * p.lower_bounds(j);
    }
  }
  for (Index i = 0; i < M; ++i) {
    if (b(i) < 0.0) {
      A.row(i) *= -1.0;
      b(i) = -b(i);
    }
  }

  const long limit = opt.pivot_limit > 0 ? opt.pivot_limit : 10L * (M + N) * (M + N);
  long pivots = 0;
  detail::Tableau tab(A, b);

  // Phase 1: minimise the sum of artificials.
  Vector phase1 = Vector::Zero(n_std + M);
  phase1.tail(M).setOnes();
  tab.load_objective(phase1);
  tab.optimize(n_std + M, opt, pivots, limit);
  const double infeas = -tab.data()(tab.rows(), tab.cols());
  if (infeas > opt.feasibility_tol * std::max(1.0, b.lpNorm<Eigen::Infinity>()) * std::max<Index>(1, M))
    throw LpError(LpError::Kind::infeasible, "simplex: problem is infeasible");

  // Drive zero-level artificials out of the basis; rows that cannot pivot are redundant.
  for (Index r = tab.rows() - 1; r >= 0; --r) {
    if (tab.basis()[static_cast<std::size_t>(r)] < n_std) continue;
    Index col = -1;
    double best = opt.pivot_tol * 100;
    for (Index j = 0; j < n_std; ++j) {
      const double a = std::abs(tab.data()(r, j));
      if (a > best) {
        best = a;
        col = j;
      }
    }
    if (col >= 0)
      tab.pivot(r, col);
    else
      tab.drop_row(r);
  }

  // Phase 2 over the structural columns only.
  tab.load_objective(c);
  if (!tab.optimize(n_std, opt, pivots, limit)) throw LpError(LpError::Kind::unbounded, "simplex: problem is unbounded");

  // Recompute the basic solution from the original rows.
  std::vector<Index> basis = tab.basis();
  Vector xs = Vector::Zero(n_std);
  const Index R = tab.rows();
  if (R > 0) {
    // A_B has full column rank and the system is consistent, so the
    // least-squares solution is the exact basic solution.
    Matrix B(M, R);
    for (Index k = 0; k < R; ++k) B.col(k) = A.col(basis[static_cast<std::size_t>(k)]);
    Eigen::ColPivHouseholderQR<Matrix> qr(B);
    Vector xb = qr.solve(b);
    for (Index k = 0; k < R; ++k) xs(basis[static_cast<std::size_t>(k)]) = std::max(xb(k), 0.0);
  }

  LpResult out;
  out.pivots = pivots;
  out.x.resize(N);
  for (Index j = 0; j < N; ++j) {
    const Index k = neg_col[static_cast<std::size_t>(j)];
    out.x(j) = k >= 0 ? xs(j) - xs(k) : xs(j) + (std::isfinite(p.lower_bounds(j)) ? p.lower_bounds(j) : 0.0);
  }
  out.objective = p.objective.dot(out.x);
  out.max_violation = (p.eq_matrix * out.x - p.eq_rhs).lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace robot
