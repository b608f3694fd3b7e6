#pragma once

// Exact balanced transportation solver: primal network simplex on the
// bipartite graph sources -> sinks, started from an artificial-root basis.
//
// The basis is kept strongly feasible (every zero-flow tree arc points away
// from the root) by the Cunningham leaving-arc rule, which makes the method
// finite without perturbation. Entering arcs are chosen by block search
// over reduced costs.

#include "robot/core.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

namespace robot {

struct TransportOptions {
  double optimality_tol = 1e-10;  // relative to max(1, max C)
  long pivot_limit = 0;           // 0 means 10 * n * m + 100000
};

namespace detail {

class NetworkSimplex {
 public:
  NetworkSimplex(const Vector& supply, const Vector& demand, const Matrix& cost)
      : n_(static_cast<int>(supply.size())), m_(static_cast<int>(demand.size())), cost_(cost) {
    const int nodes = n_ + m_ + 1;
    root_ = n_ + m_;
    real_arcs_ = static_cast<long>(n_) * m_;
    flow_.assign(static_cast<std::size_t>(real_arcs_ + n_ + m_), 0.0);
    art_up_.assign(static_cast<std::size_t>(n_ + m_), false);

    double max_cost = 0.0;
    if (cost.size() > 0) max_cost = cost.cwiseAbs().maxCoeff();
    scale_ = std::max(1.0, max_cost);
    art_cost_ = (max_cost + 1.0) * static_cast<double>(n_ + m_ + 1);

    adj_.assign(static_cast<std::size_t>(nodes), {});
    for (int v = 0; v < n_ + m_; ++v) {
      const long a = real_arcs_ + v;
      if (v < n_) {
        // Positive supply leaves towards the root; zero supply hangs below it.
        art_up_[static_cast<std::size_t>(v)] = supply(v) > 0.0;
        flow_[static_cast<std::size_t>(a)] = supply(v);
      } else {
        flow_[static_cast<std::size_t>(a)] = demand(v - n_);
      }
      adj_[static_cast<std::size_t>(v)].push_back(a);
      adj_[static_cast<std::size_t>(root_)].push_back(a);
    }
    parent_.assign(static_cast<std::size_t>(nodes), -1);
    pred_.assign(static_cast<std::size_t>(nodes), -1);
    up_.assign(static_cast<std::size_t>(nodes), false);
    depth_.assign(static_cast<std::size_t>(nodes), 0);
    pi_.assign(static_cast<std::size_t>(nodes), 0.0);
    order_.reserve(static_cast<std::size_t>(nodes));
    rebuild_tree();
  }

  long run(const TransportOptions& opt) {
    const double tol = opt.optimality_tol * scale_;
    const long limit = opt.pivot_limit > 0 ? opt.pivot_limit : 10L * real_arcs_ + 100000;
    const long block = std::max<long>(10, static_cast<long>(std::sqrt(static_cast<double>(real_arcs_))));
    long next = 0;
    long pivots = 0;
    while (real_arcs_ > 0) {
      long enter = -1;
      double best = -tol;
      long scanned = 0;
      long since_block = 0;
      for (long k = next; scanned < real_arcs_; ++scanned) {
        const double rc = reduced_cost(k);
        if (rc < best) {
          best = rc;
          enter = k;
        }
        if (++k == real_arcs_) k = 0;
        if (++since_block == block) {
          since_block = 0;
          if (enter >= 0) {
            next = k;
            break;
          }
        }
      }
      if (enter < 0) break;
      if (++pivots > limit) throw SolverError("transport: pivot limit exceeded");
      pivot(enter);
    }
    return pivots;
  }

  Matrix plan() const {
    Matrix p(n_, m_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < m_; ++j) p(i, j) = flow_[static_cast<std::size_t>(static_cast<long>(i) * m_ + j)];
    return p;
  }

 private:
  int tail(long a) const {
    if (a < real_arcs_) return static_cast<int>(a / m_);
    const int v = static_cast<int>(a - real_arcs_);
    return art_up_[static_cast<std::size_t>(v)] ? v : root_;
  }
  int head(long a) const {
    if (a < real_arcs_) return n_ + static_cast<int>(a % m_);
    const int v = static_cast<int>(a - real_arcs_);
    return art_up_[static_cast<std::size_t>(v)] ? root_ : v;
  }
  double arc_cost(long a) const {
    if (a < real_arcs_) return cost_(a / m_, a % m_);
    return art_cost_;
  }
  double reduced_cost(long a) const {
    return arc_cost(a) + pi_[static_cast<std::size_t>(tail(a))] - pi_[static_cast<std::size_t>(head(a))];
  }

  // Recomputes parent/depth/potentials by BFS from the root.
  void rebuild_tree() {
    order_.clear();
    order_.push_back(root_);
    parent_[static_cast<std::size_t>(root_)] = -1;
    depth_[static_cast<std::size_t>(root_)] = 0;
    pi_[static_cast<std::size_t>(root_)] = 0.0;
    for (std::size_t q = 0; q < order_.size(); ++q) {
      const int u = order_[q];
      for (long a : adj_[static_cast<std::size_t>(u)]) {
        if (a == pred_[static_cast<std::size_t>(u)]) continue;
        const int t = tail(a);
        const int h = head(a);
        const int w = t == u ? h : t;
        const auto ws = static_cast<std::size_t>(w);
        parent_[ws] = u;
        pred_[ws] = a;
        up_[ws] = (t == w);
        depth_[ws] = depth_[static_cast<std::size_t>(u)] + 1;
        // Tree arcs have zero reduced cost.
        pi_[ws] = up_[ws] ? pi_[static_cast<std::size_t>(u)] - arc_cost(a) : pi_[static_cast<std::size_t>(u)] + arc_cost(a);
        order_.push_back(w);
      }
    }
  }

  void remove_adj(int v, long a) {
    auto& list = adj_[static_cast<std::size_t>(v)];
    auto it = std::find(list.begin(), list.end(), a);
    *it = list.back();
    list.pop_back();
  }

  void pivot(long enter) {
    const int first = tail(enter);
    const int second = head(enter);
    int u = first;
    int w = second;
    while (u != w) {
      if (depth_[static_cast<std::size_t>(u)] >= depth_[static_cast<std::size_t>(w)])
        u = parent_[static_cast<std::size_t>(u)];
      else
        w = parent_[static_cast<std::size_t>(w)];
    }
    const int join = u;

    // Flow travels join -> first along the tree, across the entering arc,
    // then second -> join. The leaving arc is the last blocking arc met in
    // that order, which keeps the basis strongly feasible.
    double delta = kInfinity;
    int leave = -1;
    for (int x = first; x != join; x = parent_[static_cast<std::size_t>(x)]) {
      const auto xs = static_cast<std::size_t>(x);
      if (up_[xs] && flow_[static_cast<std::size_t>(pred_[xs])] < delta) {
        delta = flow_[static_cast<std::size_t>(pred_[xs])];
        leave = x;
      }
    }
    for (int x = second; x != join; x = parent_[static_cast<std::size_t>(x)]) {
      const auto xs = static_cast<std::size_t>(x);
      if (!up_[xs] && flow_[static_cast<std::size_t>(pred_[xs])] <= delta) {
        delta = flow_[static_cast<std::size_t>(pred_[xs])];
        leave = x;
      }
    }
    if (leave < 0) throw SolverError("transport: unbounded pivot");

    if (delta > 0.0) {
      flow_[static_cast<std::size_t>(enter)] += delta;
      for (int x = first; x != join; x = parent_[static_cast<std::size_t>(x)]) {
        const auto xs = static_cast<std::size_t>(x);
        flow_[static_cast<std::size_t>(pred_[xs])] += up_[xs] ? -delta : delta;
      }
      for (int x = second; x != join; x = parent_[static_cast<std::size_t>(x)]) {
        const auto xs = static_cast<std::size_t>(x);
        flow_[static_cast<std::size_t>(pred_[xs])] += up_[xs] ? delta : -delta;
      }
    }
    const long out = pred_[static_cast<std::size_t>(leave)];
    flow_[static_cast<std::size_t>(out)] = 0.0;
    remove_adj(tail(out), out);
    remove_adj(head(out), out);
    adj_[static_cast<std::size_t>(first)].push_back(enter);
    adj_[static_cast<std::size_t>(second)].push_back(enter);
    for (int v : order_) pred_[static_cast<std::size_t>(v)] = -1;
    rebuild_tree();
  }

  int n_;
  int m_;
  int root_ = 0;
  long real_arcs_ = 0;
  const Matrix& cost_;
  double scale_ = 1.0;
  double art_cost_ = 1.0;
  std::vector<double> flow_;
  std::vector<bool> art_up_;
  std::vector<std::vector<long>> adj_;
  std::vector<int> parent_;
  std::vector<long> pred_;
  std::vector<bool> up_;
  std::vector<int> depth_;
  std::vector<double> pi_;
  std::vector<int> order_;
};

}  // namespace detail

/// Optimal coupling of mu and nu under cost C (which may be truncated).
inline std::pair<TransportPlan, SolveReport> solve_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& C,
                                                             TransportOptions opt = {}) {
  if (C.rows() != mu.size() || C.cols() != nu.size()) throw InvalidArgument("solve_transport: cost dimensions do not match measures");
  detail::require_finite(C.values, "solve_transport: cost");
  const auto start = std::chrono::steady_clock::now();
  detail::NetworkSimplex ns(mu.weights(), nu.weights(), C.values);
  const long pivots = ns.run(opt);
  TransportPlan plan = make_plan(ns.plan(), mu.weights(), nu.weights());

  SolveReport rep;
  rep.objective = C.values.cwiseProduct(plan.mass).sum();
  rep.iterations = pivots;
  rep.row_residual = plan.row_residual;
  rep.col_residual = plan.col_residual;
  rep.converged = true;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(plan), rep};
}

}  // namespace robot
