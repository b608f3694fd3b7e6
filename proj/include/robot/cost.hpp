#pragma once

// Ground costs, cost-matrix assembly, truncation at 2*lambda and the
// augmented cost over the concatenated support.

#include "robot/core.hpp"

#include <utility>
#include <vector>

namespace robot {

struct CostSpec {
  CostKind kind = CostKind::squared_euclidean;

  template <class A, class B>
  double operator()(const A& x, const B& y) const {
    const double sq = (x - y).squaredNorm();
    return kind == CostKind::squared_euclidean ? sq : std::sqrt(sq);
  }
};

inline CostMatrix cost_matrix(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Matrix>& Y, CostSpec spec = {}) {
  if (X.cols() != Y.cols()) throw InvalidArgument("cost_matrix: dimension mismatch");
  CostMatrix out{Matrix(X.rows(), Y.rows()), spec.kind, std::nullopt};
  for (Index j = 0; j < Y.rows(); ++j)
    for (Index i = 0; i < X.rows(); ++i) out.values(i, j) = spec(X.row(i), Y.row(j));
  return out;
}

inline void check_lambda(double lambda, const char* where) {
  // NaN fails the comparison as well.
  if (!(lambda > 0.0)) throw InvalidArgument(std::string(where) + ": lambda must be > 0");
}

/// Elementwise min(C, 2*lambda). lambda = +inf leaves C unchanged.
inline CostMatrix truncate(const CostMatrix& C, double lambda) {
  check_lambda(lambda, "truncate");
  CostMatrix out = C;
  if (std::isfinite(lambda)) out.values = C.values.cwiseMin(2.0 * lambda);
  out.truncation = lambda;
  return out;
}

/// Cost c(Z_i, Z_j) over Z = {X_1..X_n, Y_1..Y_m}; zero diagonal.
inline CostMatrix augmented_cost(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Matrix>& Y, CostSpec spec = {}) {
  if (X.cols() != Y.cols()) throw InvalidArgument("augmented_cost: dimension mismatch");
  Matrix Z(X.rows() + Y.rows(), X.cols());
  Z << X, Y;
  CostMatrix out = cost_matrix(Z, Z, spec);
  out.values.diagonal().setZero();
  return out;
}

/// Indices (i, j) with C(i, j) > 2*lambda (strict). Entries equal to 2*lambda
/// are not outliers.
inline std::vector<std::pair<Index, Index>> outlier_index_set(const CostMatrix& C, double lambda) {
  check_lambda(lambda, "outlier_index_set");
  std::vector<std::pair<Index, Index>> out;
  if (!std::isfinite(lambda)) return out;
  const double cap = 2.0 * lambda;
  for (Index i = 0; i < C.rows(); ++i)
    for (Index j = 0; j < C.cols(); ++j)
      if (C.values(i, j) > cap) out.emplace_back(i, j);
  return out;
}

/// Boolean mask form of outlier_index_set, used by the reconstruction.
inline Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> truncated_mask(const Matrix& C, double lambda) {
  if (!std::isfinite(lambda)) return Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(C.rows(), C.cols(), false);
  return C.array() > 2.0 * lambda;
}

}  // namespace robot
