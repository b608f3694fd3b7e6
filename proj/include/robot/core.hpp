#pragma once

// Domain types shared by every solver: weighted point clouds, cost matrices,
// transport plans and the augmented robust-OT solution record.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace robot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised for malformed user input (bad shapes, negative weights, lambda <= 0).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a solver cannot produce an answer for valid input
/// (pivot limit, infeasible LP, non-finite iterate).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

inline void require_finite(const Eigen::Ref<const Matrix>& m, const std::string& what) {
  if (!m.allFinite()) throw InvalidArgument(what + ": non-finite entries");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// DiscreteMeasure
// ---------------------------------------------------------------------------

/// Weighted point cloud on R^d. Rows of points() are support locations;
/// weights() lies on the probability simplex. Immutable after construction.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Matrix points, Vector weights) : points_(std::move(points)), weights_(std::move(weights)) {
    detail::require(points_.rows() >= 1, "measure: empty point set");
    detail::require(points_.cols() >= 1, "measure: points must have dimension >= 1");
    detail::require(points_.rows() == weights_.size(), "measure: points/weights length mismatch");
    detail::require_finite(points_, "measure points");
    detail::require_finite(weights_, "measure weights");
    detail::require((weights_.array() >= 0.0).all(), "measure: negative weight");
    const double total = weights_.sum();
    detail::require(total > 0.0, "measure: weights sum to zero");
    weights_ /= total;
  }

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }

 private:
  Matrix points_;
  Vector weights_;
};

/// Builds a measure; uniform 1/n weights when none are given, otherwise the
/// given weights renormalized to sum to one.
inline DiscreteMeasure make_measure(Matrix points, std::optional<Vector> weights = std::nullopt) {
  if (points.rows() < 1) throw InvalidArgument("measure: empty point set");
  Vector w = weights ? std::move(*weights) : Vector::Constant(points.rows(), 1.0 / static_cast<double>(points.rows()));
  return DiscreteMeasure(std::move(points), std::move(w));
}

/// Total-variation distance 0.5 * sum |a_i - b_i| between probability vectors
/// on a common support.
inline double tv_distance(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size()) throw InvalidArgument("tv_distance: length mismatch");
  return 0.5 * (a - b).cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Cost, plan and solution records
// ---------------------------------------------------------------------------

enum class CostKind { squared_euclidean, euclidean };

inline std::string to_string(CostKind k) {
  return k == CostKind::squared_euclidean ? "sqeuclidean" : "euclidean";
}

/// Dense n x m ground-cost matrix. When `truncation` holds lambda, every
/// entry has already been clipped to 2*lambda (lambda may be +inf).
struct CostMatrix {
  Matrix values;
  CostKind ground = CostKind::squared_euclidean;
  std::optional<double> truncation;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

struct TransportPlan {
  Matrix mass;
  double row_residual = 0.0;  // || mass 1 - mu ||_1
  double col_residual = 0.0;  // || mass^T 1 - nu ||_1
};

/// L1 marginal residuals of `mass` against target marginals.
inline std::pair<double, double> marginal_residuals(const Matrix& mass, const Vector& mu, const Vector& nu) {
  return {(mass.rowwise().sum() - mu).cwiseAbs().sum(), (mass.colwise().sum().transpose() - nu).cwiseAbs().sum()};
}

inline TransportPlan make_plan(Matrix mass, const Vector& mu, const Vector& nu) {
  auto [r, c] = marginal_residuals(mass, mu, nu);
  return TransportPlan{std::move(mass), r, c};
}

/// Solution of the slack (TV-penalised) formulation on the augmented
/// support {X_1..X_n, Y_1..Y_m}: an (n+m) x (n+m) plan whose row sums are
/// [mu + s1; t1] and column sums are [0; nu].
struct RobotSolution {
  Matrix plan;
  Vector s1;  // <= 0, length n
  Vector t1;  // >= 0, length m
  double objective = 0.0;
  double lambda = kInfinity;

  Index n() const { return s1.size(); }
  Index m() const { return t1.size(); }
  /// The n x m block that transports source points onto target points.
  auto transport_block() const { return plan.topRightCorner(n(), m()); }
};

struct SolveReport {
  double objective = 0.0;
  long iterations = 0;
  double row_residual = 0.0;
  double col_residual = 0.0;
  bool converged = false;
  double seconds = 0.0;
  // Entropic solvers also report the regularized objective <C,P> + alpha*sum P(log P - 1).
  std::optional<double> regularized_objective;
};

}  // namespace robot
