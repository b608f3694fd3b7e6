#pragma once

// Robust mean estimation with the shift generator g_theta(x) = x + theta.
//
// Each outer step draws one generator sample z, runs a few stochastic ascent
// steps on the entropic semi-discrete dual (potential over the data points)
// with the cost truncated at 2*lambda, turns the averaged potential into a
// soft assignment of z to data points, drops the assignments whose true cost
// exceeds 2*lambda, and moves theta down the resulting transport gradient.
// The cost is squared Euclidean throughout.

#include "robot/core.hpp"
#include "robot/random.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace robot {

enum class GeneratorNoise { gaussian, cauchy };

struct SgdConfig {
  double lambda = 0.5;
  double alpha = 0.02;
  long outer_iters = 5000;  // M
  long inner_iters = 20;    // L
  double tau = 0.005;       // theta step
  double gamma = 0.5;       // dual step
  std::uint64_t seed = 7;
  Vector theta_init;        // empty: coordinate-wise median of the data
  GeneratorNoise noise = GeneratorNoise::gaussian;  // law of z - theta, per coordinate
};

struct EstimateTrace {
  Matrix thetas;   // outer_iters x d, theta after each outer step
  Vector theta;    // final theta
  Vector potential;  // averaged dual potential over the data points
};

/// Coordinate-wise median (mean of the two middle values for even n).
inline Vector coordinate_median(const Matrix& X) {
  Vector med(X.cols());
  std::vector<double> col(static_cast<std::size_t>(X.rows()));
  for (Index c = 0; c < X.cols(); ++c) {
    for (Index r = 0; r < X.rows(); ++r) col[static_cast<std::size_t>(r)] = X(r, c);
    const std::size_t h = col.size() / 2;
    std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(h), col.end());
    double v = col[h];
    if (col.size() % 2 == 0) v = 0.5 * (v + *std::max_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(h)));
    med(c) = v;
  }
  return med;
}

/// Normalised exponential of (v - c) / alpha.
inline Vector soft_assignment(const Vector& v, const Vector& c, double alpha) {
  Vector h = (v - c) / alpha;
  h.array() -= h.maxCoeff();
  h = h.array().exp();
  return h / h.sum();
}

/// One inner dual step. `step` is the 1-based global step count k used by
/// the running average v_bar <- v_tilde / k + (k - 1) / k * v_bar.
inline void dual_inner_update(Vector& v_tilde, Vector& v_bar, const Vector& cost, const Vector& weights, double alpha, double gamma, long step) {
  if (!v_tilde.allFinite() || !cost.allFinite()) throw SolverError("dual_inner_update: non-finite input");
  const Vector u = soft_assignment(v_tilde, cost, alpha);
  v_tilde += gamma * (weights - u);
  const double k = static_cast<double>(step);
  v_bar = v_tilde / k + ((k - 1.0) / k) * v_bar;
}

/// 2 * (z * sum_k P(k) - X^T P).
inline Vector theta_gradient(const Vector& z, const Vector& assignment, const Matrix& X) {
  if (X.cols() != z.size() || X.rows() != assignment.size()) throw InvalidArgument("theta_gradient: dimension mismatch");
  return 2.0 * (z * assignment.sum() - X.transpose() * assignment);
}

inline void validate_config(const SgdConfig& cfg, Index dim) {
  detail::require(cfg.lambda > 0.0, "sgd: lambda must be > 0");
  detail::require(cfg.alpha > 0.0 && std::isfinite(cfg.alpha), "sgd: alpha must be > 0");
  detail::require(cfg.outer_iters >= 1 && cfg.inner_iters >= 1, "sgd: iteration counts must be >= 1");
  detail::require(cfg.tau > 0.0 && cfg.gamma > 0.0, "sgd: step sizes must be > 0");
  detail::require(cfg.theta_init.size() == 0 || cfg.theta_init.size() == dim, "sgd: theta_init has wrong dimension");
}

inline EstimateTrace estimate_mean(const DiscreteMeasure& data, const SgdConfig& cfg) {
  validate_config(cfg, data.dim());
  const Matrix& X = data.points();
  const Vector& w = data.weights();
  const Index n = data.size();
  const Index d = data.dim();
  const double cap = 2.0 * cfg.lambda;  // +inf when lambda is +inf

  Rng rng(cfg.seed);
  Vector theta = cfg.theta_init.size() == d ? cfg.theta_init : coordinate_median(X);
  Vector v_tilde = Vector::Zero(n);
  Vector v_bar = Vector::Zero(n);
  Vector raw(n), cost(n), z(d);

  EstimateTrace trace;
  trace.thetas.resize(cfg.outer_iters, d);
  long step = 0;
  for (long j = 0; j < cfg.outer_iters; ++j) {
    for (Index c = 0; c < d; ++c) z(c) = (cfg.noise == GeneratorNoise::gaussian ? rng.normal() : rng.cauchy()) + theta(c);
    raw = (X.rowwise() - z.transpose()).rowwise().squaredNorm();
    cost = raw.cwiseMin(cap);
    for (long i = 0; i < cfg.inner_iters; ++i) dual_inner_update(v_tilde, v_bar, cost, w, cfg.alpha, cfg.gamma, ++step);

    Vector assignment = soft_assignment(v_bar, cost, cfg.alpha);
    for (Index k = 0; k < n; ++k)
      if (raw(k) > cap) assignment(k) = 0.0;
    theta -= cfg.tau * theta_gradient(z, assignment, X);
    trace.thetas.row(j) = theta.transpose();
  }
  trace.theta = theta;
  trace.potential = v_bar;
  return trace;
}

}  // namespace robot
