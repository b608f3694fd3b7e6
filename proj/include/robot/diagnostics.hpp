#pragma once

// Numerical checks of the robust OT bounds and of the agreement between the
// slack formulations, the truncated-cost problem and its reconstruction.

#include "robot/detect.hpp"
#include "robot/formulations.hpp"
#include "robot/random.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace robot {

namespace detail {

// Appends the rows of `pts` to `support` (merging coordinates equal within
// tol) and returns, for every row of `pts`, its index in `support`.
inline std::vector<Index> merge_into(std::vector<Vector>& support, const Matrix& pts, double tol = 1e-12) {
  std::vector<Index> where(static_cast<std::size_t>(pts.rows()));
  for (Index r = 0; r < pts.rows(); ++r) {
    Index found = -1;
    for (std::size_t k = 0; k < support.size(); ++k)
      if ((support[k] - pts.row(r).transpose()).cwiseAbs().maxCoeff() <= tol) {
        found = static_cast<Index>(k);
        break;
      }
    if (found < 0) {
      support.push_back(pts.row(r).transpose());
      found = static_cast<Index>(support.size()) - 1;
    }
    where[static_cast<std::size_t>(r)] = found;
  }
  return where;
}

inline Vector embed(const Vector& w, const std::vector<Index>& where, std::size_t size) {
  Vector out = Vector::Zero(static_cast<Index>(size));
  for (std::size_t r = 0; r < where.size(); ++r) out(where[r]) += w(static_cast<Index>(r));
  return out;
}

inline Matrix stack(const std::vector<Vector>& rows) {
  Matrix out(static_cast<Index>(rows.size()), rows.front().size());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = rows[k].transpose();
  return out;
}

}  // namespace detail

/// Mixture (1 - eps) mu + eps mu_c on the merged support of both.
inline DiscreteMeasure mix_measures(const DiscreteMeasure& mu, const DiscreteMeasure& mu_c, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("mix_measures: eps must lie in [0, 1)");
  if (mu.dim() != mu_c.dim()) throw InvalidArgument("mix_measures: dimension mismatch");
  std::vector<Vector> support;
  const auto wa = detail::merge_into(support, mu.points());
  const auto wb = detail::merge_into(support, mu_c.points());
  const Vector w = (1.0 - eps) * detail::embed(mu.weights(), wa, support.size()) + eps * detail::embed(mu_c.weights(), wb, support.size());
  return DiscreteMeasure(detail::stack(support), w);
}

/// L1 distance between two measures after embedding both on their merged
/// support.
inline double l1_on_union(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("l1_on_union: dimension mismatch");
  std::vector<Vector> support;
  const auto wa = detail::merge_into(support, a.points());
  const auto wb = detail::merge_into(support, b.points());
  return (detail::embed(a.weights(), wa, support.size()) - detail::embed(b.weights(), wb, support.size())).cwiseAbs().sum();
}

struct UpperBounds {
  double robot_value = 0.0;
  double bound1 = 0.0;  // OT(mu, nu) + lambda * eps * |mu - mu_c|
  double bound2 = 0.0;  // lambda * |mixture - nu|
  double bound3 = 0.0;  // OT(mixture, nu)
  bool holds = false;
};

/// The mass-difference norms are full L1 norms, matching the penalty of the
/// slack formulation (|s1|_1 + |t1|_1).
inline UpperBounds robot_upper_bounds(const DiscreteMeasure& mu, const DiscreteMeasure& mu_c, const DiscreteMeasure& nu, double eps, CostSpec spec,
                                      double lambda) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("robot_upper_bounds: eps must lie in [0, 1)");
  check_lambda(lambda, "robot_upper_bounds");
  const DiscreteMeasure mixture = mix_measures(mu, mu_c, eps);
  UpperBounds b;
  b.robot_value = solve_f1(mixture, nu, spec, lambda).first.objective;
  const double ot_clean = solve_transport(mu, nu, cost_matrix(mu.points(), nu.points(), spec)).second.objective;
  b.bound1 = ot_clean + lambda * eps * l1_on_union(mu, mu_c);
  b.bound2 = lambda * l1_on_union(mixture, nu);
  b.bound3 = solve_transport(mixture, nu, cost_matrix(mixture.points(), nu.points(), spec)).second.objective;
  b.holds = b.robot_value <= std::min({b.bound1, b.bound2, b.bound3}) + 1e-8;
  return b;
}

struct EquivalenceTrial {
  long trial = 0;
  Index n = 0;
  Index m = 0;
  double lambda = 0.0;
  CostKind kind = CostKind::squared_euclidean;
  double f1 = 0.0;  // slack LP
  double f2 = 0.0;  // truncated transport
  double f3 = 0.0;  // two-sided slack LP
  double f4 = 0.0;  // auxiliary LP
  double reconstructed = 0.0;
  double reconstruction_residual = 0.0;  // worst constraint violation of the rebuilt solution
  std::string error;                     // non-empty when a solver failed
};

struct EquivalenceReport {
  std::vector<EquivalenceTrial> trials;
  double gap_f1_f2 = 0.0;
  double gap_f1_f3 = 0.0;
  double gap_f1_f4 = 0.0;
  double reconstruction_gap = 0.0;  // max of |reconstructed - f2| and the rebuilt residual
  long failures = 0;
};

inline EquivalenceReport equivalence_suite(std::uint64_t seed, long trials, Index max_size, const std::vector<double>& lambdas = {0.1, 0.5, 1.0},
                                           const std::vector<CostKind>& kinds = {CostKind::squared_euclidean, CostKind::euclidean}) {
  if (trials < 1) throw InvalidArgument("equivalence_suite: trials must be >= 1");
  if (max_size < 2) throw InvalidArgument("equivalence_suite: max_size must be >= 2");
  if (lambdas.empty() || kinds.empty()) throw InvalidArgument("equivalence_suite: empty lambda or cost set");
  for (double l : lambdas) {
    check_lambda(l, "equivalence_suite");
    if (!std::isfinite(l)) throw InvalidArgument("equivalence_suite: lambda must be finite");
  }

  Rng rng(seed);
  EquivalenceReport rep;
  constexpr Index dim = 2;
  auto draw_measure = [&](Index size) {
    Matrix pts(size, dim);
    for (Index r = 0; r < size; ++r)
      for (Index c = 0; c < dim; ++c) pts(r, c) = rng.uniform();
    Vector w(size);
    for (Index r = 0; r < size; ++r) w(r) = 0.05 + rng.uniform();
    return DiscreteMeasure(std::move(pts), std::move(w));
  };

  for (long t = 0; t < trials; ++t) {
    EquivalenceTrial tr;
    tr.trial = t;
    tr.n = 2 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_size - 1)));
    tr.m = 2 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_size - 1)));
    tr.lambda = lambdas[rng.below(lambdas.size())];
    tr.kind = kinds[rng.below(kinds.size())];
    const DiscreteMeasure mu = draw_measure(tr.n);
    const DiscreteMeasure nu = draw_measure(tr.m);
    const CostSpec spec{tr.kind};
    try {
      const CostMatrix C = cost_matrix(mu.points(), nu.points(), spec);
      const auto [plan, trep] = solve_transport(mu, nu, truncate(C, tr.lambda));
      tr.f2 = trep.objective;
      const RobotSolution rebuilt = f2_to_f1(plan, C, tr.lambda);
      tr.reconstructed = rebuilt.objective;
      tr.reconstruction_residual = check_f1_feasibility(rebuilt, mu, nu).max();
      tr.f1 = solve_f1(mu, nu, spec, tr.lambda).first.objective;
      tr.f3 = solve_f3(mu, nu, spec, tr.lambda).first.objective;
      tr.f4 = solve_f4(mu, nu, C, tr.lambda).first.objective;
      rep.gap_f1_f2 = std::max(rep.gap_f1_f2, std::abs(tr.f1 - tr.f2));
      rep.gap_f1_f3 = std::max(rep.gap_f1_f3, std::abs(tr.f1 - tr.f3));
      rep.gap_f1_f4 = std::max(rep.gap_f1_f4, std::abs(tr.f1 - tr.f4));
      rep.reconstruction_gap = std::max({rep.reconstruction_gap, std::abs(tr.reconstructed - tr.f2), tr.reconstruction_residual});
    } catch (const std::exception& e) {
      tr.error = e.what();
      ++rep.failures;
    }
    rep.trials.push_back(std::move(tr));
  }
  return rep;
}

}  // namespace robot
