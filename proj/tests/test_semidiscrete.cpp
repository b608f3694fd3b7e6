#include "support.hpp"

#include <gtest/gtest.h>

using namespace robot;
using namespace robot::testing;

TEST(DualUpdate, FixedPoint) {
  Vector vt = Vector::Zero(4), vb = Vector::Zero(4);
  dual_inner_update(vt, vb, Vector::Zero(4), Vector::Constant(4, 0.25), 0.05, 0.5, 1);
  EXPECT_LT(vt.cwiseAbs().maxCoeff(), 1e-16);
}

TEST(DualUpdate, HandEvaluatedSoftmax) {
  const double e = std::exp(-1.0);
  const double u0 = 1.0 / (1.0 + e);
  EXPECT_NEAR(u0, 0.7311, 1e-4);
  Vector vt = Vector::Zero(2), vb = Vector::Zero(2);
  dual_inner_update(vt, vb, vec({0, 1}), vec({0.5, 0.5}), 1.0, 1.0, 1);
  EXPECT_NEAR(vt(0), 0.5 - u0, 1e-15);
  EXPECT_NEAR(vt(1), u0 - 0.5, 1e-15);
  EXPECT_NEAR(vt(0), -0.2311, 1e-4);
  EXPECT_EQ(vb, vt);  // first step: average equals the iterate
}

TEST(DualUpdate, ZeroStepIsNoOp) {
  Vector vt = vec({0.3, -0.1, 0.2}), vb = Vector::Zero(3);
  const Vector before = vt;
  dual_inner_update(vt, vb, vec({1, 2, 0.5}), vec({0.2, 0.3, 0.5}), 0.1, 0.0, 3);
  EXPECT_EQ(vt, before);
}

TEST(DualUpdate, RunningAverage) {
  Vector vt = Vector::Zero(2), vb = Vector::Zero(2);
  std::vector<Vector> iterates;
  for (long k = 1; k <= 5; ++k) {
    dual_inner_update(vt, vb, vec({0, 1}), vec({0.5, 0.5}), 1.0, 1.0, k);
    iterates.push_back(vt);
  }
  Vector mean = Vector::Zero(2);
  for (const auto& v : iterates) mean += v;
  mean /= 5.0;
  EXPECT_LT((vb - mean).cwiseAbs().maxCoeff(), 1e-15);
  Vector bad = vec({kInfinity, 0});
  EXPECT_THROW(dual_inner_update(bad, vb, vec({0, 1}), vec({0.5, 0.5}), 1.0, 1.0, 6), SolverError);
}

TEST(ThetaGradient, Examples) {
  const Matrix X = mat(3, 2, {0, 0, 1, 2, -1, 3});
  EXPECT_EQ(theta_gradient(X.row(1).transpose(), vec({0, 1, 0}), X), Vector::Zero(2));
  EXPECT_EQ(theta_gradient(vec({5, 5}), Vector::Zero(3), X), Vector::Zero(2));
  EXPECT_EQ(theta_gradient(vec({1}), vec({0.5, 0.5}), col({0, 2})), Vector::Zero(1));
  EXPECT_THROW(theta_gradient(vec({1, 2, 3}), vec({0.5, 0.5, 0}), X), InvalidArgument);
}

TEST(ThetaGradient, MatchesFiniteDifferences) {
  // d/dtheta sum_k P(k) |X_k - (z0 + theta)|^2 at theta = 0.
  Rng rng(21);
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const Index n = 7, d = 3;
    Matrix X(n, d);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < d; ++c) X(r, c) = rng.normal();
    Vector z(d), P(n);
    for (Index c = 0; c < d; ++c) z(c) = rng.normal();
    for (Index r = 0; r < n; ++r) P(r) = rng.uniform();
    auto f = [&](const Vector& zz) { return P.dot((X.rowwise() - zz.transpose()).rowwise().squaredNorm()); };
    const Vector g = theta_gradient(z, P, X);
    for (Index c = 0; c < d; ++c) {
      Vector e = Vector::Zero(d);
      e(c) = h;
      const double fd = (f(z + e) - f(z - e)) / (2 * h);
      EXPECT_NEAR(g(c), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(CoordinateMedian, OddAndEven) {
  EXPECT_EQ(coordinate_median(col({3, 1, 2})), vec({2}));
  EXPECT_EQ(coordinate_median(col({4, 1, 3, 2})), vec({2.5}));
  EXPECT_EQ(coordinate_median(mat(3, 2, {1, 10, 2, 30, 100, 20})), vec({2, 20}));
}

TEST(EstimateMean, SinglePointStaysPut) {
  const Matrix x0 = mat(1, 3, {0.5, -1.0, 2.0});
  SgdConfig cfg;
  cfg.lambda = 1e6;
  cfg.outer_iters = 100;
  cfg.tau = 1e-3;
  cfg.theta_init = x0.row(0).transpose();
  const EstimateTrace tr = estimate_mean(make_measure(x0), cfg);
  ASSERT_EQ(tr.thetas.rows(), 100);
  // Each step moves theta by tau * 2 * (z - x0) with z - theta ~ N(0, I).
  for (Index j = 0; j < 100; ++j) EXPECT_LT((tr.thetas.row(j) - x0).norm(), 0.2);
  EXPECT_LT((tr.theta - x0.row(0).transpose()).norm(), 0.1);
}

TEST(EstimateMean, Deterministic) {
  const auto s = gen_huber_gaussian(200, 3, 0.1, Vector::Zero(3), Vector::Constant(3, 3.0), 4);
  SgdConfig cfg;
  cfg.outer_iters = 200;
  const EstimateTrace a = estimate_mean(s.data, cfg);
  const EstimateTrace b = estimate_mean(s.data, cfg);
  EXPECT_EQ(a.thetas, b.thetas);
  EXPECT_EQ(a.potential, b.potential);
  cfg.seed += 1;
  EXPECT_NE(estimate_mean(s.data, cfg).theta, a.theta);
}

TEST(EstimateMean, RejectsBadConfig) {
  const auto data = make_measure(col({0, 1}));
  SgdConfig cfg;
  cfg.outer_iters = 0;
  EXPECT_THROW(estimate_mean(data, cfg), InvalidArgument);
  cfg = {};
  cfg.alpha = 0;
  EXPECT_THROW(estimate_mean(data, cfg), InvalidArgument);
  cfg = {};
  cfg.lambda = -1;
  EXPECT_THROW(estimate_mean(data, cfg), InvalidArgument);
  cfg = {};
  cfg.theta_init = vec({0, 0});
  EXPECT_THROW(estimate_mean(data, cfg), InvalidArgument);
}

TEST(EstimateMean, TruncationBeatsVanillaOnSmallFamily) {
  std::vector<double> robust, vanilla;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = gen_huber_gaussian(300, 5, 0.2, Vector::Zero(5), Vector::Constant(5, 2.0), 500 + seed);
    SgdConfig cfg;
    cfg.outer_iters = 1500;
    cfg.seed = seed;
    robust.push_back(estimate_mean(s.data, cfg).theta.norm());
    cfg.lambda = kInfinity;
    vanilla.push_back(estimate_mean(s.data, cfg).theta.norm());
  }
  std::sort(robust.begin(), robust.end());
  std::sort(vanilla.begin(), vanilla.end());
  EXPECT_LT(robust[5] + robust[4], vanilla[5] + vanilla[4]);
}
