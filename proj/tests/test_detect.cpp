#include "support.hpp"

#include <gtest/gtest.h>

using namespace robot;
using namespace robot::testing;

TEST(Detect, IdenticalMeasuresFlagNothing) {
  Rng rng(1);
  const auto a = random_cloud(rng, 12, 2);
  for (double lambda : {0.01, 0.1, 1.0}) {
    const DetectionResult r = detect_outliers(a, a, CostSpec{}, lambda);
    EXPECT_TRUE(r.outlier_indices.empty());
    EXPECT_EQ(r.threshold, 1e-9);
  }
}

TEST(Detect, FarPointIsFlagged) {
  const auto contaminated = make_measure(col({0, 0.1, 100}));
  const auto clean = make_measure(col({0, 0.1, 0.2}));
  const DetectionResult r = detect_outliers(contaminated, clean, CostSpec{}, 1.0);
  ASSERT_EQ(r.outlier_indices.size(), 1u);
  EXPECT_EQ(r.outlier_indices[0], 2);
  EXPECT_NEAR(r.s1(2), -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.s1(0), 0.0, 1e-12);
  EXPECT_NEAR(r.s1(1), 0.0, 1e-12);
  // Once 2 * lambda exceeds every cost nothing is cut.
  EXPECT_TRUE(detect_outliers(contaminated, clean, CostSpec{}, 1e5).outlier_indices.empty());
}

TEST(Detect, FlaggedMassMatchesSlack) {
  const auto s = gen_cluster_outliers(40, 10, 2, 8.0, 3);
  const DetectionResult r = detect_outliers(s.contaminated, s.reference, CostSpec{}, 2.0);
  double flagged = 0.0;
  for (Index i : r.outlier_indices) flagged += s.contaminated.weights()(i);
  EXPECT_LE(flagged, r.s1.cwiseAbs().sum() + 1e-9);
  EXPECT_TRUE(std::is_sorted(r.outlier_indices.begin(), r.outlier_indices.end()));
  for (Index i : r.outlier_indices) EXPECT_TRUE(s.outlier[static_cast<std::size_t>(i)]);
}

TEST(Detect, SinkhornAgreesWithExact) {
  const auto c = make_measure(col({0, 0.1, 100}));
  const auto k = make_measure(col({0, 0.1, 0.2}));
  EXPECT_EQ(detect_outliers(c, k, CostSpec{}, 1.0, DetectMethod::sinkhorn, 1e-3).outlier_indices, std::vector<Index>{2});

  const auto s = gen_cluster_outliers(30, 6, 2, 8.0, 5);
  const double lambda = 2.0;
  const DetectionResult exact = detect_outliers(s.contaminated, s.reference, CostSpec{}, lambda);
  const DetectionResult ent = detect_outliers(s.contaminated, s.reference, CostSpec{}, lambda, DetectMethod::sinkhorn, 0.01);
  EXPECT_EQ(exact.outlier_indices, ent.outlier_indices);
  EXPECT_DOUBLE_EQ(ent.threshold, 1.0 / (36.0 * 36.0));
  EXPECT_EQ(ent.method, DetectMethod::sinkhorn);
  EXPECT_THROW(detect_outliers(s.contaminated, s.reference, CostSpec{}, lambda, DetectMethod::sinkhorn), InvalidArgument);
  EXPECT_THROW(detect_outliers(s.contaminated, s.reference, CostSpec{}, 0.0), InvalidArgument);
}

TEST(Percentile, LinearInterpolation) {
  EXPECT_EQ(percentile({1, 2, 3, 4}, 50), 2.5);
  EXPECT_EQ(percentile({4, 1, 3, 2}, 100), 4.0);
  EXPECT_NEAR(percentile({0, 10}, 99), 9.9, 1e-12);
  EXPECT_EQ(percentile({7}, 30), 7.0);
  EXPECT_THROW(percentile({}, 50), InvalidArgument);
}

TEST(SelectLambda, Examples) {
  // Identical points: every matched cost is zero, so the floor applies.
  const auto same = make_measure(Matrix::Ones(10, 2));
  EXPECT_EQ(select_lambda(same, 5, 99, CostSpec{}, 0), kLambdaFloor);

  // Two halves of {0, 1}: the only matched cost is 1.
  const auto pair = make_measure(col({0, 1}));
  EXPECT_DOUBLE_EQ(select_lambda(pair, 1, 100, CostSpec{}, 0), 0.5);

  Rng rng(2);
  const auto cloud = random_cloud(rng, 60, 2);
  const double a = select_lambda(cloud, 20, 90, CostSpec{}, 11);
  EXPECT_EQ(a, select_lambda(cloud, 20, 90, CostSpec{}, 11));
  EXPECT_LE(select_lambda(cloud, 20, 50, CostSpec{}, 11), a);
  EXPECT_THROW(select_lambda(cloud, 31, 90, CostSpec{}, 11), InvalidArgument);
  EXPECT_THROW(select_lambda(cloud, 0, 90, CostSpec{}, 11), InvalidArgument);
  EXPECT_THROW(select_lambda(cloud, 10, 0, CostSpec{}, 11), InvalidArgument);
}

TEST(ScanLambda, NestedOnSeparatedClusters) {
  const auto s = gen_cluster_outliers(30, 8, 2, 6.0, 9);
  const LambdaScan scan = scan_lambda(s.contaminated, s.reference, CostSpec{}, {0.5, 2.0, 8.0, 200.0});
  ASSERT_EQ(scan.results.size(), 4u);
  ASSERT_EQ(scan.nested.size(), 3u);
  EXPECT_TRUE(scan.violations.empty());
  EXPECT_TRUE(scan.results.back().outlier_indices.empty());
  EXPECT_GE(scan.results.front().outlier_indices.size(), 8u);
}

TEST(ScanLambda, SmallExamples) {
  const auto c = make_measure(col({0, 0.1, 100}));
  const auto k = make_measure(col({0, 0.1, 0.2}));
  const LambdaScan scan = scan_lambda(c, k, CostSpec{}, {1.0, 1e4});
  EXPECT_EQ(scan.results[0].outlier_indices, std::vector<Index>{2});
  EXPECT_TRUE(scan.results[1].outlier_indices.empty());
  EXPECT_EQ(scan.nested, std::vector<bool>{true});
  const LambdaScan huge = scan_lambda(c, k, CostSpec{}, {1e5, 2e5});
  EXPECT_TRUE(huge.results[0].outlier_indices.empty());
  EXPECT_TRUE(huge.violations.empty());
}

TEST(ScanLambda, RejectsBadGrid) {
  const auto mu = make_measure(col({0, 1}));
  EXPECT_THROW(scan_lambda(mu, mu, CostSpec{}, {1.0}), InvalidArgument);
  EXPECT_THROW(scan_lambda(mu, mu, CostSpec{}, {1.0, 0.5}), InvalidArgument);
  EXPECT_THROW(scan_lambda(mu, mu, CostSpec{}, {0.0, 0.5}), InvalidArgument);
}
