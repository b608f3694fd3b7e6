#pragma once

#include "robot/robot.hpp"

#include <initializer_list>

namespace robot::testing {

inline Matrix col(std::initializer_list<double> xs) {
  Matrix m(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Matrix mat(Index rows, Index cols, std::initializer_list<double> row_major) {
  Matrix m(rows, cols);
  auto it = row_major.begin();
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = *it++;
  return m;
}

inline CostMatrix cost_of(const Matrix& values) { return CostMatrix{values, CostKind::squared_euclidean, std::nullopt}; }

// Measures on {0, sqrt(3)} so the squared cost matrix is [[0,3],[3,0]].
inline DiscreteMeasure two_point(double a, double b) {
  return make_measure(col({0.0, std::sqrt(3.0)}), vec({a, b}));
}

inline DiscreteMeasure random_cloud(Rng& rng, Index n, Index d) {
  Matrix pts(n, d);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < d; ++c) pts(r, c) = rng.uniform();
  Vector w(n);
  for (Index r = 0; r < n; ++r) w(r) = 0.1 + rng.uniform();
  return DiscreteMeasure(std::move(pts), std::move(w));
}

}  // namespace robot::testing
