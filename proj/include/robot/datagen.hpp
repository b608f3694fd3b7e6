#pragma once

// Seeded synthetic data: Huber-contaminated Gaussian and Cauchy samples and
// a two-cluster outlier set with a separate clean reference sample.

#include "robot/core.hpp"
#include "robot/random.hpp"

#include <cmath>
#include <vector>

namespace robot {

struct LabelledSample {
  DiscreteMeasure data;
  std::vector<bool> outlier;  // ground truth, one flag per point
};

struct ClusterSample {
  DiscreteMeasure contaminated;
  DiscreteMeasure reference;
  std::vector<bool> outlier;
};

namespace detail {

enum class Noise { gaussian, cauchy };

inline std::vector<bool> contamination_mask(Rng& rng, Index n, double eps, bool fixed_count) {
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  if (fixed_count) {
    const auto k = static_cast<std::size_t>(std::floor(eps * static_cast<double>(n)));
    const auto perm = rng.permutation(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < k; ++i) mask[perm[i]] = true;
  } else {
    for (auto&& flag : mask) flag = rng.bernoulli(eps);
  }
  return mask;
}

inline LabelledSample huber_sample(Noise noise, Index n, Index d, double eps, const Vector& clean_loc, const Vector& outlier_loc,
                                   std::uint64_t seed, bool fixed_count) {
  require(n >= 1 && d >= 1, "gen: n and d must be >= 1");
  require(eps >= 0.0 && eps < 1.0, "gen: eps must lie in [0, 1)");
  require(clean_loc.size() == d && outlier_loc.size() == d, "gen: location vectors must have length d");
  Rng rng(seed);
  std::vector<bool> mask = contamination_mask(rng, n, eps, fixed_count);
  Matrix X(n, d);
  for (Index i = 0; i < n; ++i) {
    const Vector& loc = mask[static_cast<std::size_t>(i)] ? outlier_loc : clean_loc;
    for (Index c = 0; c < d; ++c) X(i, c) = loc(c) + (noise == Noise::gaussian ? rng.normal() : rng.cauchy());
  }
  return {make_measure(std::move(X)), std::move(mask)};
}

}  // namespace detail

/// (1 - eps) N(clean_loc, I) + eps N(outlier_loc, I), uniform weights.
/// Each point is contaminated independently with probability eps, or
/// exactly floor(eps * n) points are when `fixed_count` is set.
inline LabelledSample gen_huber_gaussian(Index n, Index d, double eps, const Vector& clean_loc, const Vector& outlier_loc, std::uint64_t seed,
                                         bool fixed_count = false) {
  return detail::huber_sample(detail::Noise::gaussian, n, d, eps, clean_loc, outlier_loc, seed, fixed_count);
}

/// Same mixture with independent standard Cauchy coordinates around each
/// location.
inline LabelledSample gen_huber_cauchy(Index n, Index d, double eps, const Vector& clean_loc, const Vector& outlier_loc, std::uint64_t seed,
                                       bool fixed_count = false) {
  return detail::huber_sample(detail::Noise::cauchy, n, d, eps, clean_loc, outlier_loc, seed, fixed_count);
}

/// n_clean points from N(0, I) and n_out from N(separation * 1, I), shuffled,
/// plus an independent clean reference of n_reference points (0 means
/// n_clean).
inline ClusterSample gen_cluster_outliers(Index n_clean, Index n_out, Index d, double separation, std::uint64_t seed, Index n_reference = 0) {
  detail::require(separation > 0.0 && std::isfinite(separation), "gen: separation must be > 0");
  detail::require(n_clean >= 1 && n_out >= 0 && d >= 1 && n_reference >= 0, "gen: bad cluster sizes");
  if (n_reference == 0) n_reference = n_clean;
  Rng rng(seed);
  const Index n = n_clean + n_out;
  const auto perm = rng.permutation(static_cast<std::size_t>(n));
  std::vector<bool> mask(static_cast<std::size_t>(n));
  Matrix X(n, d);
  for (Index k = 0; k < n; ++k) {
    const auto slot = static_cast<Index>(perm[static_cast<std::size_t>(k)]);
    const bool out = k >= n_clean;
    mask[static_cast<std::size_t>(slot)] = out;
    for (Index c = 0; c < d; ++c) X(slot, c) = rng.normal() + (out ? separation : 0.0);
  }
  Matrix R(n_reference, d);
  for (Index r = 0; r < n_reference; ++r)
    for (Index c = 0; c < d; ++c) R(r, c) = rng.normal();
  return {make_measure(std::move(X)), make_measure(std::move(R)), std::move(mask)};
}

}  // namespace robot
