#pragma once

// Sampling oracle for c(X, mu): independent of the CDF-difference sums used
// by expected_profit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "csched/distribution.hpp"
#include "csched/numeric.hpp"
#include "csched/parallel.hpp"
#include "csched/schedule.hpp"

namespace csched {

/// Samples per partition. Each partition p draws from std::mt19937_64 seeded
/// with (seed ^ p), so estimates do not depend on the worker count.
inline constexpr std::size_t kMonteCarloPartition = 1u << 16;

struct MonteCarloEstimate {
  double estimate;
  double std_error;  // delta-method standard error of the ratio of means
  std::size_t samples;
};

namespace detail {

// Running means and co-moments of (z, l(X,z)), mergeable in a fixed order.
struct RatioMoments {
  double count = 0.0;
  double mean_z = 0.0;
  double mean_l = 0.0;
  double m2_z = 0.0;
  double m2_l = 0.0;
  double c_zl = 0.0;

  void add(double z, double l) {
    count += 1.0;
    const double dz = z - mean_z;
    const double dl = l - mean_l;
    mean_z += dz / count;
    mean_l += dl / count;
    m2_z += dz * (z - mean_z);
    m2_l += dl * (l - mean_l);
    c_zl += dz * (l - mean_l);
  }

  void merge(const RatioMoments& o) {
    if (o.count == 0.0) return;
    const double n = count + o.count;
    const double dz = o.mean_z - mean_z;
    const double dl = o.mean_l - mean_l;
    const double w = count * o.count / n;
    m2_z += o.m2_z + dz * dz * w;
    m2_l += o.m2_l + dl * dl * w;
    c_zl += o.c_zl + dz * dl * w;
    mean_z += dz * o.count / n;
    mean_l += dl * o.count / n;
    count = n;
  }
};

}  // namespace detail

inline MonteCarloEstimate monte_carlo_consistency(const AdviceDistribution& mu,
                                                  const GeometricSchedule& x,
                                                  std::size_t samples, std::uint64_t seed,
                                                  unsigned workers = 1) {
  if (samples < 1000) throw std::invalid_argument("Monte-Carlo needs at least 1000 samples");
  const std::size_t partitions = (samples + kMonteCarloPartition - 1) / kMonteCarloPartition;

  const auto parts = parallel_map(partitions, workers, [&](std::size_t p) {
    std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(p));
    const std::size_t begin = p * kMonteCarloPartition;
    const std::size_t end = std::min(samples, begin + kMonteCarloPartition);
    detail::RatioMoments acc;
    for (std::size_t s = begin; s < end; ++s) {
      const double z = mu.quantile(numeric::open_unit(rng()));
      acc.add(z, x.profit(z));
    }
    return acc;
  });

  detail::RatioMoments total;
  for (const auto& p : parts) total.merge(p);

  const double ratio = total.mean_z / total.mean_l;
  const double n = total.count;
  // Var(R) ~ (s_z^2 - 2 R s_zl + R^2 s_l^2) / (n mean_l^2)
  const double var_z = total.m2_z / (n - 1.0);
  const double var_l = total.m2_l / (n - 1.0);
  const double cov = total.c_zl / (n - 1.0);
  const double var_r = std::max(0.0, var_z - 2.0 * ratio * cov + ratio * ratio * var_l) /
                       (n * total.mean_l * total.mean_l);
  return {ratio, std::sqrt(var_r), samples};
}

}  // namespace csched
