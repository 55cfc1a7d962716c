#pragma once

// Bi-infinite geometric contract schedules X(lambda) = (2^{i - lambda})_{i in Z}
// and the profit function l(X, T).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csched/numeric.hpp"

namespace csched {

/// A 4-robust schedule identified by its phase lambda in [0,1).
///
/// Contract i has length 2^{i-lambda} and, because the schedule is
/// bi-infinite, completes at 2^{i+1-lambda}. Internally the schedule keeps
/// unit = 2^{-lambda} in (1/2, 1] and scales it by exact powers of two, so
/// contract_length(i+1) == 2 * contract_length(i) holds bit-for-bit and
/// completion_time(i) == 2 * contract_length(i).
class GeometricSchedule {
 public:
  GeometricSchedule() : GeometricSchedule(0.0, 1.0) {}

  static GeometricSchedule from_phase(double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0)) {
      throw std::invalid_argument("schedule phase must lie in [0,1), got " +
                                  std::to_string(lambda));
    }
    return GeometricSchedule(lambda, std::exp2(-lambda));
  }

  /// The member of the class that completes a contract exactly at `t`.
  static GeometricSchedule anchored_at(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("anchor time must be positive and finite");
    }
    int e = 0;
    const double mantissa = std::frexp(t, &e);  // t = mantissa * 2^e
    if (mantissa == 0.5) return GeometricSchedule(0.0, 1.0);
    return GeometricSchedule(-std::log2(mantissa), mantissa);
  }

  double phase() const { return lambda_; }
  double unit() const { return unit_; }

  double contract_length(int i) const { return std::ldexp(unit_, i); }
  double completion_time(int i) const { return std::ldexp(unit_, i + 1); }

  /// Index of the largest contract completed by time t (inclusive boundary).
  int last_completed(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("interruption time must be positive");
    // completion_time(i) <= t  <=>  i <= log2(t) + lambda - 1
    const double x = std::log2(t) + lambda_ - 1.0;
    int i = static_cast<int>(numeric::snapped_floor(x));
    // The log estimate can be off by one ulp; settle against exact times.
    while (completion_time(i + 1) <= t) ++i;
    while (completion_time(i) > t) --i;
    return i;
  }

  /// l(X, t): length of the largest contract completed by time t.
  double profit(double t) const { return contract_length(last_completed(t)); }

  friend bool operator==(const GeometricSchedule& a, const GeometricSchedule& b) {
    return a.unit_ == b.unit_;
  }

 private:
  GeometricSchedule(double lambda, double unit) : lambda_(lambda), unit_(unit) {}

  double lambda_;
  double unit_;
};

/// Explicit list of contract lengths; used to cross-check the geometric class.
class FiniteSchedule {
 public:
  explicit FiniteSchedule(std::vector<double> lengths) : lengths_(std::move(lengths)) {
    if (lengths_.empty()) throw std::invalid_argument("schedule needs at least one contract");
    for (double x : lengths_) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument("contract lengths must be positive and finite");
      }
    }
  }

  std::span<const double> lengths() const { return lengths_; }

 private:
  std::vector<double> lengths_;
};

/// max_{i>=1} (x_0 + ... + x_i) / x_{i-1}. On a truncation of a bi-infinite
/// schedule this is a lower bound on the true acceleration ratio.
inline double acceleration_ratio_finite(const FiniteSchedule& schedule) {
  const auto x = schedule.lengths();
  if (x.size() < 2) {
    throw std::invalid_argument("acceleration ratio needs at least two contracts");
  }
  double prefix = x[0];
  double worst = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    prefix += x[i];
    worst = std::max(worst, prefix / x[i - 1]);
  }
  return worst;
}

/// Largest T / l(X, T) over interruptions one representable step before each
/// of `octaves` consecutive completion times. Approaches 4 from below.
inline double robustness_probe(const GeometricSchedule& schedule, int octaves) {
  if (octaves < 1) throw std::invalid_argument("octaves must be >= 1");
  double worst = 0.0;
  for (int i = 0; i < octaves; ++i) {
    const double t = std::nextafter(schedule.completion_time(i), 0.0);
    worst = std::max(worst, t / schedule.profit(t));
  }
  return worst;
}

/// A 4-robust, 2-consistent schedule for a single predicted time tau:
/// some contract completes exactly at tau, so l(X, tau) = tau / 2.
inline GeometricSchedule single_advice_schedule(double tau) {
  return GeometricSchedule::anchored_at(tau);
}

struct FragilityPoint {
  double interruption;
  double profit;
};

/// Interrupts the single-advice schedule eps before its predicted time.
/// The profit collapses to (T + eps) / 4.
inline FragilityPoint fragility_probe(double tau, double eps) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(eps > 0.0 && eps < tau / 2.0)) {
    throw std::invalid_argument("eps must lie in (0, tau/2)");
  }
  const auto schedule = single_advice_schedule(tau);
  const double t = tau - eps;
  return {t, schedule.profit(t)};
}

}  // namespace csched
