#pragma once

// Multiple advice: a prediction set P = {tau_1..tau_k}, the worst-case and
// average consistency of a schedule against P, and two optimizers.
//
// Writing tau_j = 2^{i_j + delta_j}, the 4-robust schedules that complete a
// contract at some tau_j are exactly the candidates worth considering. Placing
// the phases delta_j on a unit circle, the candidate anchored at delta_j pays
// 2^{2 - D_j} where D_j is the arc back to its predecessor phase.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "csched/numeric.hpp"
#include "csched/schedule.hpp"

namespace csched {

struct Decomposition {
  int octave;    // i
  double phase;  // delta in [0,1)
};

/// tau = 2^{i + delta}; log2 tau within 4 ulps of an integer snaps to delta = 0.
inline Decomposition decompose(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("prediction must be positive and finite");
  }
  const double l = std::log2(tau);
  const double i = numeric::snapped_floor(l);
  const double delta = std::max(0.0, l - i);
  return {static_cast<int>(i), delta < 1.0 ? delta : 0.0};
}

class PredictionSet {
 public:
  explicit PredictionSet(std::vector<double> taus) : taus_(std::move(taus)) {
    if (taus_.empty()) throw std::invalid_argument("prediction set must be nonempty");
    parts_.reserve(taus_.size());
    for (double t : taus_) parts_.push_back(decompose(t));
  }

  std::size_t size() const { return taus_.size(); }
  std::span<const double> taus() const { return taus_; }
  std::span<const Decomposition> decompositions() const { return parts_; }

 private:
  std::vector<double> taus_;
  std::vector<Decomposition> parts_;
};

struct GapProfile {
  std::vector<double> phases;  // sorted, distinct
  std::vector<double> gaps;    // gaps[j]: clockwise arc from phases[j-1] to phases[j]
};

inline GapProfile gap_profile(const PredictionSet& p) {
  GapProfile g;
  for (const auto& d : p.decompositions()) g.phases.push_back(d.phase);
  std::sort(g.phases.begin(), g.phases.end());
  g.phases.erase(std::unique(g.phases.begin(), g.phases.end()), g.phases.end());

  const std::size_t k = g.phases.size();
  g.gaps.resize(k);
  g.gaps[0] = k == 1 ? 1.0 : 1.0 - (g.phases[k - 1] - g.phases[0]);
  for (std::size_t j = 1; j < k; ++j) g.gaps[j] = g.phases[j] - g.phases[j - 1];
  return g;
}

/// sup over tau in P of tau / l(X, tau).
inline double consistency_multi(const GeometricSchedule& x, const PredictionSet& p) {
  double worst = 0.0;
  for (double t : p.taus()) worst = std::max(worst, t / x.profit(t));
  return worst;
}

/// Mean of tau / l(X, tau) with tau uniform on P.
inline double average_consistency(const GeometricSchedule& x, const PredictionSet& p) {
  double sum = 0.0;
  for (double t : p.taus()) sum += t / x.profit(t);
  return sum / static_cast<double>(p.size());
}

struct MultResult {
  GeometricSchedule schedule;
  double consistency;
  std::size_t anchor;  // index into P of the prediction the schedule completes at
};

namespace detail {

// Indices of P ordered by phase (stable, so ties keep input order).
inline std::vector<std::size_t> by_phase(const PredictionSet& p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto parts = p.decompositions();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return parts[a].phase < parts[b].phase;
  });
  return order;
}

}  // namespace detail

/// Evaluates every candidate anchored at a prediction: O(k^2).
inline MultResult mult_exact(const PredictionSet& p) {
  const auto taus = p.taus();
  std::optional<MultResult> best;
  for (std::size_t j : detail::by_phase(p)) {
    const auto x = GeometricSchedule::anchored_at(taus[j]);
    const double c = consistency_multi(x, p);
    if (!best || c < best->consistency) best = MultResult{x, c, j};
  }
  return *best;
}

/// Anchors at the phase with the widest gap behind it: O(k log k).
inline MultResult mult_gap(const PredictionSet& p) {
  const auto order = detail::by_phase(p);
  const auto parts = p.decompositions();

  // First prediction of each distinct phase, in phase order.
  std::vector<std::size_t> heads;
  for (std::size_t j : order) {
    if (heads.empty() || parts[heads.back()].phase != parts[j].phase) heads.push_back(j);
  }
  const std::size_t m = heads.size();
  std::size_t pick = heads[0];
  double widest = m == 1 ? 1.0 : 1.0 - (parts[heads[m - 1]].phase - parts[heads[0]].phase);
  for (std::size_t r = 1; r < m; ++r) {
    const double gap = parts[heads[r]].phase - parts[heads[r - 1]].phase;
    if (gap > widest) {
      widest = gap;
      pick = heads[r];
    }
  }
  const auto x = GeometricSchedule::anchored_at(p.taus()[pick]);
  return {x, consistency_multi(x, p), pick};
}

/// 2^{2 - 1/k}.
inline double bound_multi(int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  return std::exp2(2.0 - 1.0 / k);
}

}  // namespace csched
