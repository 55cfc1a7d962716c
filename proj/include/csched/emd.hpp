#pragma once

// Earth Mover's Distance between interruption-time distributions and the
// smoothness guarantee of the adversarial advice mu_D under advice error.
//
// On the line the optimal transport cost equals the integral of |F - G|. We
// split the real line at every breakpoint of either CDF, locate sign changes
// of F - G inside each piece, and integrate F - G exactly on each signed
// sub-piece through the closed-form CDF primitives.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "csched/distribution.hpp"
#include "csched/distributional.hpp"
#include "csched/numeric.hpp"
#include "csched/schedule.hpp"

namespace csched {

struct EmdValue {
  double value;
};

namespace detail {

inline constexpr int kEmdSamplesPerPiece = 32;

inline double cdf_gap(const AdviceDistribution& a, const AdviceDistribution& b, double x) {
  return a.prob_below(x) - b.prob_below(x);
}

inline double primitive_gap(const AdviceDistribution& a, const AdviceDistribution& b,
                            double x) {
  return a.primitive(x) - b.primitive(x);
}

}  // namespace detail

inline EmdValue emd(const AdviceDistribution& a, const AdviceDistribution& b) {
  const Support sa = a.support();
  const Support sb = b.support();
  const double lo = std::min(sa.lo, sb.lo);
  const double hi = std::max(sa.hi, sb.hi);

  std::vector<double> cuts{lo, hi};
  for (const auto* d : {&a, &b}) {
    for (double x : d->breakpoints()) {
      if (x > lo && x < hi) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double x0 = cuts[p];
    const double x1 = cuts[p + 1];
    const double w = x1 - x0;

    // Both CDFs are smooth inside (x0, x1); bracket the sign changes of F - G.
    std::vector<double> pieces{x0};
    double t_prev = x0 + 0.5 * w / detail::kEmdSamplesPerPiece;
    double d_prev = detail::cdf_gap(a, b, t_prev);
    for (int s = 1; s < detail::kEmdSamplesPerPiece; ++s) {
      const double t = x0 + (s + 0.5) * w / detail::kEmdSamplesPerPiece;
      const double d = detail::cdf_gap(a, b, t);
      if (d * d_prev < 0.0) {
        double l = t_prev;
        double r = t;
        for (int it = 0; it < 200; ++it) {
          const double mid = l + 0.5 * (r - l);
          if (mid <= l || mid >= r) break;
          (detail::cdf_gap(a, b, mid) * d_prev > 0.0 ? l : r) = mid;
        }
        pieces.push_back(l);
      }
      t_prev = t;
      d_prev = d;
    }
    pieces.push_back(x1);

    for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
      total += std::abs(detail::primitive_gap(a, b, pieces[k + 1]) -
                        detail::primitive_gap(a, b, pieces[k]));
    }
  }
  return {total};
}

/// (4 ln 2 + 2 eta/D) / (1 - 16 sqrt(2 eta/D)), defined for eta < D/512.
inline double smoothness_bound(double eta, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("D must be positive");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be non-negative");
  if (!(eta < d / 512.0)) {
    throw std::domain_error("smoothness bound needs eta < D/512 (denominator vanishes)");
  }
  const double r = eta / d;
  return (numeric::kFourLn2 + 2.0 * r) / (1.0 - 16.0 * std::sqrt(2.0 * r));
}

namespace detail {

// Cost of carrying the mu_D mass on [lo, hi] down to the point `to` <= lo.
inline double collapse_cost(double d, double lo, double hi, double to) {
  const double span = hi - lo;
  return 2.0 * d * (std::log1p(span / lo) - to * span / (lo * hi));
}

}  // namespace detail

/// Worst-case shift of mu_D at cost `eta` against X(lambda): mass just above
/// the schedule's completion time b in [D, 2D) is collapsed onto
/// b (1 - 1e-12), so it misses that contract. When [b, 2D] holds too little
/// mass to absorb eta, the shift is taken at the previous completion time b/2
/// instead, moving mass from just above D.
inline AdviceDistribution perturb_boundary(const AdviceDistribution& mu_d, double eta,
                                           double lambda) {
  const auto* adv = mu_d.as<dist::AdversarialContinuous>();
  if (adv == nullptr) throw std::invalid_argument("perturb_boundary expects mu_D");
  const double d = adv->d;
  if (!(eta > 0.0 && eta < d / 512.0)) throw std::invalid_argument("eta must lie in (0, D/512)");

  const auto x = GeometricSchedule::from_phase(lambda);
  int i = x.last_completed(d);
  if (x.completion_time(i) < d) ++i;
  const double b = x.completion_time(i);  // the completion time in [D, 2D)

  double from = b;
  double span_max = 2.0 * d - b;
  double to = b * (1.0 - 1e-12);
  if (span_max <= 0.0 || detail::collapse_cost(d, from, from + span_max, to) < eta) {
    from = d;
    span_max = b - d;
    to = x.completion_time(i - 1) * (1.0 - 1e-12);
    if (detail::collapse_cost(d, from, from + span_max, to) < eta) {
      throw std::domain_error("no completion-time window of mu_D can absorb eta");
    }
  }

  double lo = 0.0;
  double hi = span_max;
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (detail::collapse_cost(d, from, from + mid, to) < eta ? lo : hi) = mid;
  }
  return AdviceDistribution::relocated(mu_d, from, from + hi, to);
}

/// Every mass point moved by `offset`; emd equals |offset|.
inline AdviceDistribution rigid_shift(const AdviceDistribution& mu, double offset) {
  return AdviceDistribution::shifted(mu, offset);
}

/// Moves a fraction `weight` of mu, half down and half up by `offset`.
/// The transport cost is at most weight * offset.
inline AdviceDistribution mass_split(const AdviceDistribution& mu, double weight, double offset) {
  if (!(weight > 0.0 && weight < 1.0)) throw std::invalid_argument("weight must lie in (0,1)");
  return AdviceDistribution::mixture({{1.0 - weight, mu},
                                      {0.5 * weight, AdviceDistribution::shifted(mu, -offset)},
                                      {0.5 * weight, AdviceDistribution::shifted(mu, offset)}});
}

struct SmoothnessCheck {
  double ratio;
  double eta;
  double bound;
  bool ok;
};

inline SmoothnessCheck smoothness_check(double lambda, double d,
                                        const AdviceDistribution& mu_prime) {
  const auto mu_d = adversarial_continuous(d);
  const double eta = emd(mu_d, mu_prime).value;
  if (!(eta < d / 512.0)) {
    throw std::domain_error("advice error " + std::to_string(eta) + " exceeds D/512");
  }
  const double ratio = performance_under(GeometricSchedule::from_phase(lambda), mu_prime);
  const double bound = smoothness_bound(eta, d);
  return {ratio, eta, bound, ratio <= bound + 1e-9};
}

}  // namespace csched
