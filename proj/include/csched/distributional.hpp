#pragma once

// Consistency under distributional advice: c(X, mu) = E[z] / E[l(X, z)],
// the SEL_n portfolio selector, and the adversarial advice constructions.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "csched/distribution.hpp"
#include "csched/numeric.hpp"
#include "csched/schedule.hpp"

namespace csched {

inline constexpr double kDefaultAdversarialEps = 1e-9;
inline constexpr int kMaxPortfolioSize = 10'000'000;

struct ExpectedProfit {
  double value;
  /// Bound on the profit missed by truncating an unbounded support to its
  /// quantile window; zero for bounded supports.
  double error_bar;
};

struct ConsistencyReport {
  double lambda = 0.0;
  double consistency = 0.0;
  double guarantee = 4.0;
  double expected_value = 0.0;
  double expected_profit = 0.0;
  double profit_error = 0.0;
  int n = 0;  // portfolio size, 0 when a single schedule was evaluated

  GeometricSchedule schedule() const { return GeometricSchedule::from_phase(lambda); }
};

/// E[l(X, z)] summed over the profit step function: contract i earns its
/// length on [completion_time(i), completion_time(i+1)).
inline ExpectedProfit expected_profit(const AdviceDistribution& mu,
                                      const GeometricSchedule& x) {
  const Support s = mu.support();
  const int first = x.last_completed(s.lo);
  const int last = x.last_completed(s.hi);
  constexpr double inf = std::numeric_limits<double>::infinity();

  double sum = 0.0;
  for (int i = first; i <= last; ++i) {
    // Unbounded kinds: the outermost steps absorb the tails.
    const double a = (i == first && !s.bounded) ? 0.0 : x.completion_time(i);
    const double b = (i == last && !s.bounded) ? inf : x.completion_time(i + 1);
    sum += x.contract_length(i) * mu.interval_mass(a, b);
  }

  double error = 0.0;
  if (!s.bounded) {
    // Lower tail credited with contract `first` although it may finish earlier;
    // upper tail credited with contract `last` although z/2 bounds its profit.
    error = mu.interval_mass(0.0, x.completion_time(first)) * x.contract_length(first) +
            0.5 * mu.partial_mean(x.completion_time(last + 1), inf);
  }
  return {sum, error};
}

inline double dist_mean(const AdviceDistribution& mu) { return mu.mean(); }

inline double interval_mass(const AdviceDistribution& mu, double a, double b) {
  if (!(a > 0.0 && b >= a)) throw std::invalid_argument("interval must satisfy 0 < a <= b");
  return mu.interval_mass(a, b);
}

inline ConsistencyReport evaluate(const AdviceDistribution& mu, const GeometricSchedule& x) {
  const ExpectedProfit profit = expected_profit(mu, x);
  if (!(profit.value > 0.0) || !std::isfinite(profit.value)) {
    throw std::domain_error("expected profit underflows to zero for " + mu.describe());
  }
  ConsistencyReport r;
  r.lambda = x.phase();
  r.expected_value = mu.mean();
  r.expected_profit = profit.value;
  r.profit_error = profit.error_bar;
  r.consistency = r.expected_value / r.expected_profit;
  return r;
}

inline double consistency(const AdviceDistribution& mu, const GeometricSchedule& x) {
  return evaluate(mu, x).consistency;
}

/// Realized ratio E[z]/E[l(X,z)] when the schedule meets `actual` rather than
/// the advice it was tuned for.
inline double performance_under(const GeometricSchedule& x, const AdviceDistribution& actual) {
  return consistency(actual, x);
}

/// 4n(2^{1/n} - 1): decreasing in n, tends to 4 ln 2.
inline double bound_upper(int n) {
  if (n < 1) throw std::invalid_argument("portfolio size must be >= 1");
  return 4.0 * n * std::expm1(numeric::kLn2 / n);
}

/// Best schedule among X(j/n), j = 0..n-1 (smallest j on ties).
inline ConsistencyReport sel_n(const AdviceDistribution& mu, int n) {
  if (n < 1) throw std::invalid_argument("portfolio size must be >= 1");
  ConsistencyReport best;
  for (int j = 0; j < n; ++j) {
    const auto r = evaluate(mu, GeometricSchedule::from_phase(static_cast<double>(j) / n));
    if (j == 0 || r.consistency < best.consistency) best = r;
  }
  best.n = n;
  best.guarantee = bound_upper(n);
  return best;
}

/// Smallest n whose guarantee is within eps of 4 ln 2.
inline int portfolio_size_for(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double target = numeric::kFourLn2 + eps;
  for (int n = 1; n <= kMaxPortfolioSize; ++n) {
    if (bound_upper(n) <= target) return n;
  }
  throw std::runtime_error("eps too small: portfolio would exceed " +
                           std::to_string(kMaxPortfolioSize) + " schedules");
}

inline ConsistencyReport sel_for_epsilon(const AdviceDistribution& mu, double eps) {
  return sel_n(mu, portfolio_size_for(eps));
}

/// Point k at 2^{2 - lambda_k - eps} with mass 2^{lambda_{k+1}-lambda_0} -
/// 2^{lambda_k - lambda_0} (lambda_n = lambda_0 + 1). Every schedule
/// X(lambda_k) has consistency 4(-n + sum_j 2^{lambda_{j+1}-lambda_j}) 2^{-eps}.
inline AdviceDistribution adversarial_discrete(const std::vector<double>& lambdas,
                                               double eps = kDefaultAdversarialEps) {
  if (lambdas.empty()) throw std::invalid_argument("need at least one phase");
  if (!(eps > 0.0 && eps < 0.1)) throw std::invalid_argument("eps must lie in (0, 0.1)");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] >= 0.0 && lambdas[k] < 1.0)) {
      throw std::invalid_argument("phases must lie in [0,1)");
    }
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) {
      throw std::invalid_argument("phases must be strictly increasing");
    }
  }
  const double base = lambdas.front();
  const std::size_t n = lambdas.size();
  std::vector<dist::PointMass> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double next = k + 1 < n ? std::exp2(lambdas[k + 1] - base) : 2.0;
    points.push_back({std::exp2(2.0 - lambdas[k] - eps), next - std::exp2(lambdas[k] - base)});
  }
  return AdviceDistribution::adversarial_discrete(dist::PointSet(std::move(points)), lambdas,
                                                  eps);
}

/// Density 2D/x^2 on [D, 2D]: every 4-robust schedule has consistency 4 ln 2.
inline AdviceDistribution adversarial_continuous(double d) {
  return AdviceDistribution::adversarial_continuous(d);
}

}  // namespace csched
