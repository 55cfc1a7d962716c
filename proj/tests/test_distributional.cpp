#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "csched/distributional.hpp"
#include "csched/monte_carlo.hpp"
#include "oracles.hpp"

using namespace csched;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kFourLn2 = 4.0 * std::numbers::ln2;

GeometricSchedule phase(double l) { return GeometricSchedule::from_phase(l); }

}  // namespace

TEST_CASE("expected profit examples", "[distributional]") {
  for (double d : {1e-3, 0.7, 5.0, 1e6}) {
    for (double l : {0.0, 0.3, 0.999}) {
      CHECK_THAT(expected_profit(adversarial_continuous(d), phase(l)).value,
                 WithinRel(d / 2.0, 1e-12));
    }
  }
  CHECK(expected_profit(AdviceDistribution::point(4.0), phase(0.0)).value == 2.0);
  CHECK_THAT(expected_profit(AdviceDistribution::uniform(2.0, 4.0), phase(0.0)).value,
             WithinRel(1.0, 1e-15));
  CHECK(expected_profit(AdviceDistribution::uniform(2.0, 4.0), phase(0.0)).error_bar == 0.0);
}

TEST_CASE("expected profit matches the uniform overlap oracle", "[distributional]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const double lo = std::exp2(20.0 * u(rng) - 10.0);
    const double hi = lo * (1.0 + 10.0 * u(rng));
    const double l = u(rng);
    CHECK_THAT(expected_profit(AdviceDistribution::uniform(lo, hi), phase(l)).value,
               WithinRel(oracle::uniform_expected_profit(l, lo, hi), 1e-11));
  }
}

TEST_CASE("point-set expected profit matches enumeration", "[distributional]") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<dist::PointMass> pts;
    const int n = 1 + static_cast<int>(u(rng) * 6);
    for (int i = 0; i < n; ++i) pts.push_back({std::exp2(12.0 * u(rng)), 1.0 / n});
    const double l = u(rng);
    double want = 0.0;
    for (const auto& p : pts) want += p.mass * oracle::profit(l, p.time);
    CHECK_THAT(expected_profit(AdviceDistribution::point_set(pts), phase(l)).value,
               WithinRel(want, 1e-12));
  }
}

TEST_CASE("truncated normal error bar is negligible", "[distributional]") {
  const auto mu = AdviceDistribution::truncated_normal(300.0, 15.0);
  const auto e = expected_profit(mu, phase(0.25));
  CHECK(e.error_bar >= 0.0);
  CHECK(e.error_bar < 1e-9 * e.value);
}

TEST_CASE("consistency examples", "[distributional]") {
  CHECK_THAT(consistency(adversarial_continuous(7.0), phase(0.6)), WithinRel(kFourLn2, 1e-12));
  CHECK(consistency(AdviceDistribution::point(4.0), phase(0.0)) == 2.0);
  CHECK_THAT(consistency(AdviceDistribution::point(3.999), phase(0.0)), WithinRel(3.999, 1e-15));
  const auto r = evaluate(AdviceDistribution::uniform(3.0, 5.0), phase(0.1));
  CHECK_THAT(r.consistency, WithinRel(r.expected_value / r.expected_profit, 1e-15));
}

TEST_CASE("guarantee values", "[distributional]") {
  CHECK(bound_upper(1) == 4.0);
  CHECK_THAT(bound_upper(4), WithinRel(16.0 * (std::pow(2.0, 0.25) - 1.0), 1e-14));
  CHECK_THAT(bound_upper(4), WithinAbs(3.02731, 1e-5));
  CHECK_THAT(bound_upper(3), WithinAbs(3.11905, 1e-5));
  CHECK_THAT(bound_upper(1'000'000), WithinAbs(kFourLn2, 1e-5));
  for (int n = 1; n < 200; ++n) CHECK(bound_upper(n + 1) < bound_upper(n));
  CHECK_THROWS(bound_upper(0));
}

TEST_CASE("SEL_n picks the best of the portfolio", "[distributional]") {
  const auto mu = AdviceDistribution::truncated_normal(300.0, 15.0);
  for (int n : {1, 2, 3, 4, 8}) {
    const auto r = sel_n(mu, n);
    CHECK(r.n == n);
    CHECK(r.guarantee == bound_upper(n));
    CHECK(r.consistency <= r.guarantee + 1e-9);
    for (int j = 0; j < n; ++j) CHECK(r.consistency <= consistency(mu, phase(double(j) / n)));
  }
  CHECK(sel_n(AdviceDistribution::point(5.0), 1).lambda == 0.0);
  CHECK(sel_n(AdviceDistribution::point(5.0), 1).consistency <= 4.0);
}

TEST_CASE("sel_for_epsilon", "[distributional]") {
  CHECK(portfolio_size_for(1.3) == 1);
  CHECK(portfolio_size_for(0.3) == 4);
  CHECK(portfolio_size_for(1e9) == 1);
  CHECK(portfolio_size_for(1e-3) > 100);
  CHECK(sel_for_epsilon(AdviceDistribution::point(3.0), 0.3).n == 4);
  CHECK_THROWS(portfolio_size_for(0.0));
}

TEST_CASE("discrete adversarial construction", "[distributional]") {
  const auto single = adversarial_discrete({0.0});
  const auto* d = single.as<dist::AdversarialDiscrete>();
  REQUIRE(d != nullptr);
  REQUIRE(d->points.points().size() == 1);
  CHECK(d->points.points()[0].mass == 1.0);
  CHECK_THAT(consistency(single, phase(0.0)), WithinAbs(4.0, 1e-8));

  const auto two = adversarial_discrete({0.0, 0.5});
  const auto& pts = two.as<dist::AdversarialDiscrete>()->points.points();
  CHECK_THAT(pts[0].mass + pts[1].mass, WithinAbs(1.0, 1e-15));
  for (double l : {0.0, 0.5}) {
    CHECK_THAT(consistency(two, phase(l)), WithinAbs(8.0 * (std::sqrt(2.0) - 1.0), 1e-8));
  }

  SECTION("irregular phases follow the telescoping formula") {
    const std::vector<double> ls{0.05, 0.2, 0.61, 0.9};
    const auto mu = adversarial_discrete(ls, 1e-9);
    for (double l : ls) {
      CHECK_THAT(consistency(mu, phase(l)), WithinRel(oracle::discrete_bound(ls, 1e-9), 1e-9));
    }
  }

  CHECK_THROWS(adversarial_discrete({0.5, 0.2}));
  CHECK_THROWS(adversarial_discrete({0.2, 0.2}));
  CHECK_THROWS(adversarial_discrete({0.0}, 0.2));
  CHECK_THROWS(adversarial_discrete({1.0}));
}

TEST_CASE("averaging over the portfolio", "[distributional]") {
  // Summing the n shifted profit step functions gives, pointwise,
  // (1/n) sum_j l(X(j/n), z) = 2^{(floor(n log2 z) + 1)/n} / (4 n (2^{1/n} - 1)),
  // which is at least z / (4n(2^{1/n}-1)) with equality only on the grid 2^{k/n}.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double lo = std::exp2(10.0 * u(rng));
    const auto mu = AdviceDistribution::uniform(lo, lo * (1.0 + 3.0 * u(rng)));
    for (int n : {1, 2, 4, 8}) {
      double avg = 0.0;
      for (int j = 0; j < n; ++j) avg += expected_profit(mu, phase(double(j) / n)).value;
      avg /= n;
      const double scaled = avg * bound_upper(n);
      CHECK(scaled >= mu.mean() * (1.0 - 1e-12));
      // E[2^{(floor(n log2 z)+1)/n}] by a fine midpoint rule.
      const auto s = mu.support();
      constexpr int kSteps = 200000;
      double want = 0.0;
      for (int i = 0; i < kSteps; ++i) {
        const double z = s.lo + (i + 0.5) * (s.hi - s.lo) / kSteps;
        want += std::exp2((std::floor(n * std::log2(z)) + 1.0) / n);
      }
      want /= kSteps;
      CHECK_THAT(scaled, WithinRel(want, 1e-4));
    }
  }
  SECTION("a point mass off the grid breaks equality") {
    const auto mu = AdviceDistribution::point(3.0);
    double avg = 0.0;
    for (int j = 0; j < 4; ++j) avg += expected_profit(mu, phase(j / 4.0)).value;
    CHECK(avg / 4.0 * bound_upper(4) > 3.3);
  }
}

TEST_CASE("performance under a different distribution", "[distributional]") {
  const auto mu = AdviceDistribution::truncated_normal(50.0, 5.0);
  const auto r = sel_n(mu, 8);
  CHECK(performance_under(r.schedule(), mu) == r.consistency);
  CHECK_THAT(performance_under(phase(0.0), adversarial_continuous(1.0)), WithinRel(kFourLn2, 1e-12));
  CHECK_THAT(performance_under(single_advice_schedule(8.0), AdviceDistribution::point(7.999)),
             WithinRel(7.999 / 2.0, 1e-15));
}

TEST_CASE("Monte-Carlo oracle agrees with the analytic consistency", "[distributional][mc]") {
  const std::vector<std::pair<AdviceDistribution, double>> cases{
      {adversarial_continuous(1.0), 0.0},
      {AdviceDistribution::uniform(2.0, 4.0), 0.0},
      {AdviceDistribution::truncated_normal(40.0, 9.0), 0.3},
      {AdviceDistribution::truncated_normal(2.0, 5.0), 0.8},
      {AdviceDistribution::point_set({{1.0, 0.5}, {3.0, 0.5}}), 0.1},
  };
  std::uint64_t seed = 100;
  for (const auto& [mu, l] : cases) {
    INFO(mu.describe());
    const auto mc = monte_carlo_consistency(mu, phase(l), 1'000'000, seed++, 4);
    CHECK(std::abs(mc.estimate - consistency(mu, phase(l))) <= 4.0 * mc.std_error + 1e-12);
  }
  const auto degenerate = monte_carlo_consistency(AdviceDistribution::point(4.0), phase(0.0), 5000, 9);
  CHECK(degenerate.estimate == 2.0);
  CHECK_THROWS(monte_carlo_consistency(AdviceDistribution::point(4.0), phase(0.0), 999, 9));
}

TEST_CASE("Monte-Carlo is independent of the worker count", "[distributional][mc]") {
  const auto mu = AdviceDistribution::truncated_normal(40.0, 9.0);
  const auto a = monte_carlo_consistency(mu, phase(0.4), 300'000, 77, 1);
  const auto b = monte_carlo_consistency(mu, phase(0.4), 300'000, 77, 8);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
}
