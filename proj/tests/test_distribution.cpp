#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "csched/distribution.hpp"
#include "csched/distributional.hpp"

using namespace csched;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Trapezoid rule on the CDF: integral_0^x F, independent of the closed forms.
double numeric_primitive(const AdviceDistribution& mu, double x, int steps = 200000) {
  const double h = x / steps;
  double s = 0.5 * (mu.prob_below(0.0) + mu.prob_below(x));
  for (int i = 1; i < steps; ++i) s += mu.prob_below(i * h);
  return s * h;
}

std::vector<AdviceDistribution> sample_family() {
  return {AdviceDistribution::uniform(0.95, 1.05),
          AdviceDistribution::uniform(3.0, 11.0),
          AdviceDistribution::truncated_normal(10.0, 2.0),
          AdviceDistribution::truncated_normal(1.0, 3.0),
          AdviceDistribution::truncated_normal(-2.0, 1.5),
          AdviceDistribution::adversarial_continuous(3.0),
          AdviceDistribution::point_set({{1.0, 0.25}, {2.5, 0.5}, {7.0, 0.25}}),
          adversarial_discrete({0.0, 0.3, 0.7}),
          AdviceDistribution::shifted(AdviceDistribution::uniform(1.0, 2.0), 0.5),
          AdviceDistribution::mixture({{0.3, AdviceDistribution::uniform(1.0, 2.0)},
                                       {0.7, AdviceDistribution::point(4.0)}}),
          AdviceDistribution::relocated(AdviceDistribution::adversarial_continuous(1.0), 1.2, 1.3,
                                        1.0)};
}

}  // namespace

TEST_CASE("means", "[distribution]") {
  CHECK_THAT(dist_mean(AdviceDistribution::adversarial_continuous(1.0)),
             WithinRel(2.0 * std::numbers::ln2, 1e-15));
  CHECK_THAT(dist_mean(AdviceDistribution::uniform(0.95, 1.05)), WithinRel(1.0, 1e-15));
  CHECK(dist_mean(AdviceDistribution::point(4.0)) == 4.0);
}

TEST_CASE("interval mass conventions", "[distribution]") {
  CHECK_THAT(interval_mass(AdviceDistribution::uniform(1, 2), 1.0, 1.5), WithinAbs(0.5, 1e-15));
  const auto p2 = AdviceDistribution::point(2.0);
  CHECK(interval_mass(p2, 2.0, 3.0) == 1.0);
  CHECK(interval_mass(p2, 1.0, 2.0) == 0.0);
  CHECK_THAT(interval_mass(AdviceDistribution::adversarial_continuous(1.0), 1.0, std::sqrt(2.0)),
             WithinAbs(2.0 - std::sqrt(2.0), 1e-15));
  CHECK_THROWS(interval_mass(p2, 0.0, 1.0));
  CHECK_THROWS(interval_mass(p2, 2.0, 1.0));
}

TEST_CASE("adversarial continuous CDF endpoints", "[distribution]") {
  const auto mu = AdviceDistribution::adversarial_continuous(1.0);
  CHECK(mu.prob_below(1.0) == 0.0);
  CHECK(mu.prob_below(2.0) == 1.0);
  CHECK_THAT(mu.prob_below(1.5), WithinAbs(2.0 - 2.0 / 1.5, 1e-15));
}

TEST_CASE("invalid parameters are rejected", "[distribution]") {
  CHECK_THROWS(AdviceDistribution::uniform(2.0, 1.0));
  CHECK_THROWS(AdviceDistribution::uniform(0.0, 1.0));
  CHECK_THROWS(AdviceDistribution::truncated_normal(1.0, 0.0));
  CHECK_THROWS(AdviceDistribution::adversarial_continuous(-1.0));
  CHECK_THROWS(AdviceDistribution::point_set({{1.0, 0.5}, {2.0, 0.4}}));
  CHECK_THROWS(AdviceDistribution::point_set({{-1.0, 1.0}}));
  CHECK_THROWS(AdviceDistribution::shifted(AdviceDistribution::uniform(1.0, 2.0), -1.0));
  CHECK_THROWS(AdviceDistribution::mixture({{0.5, AdviceDistribution::point(1.0)}}));
}

TEST_CASE("mass is additive and totals one", "[distribution]") {
  for (const auto& mu : sample_family()) {
    INFO(mu.describe());
    const Support s = mu.support();
    const double lo = s.bounded ? s.lo : std::max(s.lo * 0.5, 1e-300);
    const double hi = s.bounded ? std::nextafter(s.hi, 1e308) : s.hi * 2.0;
    CHECK_THAT(mu.interval_mass(lo, hi), WithinAbs(1.0, 1e-11));
    const double a = lo + 0.3 * (hi - lo);
    const double b = lo + 0.6 * (hi - lo);
    CHECK_THAT(mu.interval_mass(lo, a) + mu.interval_mass(a, b) + mu.interval_mass(b, hi),
               WithinAbs(mu.interval_mass(lo, hi), 1e-12));
    CHECK_THAT(mu.partial_mean(lo, hi), WithinRel(mu.mean(), 1e-10));
  }
}

TEST_CASE("CDF primitive matches numerical integration", "[distribution]") {
  for (const auto& mu : sample_family()) {
    INFO(mu.describe());
    const double x = mu.support().hi * 1.1;
    CHECK_THAT(mu.primitive(x), WithinAbs(numeric_primitive(mu, x), 1e-4 * x));
    // For x beyond the support, integral of F is x - E[z].
    CHECK_THAT(mu.primitive(x), WithinAbs(x - mu.mean(), 1e-9 * x));
  }
}

TEST_CASE("quantile inverts the CDF", "[distribution]") {
  for (const auto& mu : sample_family()) {
    INFO(mu.describe());
    for (double u : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
      const double x = mu.quantile(u);
      // Smallest x with P(z <= x) >= u: P(z < x) <= u <= P(z <= x).
      CHECK(mu.prob_below(x) <= u + 1e-9);
      CHECK(mu.prob_below(std::nextafter(x, 1e308)) + 1e-9 >= u);
    }
  }
}

TEST_CASE("truncated normal tails stay accurate", "[distribution]") {
  const auto mu = AdviceDistribution::truncated_normal(100.0, 1.0);
  // Mass above m + 9 sigma: sf(9) = 1.1285884e-19.
  CHECK_THAT(mu.interval_mass(109.0, 1e6), WithinRel(1.1285884059538407e-19, 1e-6));
  const auto far = AdviceDistribution::truncated_normal(-30.0, 1.0);
  CHECK(std::isfinite(far.mean()));
  CHECK(far.mean() > 0.0);
  CHECK(far.mean() < 0.1);
}
