// Pick a schedule for a truncated normal deadline estimate and see how far
// the realized ratio drifts when the estimate is off.

#include <cstdio>

#include "csched/distributional.hpp"
#include "csched/emd.hpp"
#include "csched/monte_carlo.hpp"

int main() {
  using namespace csched;

  const auto advice = AdviceDistribution::truncated_normal(300.0, 15.0);
  std::printf("advice: %s, mean %.3f\n", advice.describe().c_str(), advice.mean());

  for (int n : {1, 2, 4, 8, 16}) {
    const auto r = sel_n(advice, n);
    std::printf("SEL_%-2d  lambda=%.4f  consistency=%.5f  guarantee=%.5f\n", n, r.lambda,
                r.consistency, r.guarantee);
  }

  const auto pick = sel_n(advice, 16).schedule();
  const auto mc = monte_carlo_consistency(advice, pick, 200'000, 7);
  std::printf("Monte-Carlo check: %.5f +- %.5f\n", mc.estimate, mc.std_error);

  for (double m : {280.0, 320.0, 400.0}) {
    const auto actual = AdviceDistribution::truncated_normal(m, 15.0);
    std::printf("actual mean %.0f: emd %.2f, ratio %.5f\n", m, emd(advice, actual).value,
                performance_under(pick, actual));
  }
}
