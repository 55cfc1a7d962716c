// A handful of candidate deadlines: compare the exact and the circle-gap
// optimizers against the worst case 4.

#include <cstdio>
#include <vector>

#include "csched/multi_advice.hpp"

int main() {
  using namespace csched;

  const PredictionSet p({90.0, 130.0, 200.0, 410.0});
  const auto gaps = gap_profile(p);
  for (std::size_t j = 0; j < gaps.phases.size(); ++j) {
    std::printf("phase %.4f  gap %.4f\n", gaps.phases[j], gaps.gaps[j]);
  }

  const auto exact = mult_exact(p);
  const auto gap = mult_gap(p);
  std::printf("exact: anchored at %.0f, worst %.5f, average %.5f\n", p.taus()[exact.anchor],
              exact.consistency, average_consistency(exact.schedule, p));
  std::printf("gap:   anchored at %.0f, worst %.5f\n", p.taus()[gap.anchor], gap.consistency);
  std::printf("bound 2^(2-1/k) = %.5f\n", bound_multi(static_cast<int>(p.size())));
}
