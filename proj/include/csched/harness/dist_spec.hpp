#pragma once

// Textual distribution descriptions for the command line:
//
//   points:4@0.5,8@0.5          point masses time@probability
//   uniform:95,105
//   normal:100,5                truncated normal (mean, sigma)
//   adversarial:16              density 2D/x^2 on [D, 2D]
//   adversarial-discrete:0,0.5[@1e-9]

#include <string>
#include <vector>

#include "csched/distribution.hpp"
#include "csched/distributional.hpp"
#include "csched/harness/params.hpp"

namespace csched::harness {

inline AdviceDistribution parse_distribution(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ParamError("distribution must look like kind:args, got '" + text + "'");
  }
  const std::string kind(trim(std::string_view(text).substr(0, colon)));
  const std::string args = text.substr(colon + 1);

  const auto reals = [&](std::size_t expected) {
    const auto items = split(args, ',');
    if (items.size() != expected) {
      throw ParamError(kind + " takes " + std::to_string(expected) + " values, got '" + args + "'");
    }
    std::vector<double> out;
    for (const auto& s : items) out.push_back(parse_real(s));
    return out;
  };

  try {
    if (kind == "points") {
      std::vector<dist::PointMass> pts;
      for (const auto& item : split(args, ',')) {
        const auto tp = split(item, '@');
        if (tp.size() != 2) throw ParamError("point must be time@probability, got '" + item + "'");
        pts.push_back({parse_real(tp[0]), parse_real(tp[1])});
      }
      return AdviceDistribution::point_set(std::move(pts));
    }
    if (kind == "uniform") {
      const auto v = reals(2);
      return AdviceDistribution::uniform(v[0], v[1]);
    }
    if (kind == "normal") {
      const auto v = reals(2);
      return AdviceDistribution::truncated_normal(v[0], v[1]);
    }
    if (kind == "adversarial") return adversarial_continuous(reals(1)[0]);
    if (kind == "adversarial-discrete") {
      const auto at = split(args, '@');
      if (at.size() > 2) throw ParamError("adversarial-discrete takes at most one '@eps'");
      std::vector<double> lambdas;
      for (const auto& s : split(at[0], ',')) lambdas.push_back(parse_real(s));
      const double eps = at.size() == 2 ? parse_real(at[1]) : kDefaultAdversarialEps;
      return adversarial_discrete(lambdas, eps);
    }
  } catch (const ParamError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParamError(std::string("invalid distribution '") + text + "': " + e.what());
  }
  throw ParamError("unknown distribution kind '" + kind +
                   "' (points, uniform, normal, adversarial, adversarial-discrete)");
}

}  // namespace csched::harness
