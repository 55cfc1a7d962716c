#pragma once

// Registered experiment sweeps. Each experiment declares its parameters with
// defaults and a fixed column set; rows come out in sweep order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "csched/distribution.hpp"
#include "csched/distributional.hpp"
#include "csched/emd.hpp"
#include "csched/multi_advice.hpp"
#include "csched/numeric.hpp"
#include "csched/parallel.hpp"
#include "csched/harness/csv.hpp"
#include "csched/harness/params.hpp"

namespace csched::harness {

struct ParamSchema {
  std::string name;
  std::string default_value;
  std::string help;
};

struct Experiment {
  std::string name;
  std::string summary;
  std::vector<ParamSchema> params;
  std::vector<std::string> columns;  // after the leading "experiment" column
  std::function<std::vector<Row>(const Params&, std::uint64_t seed, unsigned workers)> run;
};

/// Seed of trial `trial` at prediction-set size k:
/// splitmix64(master ^ splitmix64(k * 2^32 + trial)).
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t k, std::uint64_t trial) {
  return numeric::splitmix64(master ^ numeric::splitmix64((k << 32) + trial));
}

namespace detail {

inline std::vector<int> portfolio_sizes(const Params& p) {
  std::vector<int> out;
  for (double v : p.grid("n")) {
    if (v < 1.0 || v != std::floor(v) || v > kMaxPortfolioSize) {
      throw ParamError("portfolio size n must be a positive integer");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline void require_positive(const std::vector<double>& grid, const char* name) {
  for (double v : grid) {
    if (!(v > 0.0)) throw ParamError(std::string(name) + " values must be positive");
  }
}

// One row per (x, n): SEL_n consistency on the advice built from x.
template <class MakeRow>
std::vector<Row> sel_sweep(const std::string& experiment, const std::vector<double>& xs,
                           const std::vector<int>& ns, unsigned workers, MakeRow make_row) {
  auto blocks = parallel_map(xs.size(), workers, [&](std::size_t i) {
    std::vector<Row> rows;
    for (int n : ns) {
      Row r{experiment};
      make_row(xs[i], n, r);
      rows.push_back(std::move(r));
    }
    return rows;
  });
  std::vector<Row> rows;
  for (auto& b : blocks) {
    for (auto& r : b) rows.push_back(std::move(r));
  }
  return rows;
}

inline void append(Row& r, std::initializer_list<double> values) {
  for (double v : values) r.push_back(format_real(v));
}

inline std::vector<Row> run_normal_ratio(const std::string& name, const Params& p,
                                         unsigned workers, const std::string& x_param) {
  const auto ms = p.grid(x_param);
  require_positive(ms, x_param.c_str());
  const auto ratios = p.grid("sigma_ratio");
  require_positive(ratios, "sigma_ratio");
  const auto ns = portfolio_sizes(p);
  std::vector<Row> rows;
  for (double ratio : ratios) {
    auto part = sel_sweep(name, ms, ns, workers, [&](double m, int n, Row& r) {
      const auto mu = AdviceDistribution::truncated_normal(m, ratio * m);
      append(r, {m, ratio, ratio * m, static_cast<double>(n), sel_n(mu, n).consistency,
                 bound_upper(n)});
    });
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

inline std::vector<Row> run_uniform(const std::string& name, const Params& p, unsigned workers,
                                    const std::string& x_param) {
  const auto ts = p.grid(x_param);
  require_positive(ts, x_param.c_str());
  const double width = p.scalar("width");
  if (!(width > 0.0 && width < 1.0)) throw ParamError("width must lie in (0,1)");
  return sel_sweep(name, ts, portfolio_sizes(p), workers, [&](double t, int n, Row& r) {
    const auto mu = AdviceDistribution::uniform((1.0 - width) * t, (1.0 + width) * t);
    append(r, {t, width, static_cast<double>(n), sel_n(mu, n).consistency, bound_upper(n)});
  });
}

inline std::vector<Row> run_fig_mult(const Params& p, std::uint64_t seed, unsigned workers) {
  const auto ks = p.grid("k");
  const long long trials = p.integer("trials");
  const double lo = p.scalar("tau_lo");
  const double hi = p.scalar("tau_hi");
  if (trials < 1) throw ParamError("trials must be >= 1");
  if (!(lo > 0.0 && hi >= lo)) throw ParamError("need 0 < tau_lo <= tau_hi");
  for (double k : ks) {
    if (k < 1.0 || k != std::floor(k) || k > 1e6) throw ParamError("k must be a positive integer");
  }

  struct Trial {
    double worst;
    double average;
  };
  const std::size_t per_k = static_cast<std::size_t>(trials);
  const auto results = parallel_map(ks.size() * per_k, workers, [&](std::size_t idx) {
    const auto k = static_cast<std::uint64_t>(ks[idx / per_k]);
    std::mt19937_64 rng(trial_seed(seed, k, idx % per_k));
    std::vector<double> taus(k);
    for (auto& t : taus) t = lo + (hi - lo) * numeric::open_unit(rng());
    const PredictionSet set(std::move(taus));
    const auto best = mult_gap(set);
    return Trial{best.consistency, average_consistency(best.schedule, set)};
  });

  std::vector<Row> rows;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    double worst = 0.0;
    double average = 0.0;
    for (std::size_t t = 0; t < per_k; ++t) {
      worst += results[i * per_k + t].worst;
      average += results[i * per_k + t].average;
    }
    Row r{"fig_mult"};
    append(r, {ks[i], static_cast<double>(trials), worst / static_cast<double>(trials),
               average / static_cast<double>(trials), bound_multi(static_cast<int>(ks[i]))});
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<Row> run_app_horizon(const Params& p, unsigned workers) {
  const auto xs = p.grid("x");
  require_positive(xs, "x");
  const double ratio = p.scalar("sigma_ratio");
  const double width = p.scalar("width");
  if (!(ratio > 0.0)) throw ParamError("sigma_ratio must be positive");
  if (!(width > 0.0 && width < 1.0)) throw ParamError("width must lie in (0,1)");
  const auto ns = portfolio_sizes(p);

  std::vector<Row> rows;
  for (const auto& family : p.tokens("family")) {
    if (family != "normal" && family != "uniform") {
      throw ParamError("family must be 'normal' or 'uniform', got '" + family + "'");
    }
    auto part = sel_sweep("app_horizon", xs, ns, workers, [&](double x, int n, Row& r) {
      const auto mu = family == "normal"
                          ? AdviceDistribution::truncated_normal(x, ratio * x)
                          : AdviceDistribution::uniform((1.0 - width) * x, (1.0 + width) * x);
      r.push_back(family);
      append(r, {x, static_cast<double>(n), sel_n(mu, n).consistency, bound_upper(n)});
    });
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

inline std::vector<Row> run_app_fixed_sigma(const Params& p, unsigned workers) {
  const auto ms = p.grid("m");
  require_positive(ms, "m");
  const double sigma = p.scalar("sigma");
  if (!(sigma > 0.0)) throw ParamError("sigma must be positive");
  return sel_sweep("app_fixed_sigma", ms, portfolio_sizes(p), workers,
                   [&](double m, int n, Row& r) {
                     const auto mu = AdviceDistribution::truncated_normal(m, sigma);
                     append(r, {m, sigma, static_cast<double>(n), sel_n(mu, n).consistency,
                                bound_upper(n)});
                   });
}

inline std::vector<Row> run_app_error(const Params& p, unsigned workers) {
  const auto ms = p.grid("m");
  const auto actual = p.grid("m_actual");
  require_positive(ms, "m");
  require_positive(actual, "m_actual");
  const double sigma = p.scalar("sigma");
  if (!(sigma > 0.0)) throw ParamError("sigma must be positive");
  const auto ns = portfolio_sizes(p);
  if (ns.size() != 1) throw ParamError("app_error takes a single portfolio size n");
  const int n = ns.front();

  // Best achievable on each actual distribution, shared across advised means.
  const auto error_free = parallel_map(actual.size(), workers, [&](std::size_t i) {
    return sel_n(AdviceDistribution::truncated_normal(actual[i], sigma), n).consistency;
  });

  std::vector<Row> rows;
  for (double m : ms) {
    const auto advice = AdviceDistribution::truncated_normal(m, sigma);
    const auto chosen = sel_n(advice, n).schedule();
    auto part = parallel_map(actual.size(), workers, [&](std::size_t i) {
      const auto real = AdviceDistribution::truncated_normal(actual[i], sigma);
      Row r{"app_error"};
      append(r, {m, actual[i], sigma, static_cast<double>(n), performance_under(chosen, real),
                 error_free[i], emd(advice, real).value});
      return r;
    });
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

inline std::vector<Row> run_smoothness(const Params& p, unsigned workers) {
  const auto ds = p.grid("D");
  const auto lambdas = p.grid("lambda");
  const auto ratios = p.grid("eta_ratio");
  const auto kinds = p.tokens("perturbation");
  require_positive(ds, "D");
  for (double l : lambdas) {
    if (!(l >= 0.0 && l < 1.0)) throw ParamError("lambda values must lie in [0,1)");
  }
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0 / 512.0)) throw ParamError("eta_ratio values must lie in (0, 1/512)");
  }
  for (const auto& k : kinds) {
    if (k != "boundary" && k != "shift_up" && k != "split") {
      throw ParamError("perturbation must be boundary, shift_up or split, got '" + k + "'");
    }
  }

  const std::size_t per_d = lambdas.size() * ratios.size() * kinds.size();
  return parallel_map(ds.size() * per_d, workers, [&](std::size_t idx) {
    const double d = ds[idx / per_d];
    std::size_t rest = idx % per_d;
    const double lambda = lambdas[rest / (ratios.size() * kinds.size())];
    rest %= ratios.size() * kinds.size();
    const double ratio = ratios[rest / kinds.size()];
    const std::string& kind = kinds[rest % kinds.size()];

    const double eta = ratio * d;
    const auto mu_d = adversarial_continuous(d);
    const auto mu_prime = kind == "boundary"   ? perturb_boundary(mu_d, eta, lambda)
                          : kind == "shift_up" ? rigid_shift(mu_d, eta)
                                               : mass_split(mu_d, 0.5, 2.0 * eta);
    const auto check = smoothness_check(lambda, d, mu_prime);
    Row r{"smoothness"};
    append(r, {d, lambda, ratio});
    r.push_back(kind);
    append(r, {check.eta, check.ratio, check.bound});
    r.push_back(check.ok ? "1" : "0");
    return r;
  });
}

}  // namespace detail

inline const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> experiments = [] {
    std::vector<Experiment> e;
    e.push_back({"fig_normal",
                 "SEL_n on truncated normal advice, sigma = sigma_ratio * m",
                 {{"m", "1:1024", "mean of the advice"},
                  {"sigma_ratio", "0.05", "sigma / m"},
                  {"n", "1:4", "portfolio sizes"}},
                 {"m", "sigma_ratio", "sigma", "n", "consistency", "bound"},
                 [](const Params& p, std::uint64_t, unsigned w) {
                   return detail::run_normal_ratio("fig_normal", p, w, "m");
                 }});
    e.push_back({"fig_uniform",
                 "SEL_n on uniform advice U[(1-width) t, (1+width) t]",
                 {{"t", "1:1024", "centre of the advice"},
                  {"width", "0.05", "relative half-width"},
                  {"n", "1:4", "portfolio sizes"}},
                 {"t", "width", "n", "consistency", "bound"},
                 [](const Params& p, std::uint64_t, unsigned w) {
                   return detail::run_uniform("fig_uniform", p, w, "t");
                 }});
    e.push_back({"fig_mult",
                 "mult_gap on k predictions drawn uniformly from [tau_lo, tau_hi]",
                 {{"k", "1:10", "prediction-set sizes"},
                  {"trials", "1000", "random sets per k"},
                  {"tau_lo", "1", "lower end of the prediction range"},
                  {"tau_hi", "1024", "upper end of the prediction range"}},
                 {"k", "trials", "worst_consistency_mean", "avg_consistency_mean", "bound"},
                 [](const Params& p, std::uint64_t s, unsigned w) {
                   return detail::run_fig_mult(p, s, w);
                 }});
    e.push_back({"app_horizon",
                 "fig_normal and fig_uniform over a longer horizon",
                 {{"x", "1:20000", "advice mean (normal) or centre (uniform)"},
                  {"family", "normal,uniform", "advice families"},
                  {"sigma_ratio", "0.05", "sigma / m for the normal family"},
                  {"width", "0.05", "relative half-width for the uniform family"},
                  {"n", "1:4", "portfolio sizes"}},
                 {"family", "x", "n", "consistency", "bound"},
                 [](const Params& p, std::uint64_t, unsigned w) {
                   return detail::run_app_horizon(p, w);
                 }});
    e.push_back({"app_fixed_sigma",
                 "SEL_n on truncated normal advice with a fixed sigma",
                 {{"m", "1:1024", "mean of the advice"},
                  {"sigma", "10", "standard deviation"},
                  {"n", "1:4", "portfolio sizes"}},
                 {"m", "sigma", "n", "consistency", "bound"},
                 [](const Params& p, std::uint64_t, unsigned w) {
                   return detail::run_app_fixed_sigma(p, w);
                 }});
    e.push_back({"app_sigma_scale",
                 "fig_normal at other sigma / m ratios",
                 {{"m", "1:1024", "mean of the advice"},
                  {"sigma_ratio", "0.01,0.2", "sigma / m"},
                  {"n", "1:4", "portfolio sizes"}},
                 {"m", "sigma_ratio", "sigma", "n", "consistency", "bound"},
                 [](const Params& p, std::uint64_t, unsigned w) {
                   return detail::run_normal_ratio("app_sigma_scale", p, w, "m");
                 }});
    e.push_back({"app_error",
                 "SEL_n tuned to N(m, sigma) advice, run against N(m_actual, sigma)",
                 {{"m", "500,700", "advised mean"},
                  {"m_actual", "1:2000", "actual mean"},
                  {"sigma", "25", "standard deviation of both"},
                  {"n", "16", "portfolio size"}},
                 {"m", "m_actual", "sigma", "n", "performance", "error_free_consistency",
                  "error"},
                 [](const Params& p, std::uint64_t, unsigned w) {
                   return detail::run_app_error(p, w);
                 }});
    e.push_back({"smoothness",
                 "X(lambda) against mu_D perturbed by EMD about eta_ratio * D",
                 {{"D", "1e-3:1e6:10:log", "scale of mu_D"},
                  {"lambda", "0:0.875:8", "schedule phases"},
                  {"eta_ratio", "1e-5,0.000244140625,0.0009765625", "perturbation budget / D"},
                  {"perturbation", "boundary,shift_up,split", "perturbation kinds"}},
                 {"D", "lambda", "eta_ratio", "perturbation", "eta", "ratio", "bound", "ok"},
                 [](const Params& p, std::uint64_t, unsigned w) {
                   return detail::run_smoothness(p, w);
                 }});
    return e;
  }();
  return experiments;
}

inline const Experiment* find_experiment(std::string_view name) {
  for (const auto& e : registry()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1] ? 1u : 0u)});
      diag = up;
    }
  }
  return row[b.size()];
}

/// Registered name closest to `name` by edit distance (first on ties).
inline std::string nearest_experiment(std::string_view name) {
  const Experiment* best = nullptr;
  std::size_t best_d = 0;
  for (const auto& e : registry()) {
    const std::size_t d = edit_distance(name, e.name);
    if (!best || d < best_d) {
      best = &e;
      best_d = d;
    }
  }
  return best->name;
}

}  // namespace csched::harness
