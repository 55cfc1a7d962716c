// contract_sched: experiment sweeps and one-off queries.
//
// Exit codes: 0 success, 2 bad arguments, 3 unknown experiment, 4 I/O failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csched/distributional.hpp"
#include "csched/emd.hpp"
#include "csched/harness/csv.hpp"
#include "csched/harness/dist_spec.hpp"
#include "csched/harness/experiments.hpp"
#include "csched/harness/params.hpp"
#include "csched/harness/runner.hpp"
#include "csched/multi_advice.hpp"
#include "csched/parallel.hpp"

namespace {

namespace h = csched::harness;
using h::format_real;

enum ExitCode : int { kOk = 0, kBadArgs = 2, kUnknownExperiment = 3, kIoFailure = 4 };

std::map<std::string, std::string> parse_sets(const std::vector<std::string>& sets) {
  std::map<std::string, std::string> out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw h::ParamError("--set expects key=value, got '" + s + "'");
    out[std::string(h::trim(std::string_view(s).substr(0, eq)))] =
        std::string(h::trim(std::string_view(s).substr(eq + 1)));
  }
  return out;
}

void print_row(const std::vector<std::string>& header, const std::vector<std::string>& row) {
  std::cout << h::to_csv({header, {row}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contract scheduling with advice: sweeps and queries"};
  app.require_subcommand(1);

  std::optional<unsigned> threads;
  app.add_option("--threads", threads, "worker threads (default: hardware, capped by " +
                                           std::string(csched::kThreadsEnv) + ")")
      ->check(CLI::PositiveNumber);

  // run
  auto* run = app.add_subcommand("run", "run a registered experiment and write CSV");
  std::string experiment;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string config;
  run->add_option("--experiment,experiment", experiment, "experiment name (see `list`)");
  run->add_option("--set", sets, "parameter override key=value (repeatable)");
  run->add_option("--seed", seed, "master seed (default 0)");
  run->add_option("--out", out, "output CSV path, '-' for stdout (default)");
  run->add_option("--config", config, "key=value config file; flags override it");
  run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  // list
  auto* list = app.add_subcommand("list", "list experiments and their default parameters");

  // eval
  auto* eval = app.add_subcommand("eval", "consistency of X(lambda) or SEL_n on a distribution");
  std::string dist_text;
  std::optional<double> lambda;
  std::optional<int> portfolio;
  eval->add_option("--dist", dist_text, "distribution, e.g. normal:100,5")->required();
  auto* lambda_opt = eval->add_option("--lambda", lambda, "schedule phase in [0,1)");
  eval->add_option("--n", portfolio, "portfolio size for SEL_n")->excludes(lambda_opt);

  // mult
  auto* mult = app.add_subcommand("mult", "best 4-robust schedule for a prediction set");
  std::string taus_text;
  std::string method = "gap";
  mult->add_option("--tau", taus_text, "comma-separated predictions")->required();
  mult->add_option("--method", method, "gap (O(k log k)) or exact (O(k^2))")
      ->check(CLI::IsMember({"gap", "exact"}));

  // emd
  auto* emd_cmd = app.add_subcommand("emd", "Earth Mover's Distance between two distributions");
  std::string a_text;
  std::string b_text;
  emd_cmd->add_option("--a", a_text, "first distribution")->required();
  emd_cmd->add_option("--b", b_text, "second distribution")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadArgs;
  }

  try {
    if (*list) {
      for (const auto& e : h::registry()) {
        std::cout << e.name << "  " << e.summary << '\n';
        for (const auto& p : e.params) {
          std::cout << "    " << p.name << '=' << p.default_value << "  " << p.help << '\n';
        }
      }
      return kOk;
    }

    if (*run) {
      h::ConfigFile file;
      if (!config.empty()) file = h::load_config(config);
      h::ExperimentSpec spec;
      spec.name = !experiment.empty() ? experiment : file.experiment.value_or("");
      if (spec.name.empty()) throw h::ParamError("run needs --experiment NAME");
      spec.params = file.params;
      for (const auto& [k, v] : parse_sets(sets)) spec.params[k] = v;
      spec.seed = seed.value_or(file.seed.value_or(0));
      spec.output_path = out.value_or(file.out.value_or("-"));
      const unsigned workers = threads.value_or(file.threads.value_or(csched::default_worker_count()));
      h::run_to_file(spec, workers);
      return kOk;
    }

    if (*eval) {
      const auto mu = h::parse_distribution(dist_text);
      csched::ConsistencyReport r;
      if (portfolio) {
        r = csched::sel_n(mu, *portfolio);
      } else {
        r = csched::evaluate(mu, csched::GeometricSchedule::from_phase(lambda.value_or(0.0)));
      }
      print_row({"lambda", "n", "consistency", "guarantee", "expected_value", "expected_profit",
                 "profit_error"},
                {format_real(r.lambda), std::to_string(r.n), format_real(r.consistency),
                 format_real(r.guarantee), format_real(r.expected_value),
                 format_real(r.expected_profit), format_real(r.profit_error)});
      return kOk;
    }

    if (*mult) {
      std::vector<double> taus;
      for (const auto& s : h::split(taus_text, ',')) taus.push_back(h::parse_real(s));
      const csched::PredictionSet set(std::move(taus));
      const auto best = method == "exact" ? csched::mult_exact(set) : csched::mult_gap(set);
      print_row({"k", "lambda", "anchor_tau", "consistency", "average_consistency", "bound"},
                {std::to_string(set.size()), format_real(best.schedule.phase()),
                 format_real(set.taus()[best.anchor]), format_real(best.consistency),
                 format_real(csched::average_consistency(best.schedule, set)),
                 format_real(csched::bound_multi(static_cast<int>(set.size())))});
      return kOk;
    }

    if (*emd_cmd) {
      const auto a = h::parse_distribution(a_text);
      const auto b = h::parse_distribution(b_text);
      print_row({"emd"}, {format_real(csched::emd(a, b).value)});
      return kOk;
    }
  } catch (const h::UnknownExperiment& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnknownExperiment;
  } catch (const h::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
