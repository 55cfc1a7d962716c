#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "csched/harness/csv.hpp"
#include "csched/harness/experiments.hpp"
#include "csched/harness/params.hpp"

namespace csched::harness {

/// Name not in the registry (CLI exit code 3).
class UnknownExperiment : public std::invalid_argument {
 public:
  explicit UnknownExperiment(const std::string& name)
      : std::invalid_argument("unknown experiment '" + name + "'; did you mean '" +
                              nearest_experiment(name) + "'?") {}
};

struct ExperimentSpec {
  std::string name;
  std::map<std::string, std::string> params;  // overrides of the defaults
  std::uint64_t seed = 0;
  std::string output_path = "-";
};

inline const Experiment& lookup(const std::string& name) {
  const Experiment* e = find_experiment(name);
  if (e == nullptr) throw UnknownExperiment(name);
  return *e;
}

inline Params resolve_params(const Experiment& e, const std::map<std::string, std::string>& over) {
  std::map<std::string, std::string> values;
  for (const auto& s : e.params) values[s.name] = s.default_value;
  for (const auto& [k, v] : over) {
    if (!values.count(k)) {
      std::string known;
      for (const auto& s : e.params) known += (known.empty() ? "" : ", ") + s.name;
      throw ParamError("experiment " + e.name + " has no parameter '" + k + "' (" + known + ")");
    }
    values[k] = v;
  }
  return Params(std::move(values));
}

inline Table run(const ExperimentSpec& spec, unsigned workers) {
  const Experiment& e = lookup(spec.name);
  const Params params = resolve_params(e, spec.params);
  Table t;
  t.header.push_back("experiment");
  t.header.insert(t.header.end(), e.columns.begin(), e.columns.end());
  t.rows = e.run(params, spec.seed, workers);
  return t;
}

inline void run_to_file(const ExperimentSpec& spec, unsigned workers) {
  write_csv(run(spec, workers), spec.output_path);
}

/// key=value lines, '#' comments. Reserved keys: experiment, seed, out,
/// threads; any other key sets an experiment parameter.
struct ConfigFile {
  std::optional<std::string> experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::map<std::string, std::string> params;
};

inline std::uint64_t parse_seed(const std::string& text) {
  const auto s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParamError("seed must be an unsigned 64-bit integer, got '" + text + "'");
  }
  return v;
}

inline ConfigFile parse_config(std::istream& in) {
  ConfigFile c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParamError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) throw ParamError("config line " + std::to_string(lineno) + ": empty key");
    if (key == "experiment") {
      c.experiment = value;
    } else if (key == "seed") {
      c.seed = parse_seed(value);
    } else if (key == "out") {
      c.out = value;
    } else if (key == "threads") {
      const long long n = parse_integer(value);
      if (n < 1) throw ParamError("threads must be >= 1");
      c.threads = static_cast<unsigned>(n);
    } else {
      c.params[key] = value;
    }
  }
  return c;
}

inline ConfigFile load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config '" + path + "'");
  return parse_config(f);
}

}  // namespace csched::harness
