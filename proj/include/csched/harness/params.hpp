#pragma once

// Parameter values for experiment sweeps.
//
//   5                 scalar
//   1,2,4             list
//   1:1024            integer grid, both ends inclusive
//   0:1:5             5 evenly spaced points
//   1e-3:1e6:10:log   10 log-spaced points

#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace csched::harness {

/// Malformed arguments, parameter values or ranges (CLI exit code 2).
class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

inline double parse_real(std::string_view text) {
  const auto s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParamError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

inline long long parse_integer(std::string_view text) {
  const auto s = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParamError("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<double> parse_grid(std::string_view text) {
  if (trim(text).empty()) throw ParamError("empty parameter value");
  if (text.find(':') == std::string_view::npos) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_real(item));
    return out;
  }

  const auto parts = split(text, ':');
  if (parts.size() > 4) throw ParamError("range has too many fields: '" + std::string(text) + "'");

  if (parts.size() == 2) {
    const long long lo = parse_integer(parts[0]);
    const long long hi = parse_integer(parts[1]);
    if (lo > hi) throw ParamError("empty range: '" + std::string(text) + "'");
    if (hi - lo >= 100'000'000) throw ParamError("range too large: '" + std::string(text) + "'");
    std::vector<double> out;
    for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<double>(v));
    return out;
  }

  const double lo = parse_real(parts[0]);
  const double hi = parse_real(parts[1]);
  const long long steps = parse_integer(parts[2]);
  bool log_spacing = false;
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      log_spacing = true;
    } else if (parts[3] != "lin") {
      throw ParamError("spacing must be 'lin' or 'log', got '" + parts[3] + "'");
    }
  }
  if (steps < 1 || steps > 100'000'000) throw ParamError("steps must be >= 1");
  if (lo > hi) throw ParamError("empty range: '" + std::string(text) + "'");
  if (log_spacing && !(lo > 0.0)) throw ParamError("log range needs positive bounds");

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (long long s = 0; s < steps; ++s) {
    if (s == steps - 1 && steps > 1) {
      out.push_back(hi);
      break;
    }
    const double f = steps == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(steps - 1);
    out.push_back(log_spacing ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
  }
  return out;
}

/// Resolved parameter text for one run, keyed by name.
class Params {
 public:
  Params() = default;
  explicit Params(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  const std::string& raw(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) throw ParamError("missing parameter '" + name + "'");
    return it->second;
  }
  std::vector<double> grid(const std::string& name) const { return parse_grid(raw(name)); }
  double scalar(const std::string& name) const {
    const auto g = grid(name);
    if (g.size() != 1) throw ParamError("parameter '" + name + "' must be a single value");
    return g.front();
  }
  long long integer(const std::string& name) const { return parse_integer(raw(name)); }
  std::vector<std::string> tokens(const std::string& name) const { return split(raw(name), ','); }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace csched::harness
