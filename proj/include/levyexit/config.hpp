#pragma once

// Flat key = value experiment configuration.
//
//   # comment
//   alpha     = 1.0
//   potential = quadratic          # quadratic | harmonic_quartic
//   eps       = 0.1, 0.05, 0.02    # brackets optional: [0.1, 0.05]
//
// Parsing is strict: unknown or repeated keys, malformed values and missing
// required keys are all reported together in one ConfigError.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levyexit/experiment.hpp"

namespace levyexit {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& e : v) s += "\n  - " + e;
    return s;
  }
  std::vector<std::string> violations_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  return std::nullopt;
}

inline std::optional<std::vector<double>> parse_real_list(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') return std::nullopt;
    s = trim(s.substr(1, s.size() - 2));
  }
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto item = parse_real(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!item) return std::nullopt;
    out.push_back(*item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config_text(std::string_view text) {
  static const std::vector<std::string> kKnown = {
      "alpha", "d",  "stable", "potential", "M",         "kappa",  "domain",           "a",
      "b",     "eps", "rho",   "n_paths",   "seed",      "scheme", "t_max_multiplier", "h",
      "x0",    "workers", "gamma", "deviation_c", "deviation_paths"};
  std::vector<std::string> errors;
  std::map<std::string, std::string> kv;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      errors.push_back("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      continue;
    }
    if (!kv.emplace(key, value).second) {
      errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  auto present = [&kv](const std::string& k) { return kv.count(k) > 0; };
  auto real = [&](const std::string& k, double& dst) {
    if (!present(k)) return;
    if (auto v = detail::parse_real(kv[k])) dst = *v;
    else errors.push_back(k + ": expected a real number, got '" + kv[k] + "'");
  };
  auto uint = [&](const std::string& k, std::uint64_t& dst) {
    if (!present(k)) return;
    if (auto v = detail::parse_uint(kv[k])) dst = *v;
    else errors.push_back(k + ": expected a non-negative integer, got '" + kv[k] + "'");
  };
  auto required = [&](const std::string& k) {
    if (!present(k)) errors.push_back("missing required key '" + k + "'");
  };

  for (const char* k : {"alpha", "potential", "domain", "a", "eps", "n_paths", "seed"}) required(k);

  real("alpha", cfg.alpha);
  real("d", cfg.d);
  if (present("stable")) {
    if (auto v = detail::parse_bool(kv["stable"])) cfg.stable_enabled = *v;
    else errors.push_back("stable: expected true or false, got '" + kv["stable"] + "'");
  }
  if (present("potential")) cfg.potential.name = kv["potential"];
  real("M", cfg.potential.m);
  real("kappa", cfg.potential.kappa);
  if (present("kappa") && cfg.potential.name != "harmonic_quartic") {
    errors.push_back("kappa only applies to potential = harmonic_quartic");
  }

  double a = 1.0, b = 1.0;
  real("a", a);
  real("b", b);
  if (present("domain")) {
    const std::string& kind = kv["domain"];
    if (kind == "bounded") {
      required("b");
      if (a > 0.0 && b > 0.0) cfg.domain = ExitDomain::bounded(a, b);
      else errors.push_back("domain bounds a and b must be positive");
    } else if (kind == "halfline") {
      if (present("b")) errors.push_back("b must not be given for domain = halfline");
      if (a > 0.0) cfg.domain = ExitDomain::half_line(a);
      else errors.push_back("domain bound a must be positive");
    } else {
      errors.push_back("domain must be bounded or halfline, got '" + kind + "'");
    }
  }

  if (present("eps")) {
    if (auto v = detail::parse_real_list(kv["eps"])) cfg.eps = *v;
    else errors.push_back("eps: expected a comma-separated list of reals, got '" + kv["eps"] + "'");
  }
  real("rho", cfg.rho);
  uint("n_paths", cfg.n_paths);
  uint("seed", cfg.seed);
  if (present("scheme")) {
    const std::string& s = kv["scheme"];
    if (s == "euler") cfg.scheme = Scheme::Euler;
    else if (s == "jump_adapted") cfg.scheme = Scheme::JumpAdapted;
    else errors.push_back("scheme must be euler or jump_adapted, got '" + s + "'");
  }
  real("t_max_multiplier", cfg.t_max_multiplier);
  if (present("h")) {
    double h = 0.0;
    real("h", h);
    cfg.h = h;
  }
  real("x0", cfg.x0);
  if (present("workers")) {
    std::uint64_t w = 0;
    uint("workers", w);
    cfg.workers = static_cast<unsigned>(w);
  }
  if (present("gamma")) {
    double g = 0.0;
    real("gamma", g);
    cfg.gamma = g;
  }
  real("deviation_c", cfg.deviation_c);
  if (present("deviation_paths")) {
    std::uint64_t n = 0;
    uint("deviation_paths", n);
    cfg.deviation_paths = n;
  }

  // Semantic checks only make sense once the syntax is clean for the keys involved.
  for (auto& e : validate_config(cfg)) {
    if (std::find(errors.begin(), errors.end(), e) == errors.end()) errors.push_back(std::move(e));
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace levyexit
