#pragma once

// Experiment commands behind the levyexit CLI. Each command writes its output
// files plus a manifest.json into an output directory and returns a process
// exit status.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "levyexit/config.hpp"
#include "levyexit/experiment.hpp"
#include "levyexit/noise.hpp"
#include "levyexit/split.hpp"

namespace levyexit {

inline constexpr const char* kArtifactVersion = "0.1.0";

namespace io {

using nlohmann::json;

/// 17 significant digits: exact round trip for binary64. NaN -> empty field.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline const char* kRecordsHeader =
    "path_id,stream_id,exit_time,exit_position,pre_jump_position,n_large_jumps,exited_at_large_jump,censored\n";

inline std::string records_csv(const std::vector<ExitRecord>& records) {
  std::string out = kRecordsHeader;
  for (const auto& r : records) {
    out += std::to_string(r.path_id) + ',' + std::to_string(r.stream_id) + ',' + format_double(r.exit_time) + ',' +
           format_double(r.exit_position) + ',' + (r.pre_jump_position ? format_double(*r.pre_jump_position) : "") +
           ',' + std::to_string(r.n_large_jumps) + ',' + (r.exited_at_large_jump ? "1" : "0") + ',' +
           (r.censored ? "1" : "0") + '\n';
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline json config_json(const ExperimentConfig& cfg) {
  json j;
  j["potential"] = {{"name", cfg.potential.name}, {"M", cfg.potential.m}};
  if (cfg.potential.name == "harmonic_quartic") j["potential"]["kappa"] = cfg.potential.kappa;
  j["domain"] = cfg.domain.is_half_line() ? json{{"kind", "halfline"}, {"a", cfg.domain.a}}
                                          : json{{"kind", "bounded"}, {"a", cfg.domain.a}, {"b", cfg.domain.b}};
  j["alpha"] = cfg.alpha;
  j["d"] = cfg.d;
  j["stable"] = cfg.stable_enabled;
  j["eps"] = cfg.eps;
  j["rho"] = cfg.rho;
  j["n_paths"] = cfg.n_paths;
  j["seed"] = cfg.seed;
  j["scheme"] = cfg.scheme == Scheme::Euler ? "euler" : "jump_adapted";
  j["t_max_multiplier"] = cfg.t_max_multiplier;
  j["h"] = cfg.step();
  j["x0"] = cfg.x0;
  j["gamma"] = cfg.gamma_value();
  j["deviation_c"] = cfg.deviation_c;
  j["deviation_paths"] = cfg.deviation_paths ? *cfg.deviation_paths : cfg.n_paths;
  return j;
}

inline json prediction_json(const TheoryPrediction& p, double eps) {
  json j{{"eps", eps}, {"model", p.model}, {"rate", p.rate}, {"mean", p.mean}};
  if (p.model == "stable") {
    j["theta"] = p.theta;
    j["delta"] = p.delta;
  }
  return j;
}

inline json summary_json(const StatsSummary& s) {
  return json{{"n", s.n},
              {"n_uncensored", s.n_uncensored},
              {"censored_count", s.censored_count},
              {"clamped_count", s.clamped_count},
              {"sufficient_data", s.sufficient},
              {"mean", number_or_null(s.mean)},
              {"std_error", number_or_null(s.std_error)},
              {"ci95", {number_or_null(s.ci_low), number_or_null(s.ci_high)}},
              {"ks_statistic", number_or_null(s.ks_statistic)},
              {"big_jump_exit_fraction", number_or_null(s.big_jump_exit_fraction)}};
}

}  // namespace io

/// What a command needs to run: parsed config plus the exact text it came
/// from (echoed into the manifest for re-runs).
struct RunRequest {
  std::string command;
  std::string config_text;
  ExperimentConfig config;
  std::filesystem::path out_dir = ".";
  unsigned workers = 0;  // 0: config value / all cores
  std::optional<std::uint64_t> seed_override;

  unsigned effective_workers() const { return workers > 0 ? workers : config.worker_count(); }
};

inline RunRequest make_request(std::string command, std::string config_text, std::filesystem::path out_dir,
                               unsigned workers = 0, std::optional<std::uint64_t> seed = std::nullopt) {
  RunRequest r;
  r.command = std::move(command);
  r.config_text = std::move(config_text);
  r.config = parse_config_text(r.config_text);
  if (seed) r.config.seed = *seed;
  r.seed_override = seed;
  r.out_dir = std::move(out_dir);
  r.workers = workers;
  return r;
}

namespace detail {

inline void write_manifest(const RunRequest& req, const std::vector<std::string>& outputs, double seconds) {
  io::json m;
  m["command"] = req.command;
  m["artifact_version"] = kArtifactVersion;
  m["seed"] = req.config.seed;
  m["config_text"] = req.config_text;
  m["config"] = io::config_json(req.config);
  m["outputs"] = outputs;
  m["wall_clock_seconds"] = seconds;
  m["workers"] = req.effective_workers();
  io::write_file(req.out_dir / "manifest.json", m.dump(2) + "\n");
}

template <class Body>
int timed(const RunRequest& req, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> outputs;
  const int status = body(outputs);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(req, outputs, seconds);
  return status;
}

}  // namespace detail

inline io::json theory_json(const ExperimentConfig& cfg) {
  io::json j;
  j["config"] = io::config_json(cfg);
  j["predictions"] = io::json::array();
  for (double eps : cfg.eps) j["predictions"].push_back(io::prediction_json(predict(cfg, eps), eps));
  return j;
}

inline int cmd_theory(const RunRequest& req) {
  return detail::timed(req, [&](std::vector<std::string>& outputs) {
    io::write_file(req.out_dir / "theory.json", theory_json(req.config).dump(2) + "\n");
    outputs.push_back("theory.json");
    return 0;
  });
}

inline int cmd_simulate(const RunRequest& req) {
  return detail::timed(req, [&](std::vector<std::string>& outputs) {
    const auto& cfg = req.config;
    const bool single = cfg.eps.size() == 1;
    for (std::size_t k = 0; k < cfg.eps.size(); ++k) {
      const auto result = run_experiment(cfg, k, req.effective_workers());
      const std::string prefix = single ? "" : "eps_" + std::to_string(k) + "/";
      io::write_file(req.out_dir / (prefix + "records.csv"), io::records_csv(result.records));
      io::json s;
      s["config"] = io::config_json(cfg);
      s["eps"] = result.eps;
      s["t_max"] = result.params.t_max;
      s["empirical"] = io::summary_json(result.summary);
      s["theory"] = io::prediction_json(result.prediction, result.eps);
      s["mean_ratio"] = io::number_or_null(result.summary.mean / result.prediction.mean);
      s["warnings"] = result.warnings;
      io::write_file(req.out_dir / (prefix + "summary.json"), s.dump(2) + "\n");
      outputs.push_back(prefix + "records.csv");
      outputs.push_back(prefix + "summary.json");
    }
    return 0;
  });
}

inline std::string sweep_csv(const SweepResult& res) {
  std::string out =
      "eps,n,n_uncensored,censored,mean,ci_low,ci_high,std_error,ks_statistic,big_jump_exit_fraction,"
      "theory_model,theory_mean,ratio\n";
  using io::format_double;
  for (const auto& r : res.rows) {
    out += format_double(r.eps) + ',' + std::to_string(r.summary.n) + ',' + std::to_string(r.summary.n_uncensored) +
           ',' + std::to_string(r.summary.censored_count) + ',' + format_double(r.summary.mean) + ',' +
           format_double(r.summary.ci_low) + ',' + format_double(r.summary.ci_high) + ',' +
           format_double(r.summary.std_error) + ',' + format_double(r.summary.ks_statistic) + ',' +
           format_double(r.summary.big_jump_exit_fraction) + ',' + r.prediction.model + ',' +
           format_double(r.prediction.mean) + ',' + format_double(r.ratio) + '\n';
  }
  return out;
}

inline int cmd_sweep(const RunRequest& req) {
  return detail::timed(req, [&](std::vector<std::string>& outputs) {
    const auto res = sweep(req.config, req.effective_workers());
    io::write_file(req.out_dir / "sweep.csv", sweep_csv(res));
    io::json s;
    s["config"] = io::config_json(req.config);
    s["mode"] = res.gaussian_mode ? "gaussian" : "stable";
    s["source"] = res.empirical ? "monte_carlo" : "theory";
    const auto& fit = res.gaussian_mode ? res.kramers : res.loglog;
    s["fit"] = {{"x", res.gaussian_mode ? "eps^-2" : "ln(eps)"},
                {"y", "ln(mean)"},
                {"slope", io::number_or_null(fit.slope)},
                {"intercept", io::number_or_null(fit.intercept)},
                {"slope_se", io::number_or_null(fit.slope_se)},
                {"expected_slope", io::number_or_null(res.expected_slope)}};
    io::write_file(req.out_dir / "sweep_summary.json", s.dump(2) + "\n");
    outputs.push_back("sweep.csv");
    outputs.push_back("sweep_summary.json");
    return 0;
  });
}

struct DeviationRow {
  double eps = 0.0;
  DeviationEstimate estimate;
};

inline std::vector<DeviationRow> deviation_grid(const ExperimentConfig& cfg, unsigned workers) {
  require_valid(cfg);
  std::vector<DeviationRow> rows;
  const std::uint64_t n = cfg.deviation_paths ? *cfg.deviation_paths : cfg.n_paths;
  for (std::size_t k = 0; k < cfg.eps.size(); ++k) {
    const SplitSpec split(cfg.alpha, cfg.eps[k], cfg.rho, cfg.stable_enabled);
    const auto est = cfg.potential.visit([&](const auto& p) {
      return tube_deviation_prob(p, cfg.x0, split, cfg.d, cfg.deviation_c, cfg.gamma_value(), cfg.step(), n,
                                 cfg.seed, stream_for(k, 0), workers);
    });
    rows.push_back({cfg.eps[k], est});
  }
  return rows;
}

inline int cmd_deviation(const RunRequest& req) {
  return detail::timed(req, [&](std::vector<std::string>& outputs) {
    const auto rows = deviation_grid(req.config, req.effective_workers());
    std::string csv = "eps,tube_radius,n,hits,probability,ci_low,ci_high\n";
    std::vector<double> eps;
    std::vector<DeviationEstimate> est;
    for (const auto& r : rows) {
      csv += io::format_double(r.eps) + ',' + io::format_double(r.estimate.tube_radius) + ',' +
             std::to_string(r.estimate.n) + ',' + std::to_string(r.estimate.hits) + ',' +
             io::format_double(r.estimate.probability) + ',' + io::format_double(r.estimate.ci_low) + ',' +
             io::format_double(r.estimate.ci_high) + '\n';
      eps.push_back(r.eps);
      est.push_back(r.estimate);
    }
    io::write_file(req.out_dir / "deviation.csv", csv);
    io::json s;
    s["config"] = io::config_json(req.config);
    const double alpha = req.config.alpha;
    const double gamma = req.config.gamma_value();
    s["bound_exponent"] = (alpha + gamma) / 2.0;
    std::size_t usable = 0;
    for (const auto& e : est) usable += e.n > 0 ? 1 : 0;
    if (usable >= 2) {
      s["fitted_exponent"] = deviation_power_fit(eps, est).slope;
      s["fit_note"] = "points without hits enter at their Wilson upper bound";
    } else {
      s["fitted_exponent"] = nullptr;
    }
    io::write_file(req.out_dir / "deviation_summary.json", s.dump(2) + "\n");
    outputs.push_back("deviation.csv");
    outputs.push_back("deviation_summary.json");
    return 0;
  });
}

/// Potential, noise and split property checks for the configuration.
inline io::json validation_report(const ExperimentConfig& cfg) {
  io::json checks = io::json::array();
  auto add = [&checks](const std::string& name, bool ok, const std::string& detail = {}) {
    checks.push_back({{"name", name}, {"passed", ok}, {"detail", detail}});
  };
  const auto pot = cfg.potential.visit([&](const auto& p) { return validate_potential(p, cfg.domain); });
  for (const auto& c : pot.checks) add("potential: " + c.name, c.passed, c.detail);

  if (cfg.stable_enabled) {
    const double closed = stable_scale_constant(cfg.alpha);
    const double quad = stable_scale_constant_quadrature(cfg.alpha);
    const double rel = std::abs(closed - quad) / closed;
    add("noise: scale constant quadrature matches closed form", rel < 1e-9,
        "relative error " + io::format_double(rel));
    std::vector<double> grid;
    for (int k = 1; k <= 200; ++k) grid.push_back(0.1 * k);
    for (double eps : cfg.eps) {
      const SplitSpec split(cfg.alpha, eps, cfg.rho);
      const auto rep = split_characteristic_check(split, cfg.d, grid);
      add("split: psi_xi + psi_eta = psi_L at eps=" + io::format_double(eps), rep.passed,
          "max abs error " + io::format_double(rep.max_error));
      add("split: beta * threshold^alpha = 2/alpha at eps=" + io::format_double(eps),
          std::abs(split.beta * std::pow(split.threshold, cfg.alpha) - 2.0 / cfg.alpha) < 1e-12 * (2.0 / cfg.alpha));
    }
    const auto feas = rho_gamma_feasible(cfg.alpha, cfg.rho, cfg.gamma_value());
    std::string why;
    for (const auto& v : feas.violations) why += (why.empty() ? "violates " : ", ") + v;
    add("split: (rho, gamma) feasible", feas.feasible, why);
  }
  return checks;
}

inline int cmd_validate(const RunRequest& req) {
  return detail::timed(req, [&](std::vector<std::string>& outputs) {
    const auto checks = validation_report(req.config);
    bool ok = true;
    for (const auto& c : checks) ok = ok && c["passed"].get<bool>();
    io::write_file(req.out_dir / "validate.json", io::json{{"passed", ok}, {"checks", checks}}.dump(2) + "\n");
    outputs.push_back("validate.json");
    return ok ? 0 : 1;
  });
}

inline int dispatch(const RunRequest& req) {
  if (req.command == "theory") return cmd_theory(req);
  if (req.command == "simulate") return cmd_simulate(req);
  if (req.command == "sweep") return cmd_sweep(req);
  if (req.command == "deviation") return cmd_deviation(req);
  if (req.command == "validate") return cmd_validate(req);
  throw std::invalid_argument("unknown command '" + req.command + "'");
}

/// Re-runs the command recorded in a manifest into out_dir.
inline int rerun_from_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir,
                               unsigned workers = 0) {
  const auto m = io::json::parse(io::read_file(manifest));
  auto req = make_request(m.at("command").get<std::string>(), m.at("config_text").get<std::string>(), out_dir,
                          workers, m.at("seed").get<std::uint64_t>());
  return dispatch(req);
}

}  // namespace levyexit
