#pragma once

// Monte Carlo exit-time experiments: configuration, path fan-out, sweeps over eps.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyexit/detail/parallel.hpp"
#include "levyexit/domain.hpp"
#include "levyexit/noise.hpp"
#include "levyexit/potential.hpp"
#include "levyexit/sde.hpp"
#include "levyexit/split.hpp"
#include "levyexit/stats.hpp"
#include "levyexit/theory.hpp"

namespace levyexit {

struct PotentialChoice {
  std::string name = "quadratic";  // quadratic | harmonic_quartic
  double m = 1.0;
  double kappa = 1.0;

  template <class F>
  decltype(auto) visit(F&& f) const {
    if (name == "quadratic") return f(Quadratic{m});
    if (name == "harmonic_quartic") return f(HarmonicQuartic{m, kappa});
    throw std::invalid_argument("unknown potential '" + name + "'");
  }
};

struct ExperimentConfig {
  PotentialChoice potential;
  ExitDomain domain = ExitDomain::bounded(1.0, 1.0);
  double alpha = 1.0;
  double d = 0.0;
  bool stable_enabled = true;
  std::vector<double> eps;
  double rho = 0.5;
  std::uint64_t n_paths = 0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::JumpAdapted;
  double t_max_multiplier = 20.0;
  std::optional<double> h;
  double x0 = 0.0;
  unsigned workers = 0;  // 0: all available cores
  std::optional<double> gamma;
  double deviation_c = 1.0;
  std::optional<std::uint64_t> deviation_paths;

  double gamma_value() const { return gamma ? *gamma : gamma_default(alpha); }
  double step() const { return h ? *h : default_step(potential.m); }
  unsigned worker_count() const { return workers > 0 ? workers : detail::default_workers(); }
};

/// Every violation of the configuration, empty when valid.
inline std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) {
    errors.push_back("alpha must lie in the open interval (0,2), got " + std::to_string(cfg.alpha));
  } else if (cfg.alpha < kAlphaMin || cfg.alpha > kAlphaMax) {
    errors.push_back("alpha must lie in [1e-3, 2-1e-3] (numerical range of (0,2))");
  }
  if (!(cfg.d >= 0.0)) errors.push_back("d must be >= 0");
  if (cfg.d == 0.0 && !cfg.stable_enabled) errors.push_back("noise is empty: need d > 0 or stable = true");
  if (cfg.eps.empty()) errors.push_back("eps list must not be empty");
  for (double e : cfg.eps)
    if (!(e > 0.0)) errors.push_back("every eps must be positive, got " + std::to_string(e));
  if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) errors.push_back("rho must lie in (0,1)");
  if (!(cfg.t_max_multiplier > 0.0)) errors.push_back("t_max_multiplier must be positive");
  if (cfg.h && !(*cfg.h > 0.0)) errors.push_back("h must be positive");
  if (!(cfg.deviation_c > 0.0)) errors.push_back("deviation_c must be positive");
  if (cfg.gamma && !(*cfg.gamma > 0.0)) errors.push_back("gamma must be positive");
  if (!cfg.domain.contains(cfg.x0)) errors.push_back("x0 must lie inside the domain");
  if (cfg.potential.name != "quadratic" && cfg.potential.name != "harmonic_quartic") {
    errors.push_back("potential must be quadratic or harmonic_quartic, got '" + cfg.potential.name + "'");
  } else {
    const auto report = cfg.potential.visit([&](const auto& p) { return validate_potential(p, cfg.domain); });
    for (const auto& c : report.checks) {
      if (!c.passed) errors.push_back("potential check failed: " + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
    }
  }
  return errors;
}

inline void require_valid(const ExperimentConfig& cfg) {
  const auto errors = validate_config(cfg);
  if (errors.empty()) return;
  std::string msg = "invalid experiment configuration:";
  for (const auto& e : errors) msg += "\n  - " + e;
  throw std::invalid_argument(msg);
}

inline StableNoiseSpec noise_of(const ExperimentConfig& cfg) {
  return cfg.stable_enabled ? StableNoiseSpec(cfg.alpha, cfg.d, true) : StableNoiseSpec(cfg.alpha, cfg.d, false);
}

/// Closed-form prediction for one eps: the stable law, or Kramers' law with
/// effective intensity eps*sqrt(d) when the stable part is switched off.
inline TheoryPrediction predict(const ExperimentConfig& cfg, double eps) {
  if (cfg.stable_enabled) return stable_exit_law(cfg.alpha, eps, cfg.domain, cfg.gamma_value());
  return cfg.potential.visit(
      [&](const auto& p) { return kramers_exit_law(eps * std::sqrt(cfg.d), p, cfg.domain); });
}

inline std::uint64_t stream_for(std::size_t eps_index, std::uint64_t path_id) {
  return (static_cast<std::uint64_t>(eps_index) << 40) + path_id;
}

struct ExperimentResult {
  double eps = 0.0;
  std::size_t eps_index = 0;
  PathParams params;
  std::vector<ExitRecord> records;
  StatsSummary summary;
  TheoryPrediction prediction;
  std::vector<std::string> warnings;
};

inline PathParams path_params(const ExperimentConfig& cfg, double eps, const TheoryPrediction& pred) {
  PathParams pp;
  pp.eps = eps;
  pp.h = cfg.step();
  pp.t_max = cfg.t_max_multiplier * pred.mean;
  pp.scheme = cfg.scheme;
  pp.split = SplitSpec(cfg.alpha, eps, cfg.rho, cfg.stable_enabled);
  pp.x0 = cfg.x0;
  return pp;
}

/// Runs cfg.n_paths independent exits at eps = cfg.eps[eps_index]. Path i uses
/// RNG stream stream_for(eps_index, i), so the records do not depend on the
/// worker count.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t eps_index = 0,
                                       std::optional<unsigned> workers = std::nullopt) {
  require_valid(cfg);
  if (eps_index >= cfg.eps.size()) throw std::out_of_range("eps index out of range");
  ExperimentResult out;
  out.eps = cfg.eps[eps_index];
  out.eps_index = eps_index;
  out.prediction = predict(cfg, out.eps);
  out.params = path_params(cfg, out.eps, out.prediction);
  if (cfg.stable_enabled && out.params.split && out.params.h * out.params.split->beta > 0.1) {
    out.warnings.push_back("step h is not small against the mean large-jump gap 1/beta");
  }
  if (cfg.t_max_multiplier < 10.0) out.warnings.push_back("t_max below 10x the predicted mean: censoring bias");

  const StableNoiseSpec noise = noise_of(cfg);
  out.records.resize(cfg.n_paths);
  cfg.potential.visit([&](const auto& p) {
    detail::parallel_for(cfg.n_paths, workers ? *workers : cfg.worker_count(), [&](std::size_t i) {
      RngStream rng(cfg.seed, stream_for(eps_index, i));
      ExitRecord rec = simulate_exit(p, cfg.domain, noise, out.params, rng);
      rec.path_id = i;
      out.records[i] = rec;
    });
    return 0;
  });
  out.summary = summarize(out.records);
  return out;
}

struct SweepRow {
  double eps = 0.0;
  StatsSummary summary;
  TheoryPrediction prediction;
  double ratio = std::numeric_limits<double>::quiet_NaN();  // empirical / theory mean
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool gaussian_mode = false;
  // Stable mode: slope of log(mean) against log(eps), expected -alpha.
  LinearFit loglog;
  // Gaussian mode: slope of ln(mean) against eps^{-2}, expected 2 U(a) / d.
  LinearFit kramers;
  double expected_slope = std::numeric_limits<double>::quiet_NaN();
  bool empirical = false;
};

inline SweepResult sweep(const ExperimentConfig& cfg, std::optional<unsigned> workers = std::nullopt) {
  require_valid(cfg);
  if (cfg.eps.size() < 2) throw std::invalid_argument("sweep needs at least two eps values");
  SweepResult res;
  res.gaussian_mode = !cfg.stable_enabled;
  res.empirical = cfg.n_paths > 0;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < cfg.eps.size(); ++k) {
    SweepRow row;
    row.eps = cfg.eps[k];
    if (cfg.n_paths > 0) {
      auto r = run_experiment(cfg, k, workers);
      row.summary = r.summary;
      row.prediction = r.prediction;
      row.ratio = r.summary.mean / r.prediction.mean;
    } else {
      row.prediction = predict(cfg, row.eps);
    }
    const double mean = res.empirical ? row.summary.mean : row.prediction.mean;
    if (res.gaussian_mode) {
      x.push_back(1.0 / (row.eps * row.eps));
    } else {
      x.push_back(std::log(row.eps));
    }
    y.push_back(std::log(mean));
    res.rows.push_back(row);
  }
  bool finite = true;
  for (double v : y) finite = finite && std::isfinite(v);
  if (finite) {
    if (res.gaussian_mode) {
      res.kramers = linear_fit(x, y);
    } else {
      res.loglog = linear_fit(x, y);
    }
  }
  if (res.gaussian_mode) {
    res.expected_slope = cfg.potential.visit([&](const auto& p) {
      const double barrier = (!cfg.domain.is_half_line() && p.u(-cfg.domain.b) < p.u(cfg.domain.a))
                                 ? -cfg.domain.b
                                 : cfg.domain.a;
      return 2.0 * p.u(barrier) / cfg.d;
    });
  } else {
    res.expected_slope = -cfg.alpha;
  }
  return res;
}

}  // namespace levyexit
