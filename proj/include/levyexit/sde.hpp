#pragma once

// Path simulation of dX = -U'(X) dt + eps dL up to the first exit from a domain.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "levyexit/detail/parallel.hpp"
#include "levyexit/domain.hpp"
#include "levyexit/noise.hpp"
#include "levyexit/potential.hpp"
#include "levyexit/rng.hpp"
#include "levyexit/split.hpp"

namespace levyexit {

enum class Scheme { Euler, JumpAdapted };

struct PathParams {
  double eps = 0.1;
  double h = 0.01;
  double t_max = 100.0;
  Scheme scheme = Scheme::JumpAdapted;
  std::optional<SplitSpec> split;
  double x0 = 0.0;
  double sentinel = 1e12;  // |exit_position| is clamped to this

  double large_jump_threshold() const { return split ? split->threshold : std::pow(eps, -0.5); }
};

/// Default base step resolving the relaxation scale of the drift.
inline double default_step(double curvature) { return std::min(0.01, 0.01 / curvature); }

struct ExitRecord {
  std::uint64_t path_id = 0;
  std::uint64_t stream_id = 0;
  double exit_time = 0.0;
  double exit_position = 0.0;
  std::optional<double> pre_jump_position;
  std::uint64_t n_large_jumps = 0;
  bool exited_at_large_jump = false;
  bool censored = false;
  bool clamped = false;
};

struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> driver;  // cumulative driving noise, when recorded

  void push(double t, double x) {
    times.push_back(t);
    values.push_back(x);
  }
};

/// One step of the noiseless flow: classical RK4, handing stiff steps to the
/// closed-form flow (or the adaptive integrator when none exists).
template <Potential P>
double drift_step(const P& p, double x, double dt) {
  if (std::abs(p.d2u(x)) * dt > 0.05) {
    return p.has_exact_flow() ? p.exact_flow(x, dt) : flow(p, x, dt);
  }
  const double k1 = -p.du(x);
  const double k2 = -p.du(x + 0.5 * dt * k1);
  const double k3 = -p.du(x + 0.5 * dt * k2);
  const double k4 = -p.du(x + dt * k3);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {

inline void finish_exit(ExitRecord& rec, double t, double x, const PathParams& pp) {
  rec.exit_time = t;
  if (!std::isfinite(x) || std::abs(x) > pp.sentinel) {
    rec.clamped = true;
    rec.exit_position = std::isnan(x) ? pp.sentinel : std::copysign(pp.sentinel, x);
  } else {
    rec.exit_position = x;
  }
}

inline void check_path_params(const PathParams& pp) {
  if (!(pp.eps > 0.0)) throw std::domain_error("eps must be positive");
  if (!(pp.h > 0.0)) throw std::domain_error("step h must be positive");
  if (!(pp.t_max > 0.0)) throw std::domain_error("t_max must be positive");
}

}  // namespace detail

/// Fixed-grid scheme: X_{k+1} = Phi_h(X_k) + eps (dW + dS) with exact-in-law
/// Gaussian and stable increments. A step whose stable increment exceeds the
/// large-jump threshold counts as a large jump.
template <Potential P>
ExitRecord simulate_exit_euler(const P& p, const ExitDomain& dom, const StableNoiseSpec& noise,
                               const PathParams& pp, RngStream& rng, PathSample* trace = nullptr) {
  detail::check_path_params(pp);
  ExitRecord rec;
  rec.stream_id = rng.stream_id();
  double x = pp.x0;
  if (trace) trace->push(0.0, x);
  if (!dom.contains(x)) {
    detail::finish_exit(rec, 0.0, x, pp);
    return rec;
  }
  const double h = pp.h;
  const double gauss_sd = std::sqrt(noise.d * h);
  const std::optional<StableIncrementSampler> stable =
      noise.stable_enabled ? std::optional(StableIncrementSampler(noise.alpha, h)) : std::nullopt;
  const double threshold = pp.large_jump_threshold();
  const auto n_steps = static_cast<std::uint64_t>(std::ceil(pp.t_max / h - 1e-9));

  for (std::uint64_t k = 0; k < n_steps; ++k) {
    const double ds = stable ? (*stable)(rng) : 0.0;
    const double dw = gauss_sd > 0.0 ? gauss_sd * rng.normal() : 0.0;
    const double next = drift_step(p, x, h) + pp.eps * (dw + ds);
    const bool large = std::abs(ds) > threshold;
    if (large) ++rec.n_large_jumps;
    const double t = std::min(static_cast<double>(k + 1) * h, pp.t_max);
    if (trace) trace->push(t, next);
    if (!dom.contains(next)) {
      rec.exited_at_large_jump = large;
      if (large) rec.pre_jump_position = x;
      detail::finish_exit(rec, t, next, pp);
      return rec;
    }
    x = next;
  }
  rec.censored = true;
  rec.exit_time = pp.t_max;
  rec.exit_position = x;
  return rec;
}

/// Jump-adapted scheme: the large jumps of eta^eps arrive at exact Poisson
/// instants; in between, the drift and eps*xi^eps are stepped on a grid of
/// width h that restarts at every arrival.
template <Potential P>
ExitRecord simulate_exit_jump_adapted(const P& p, const ExitDomain& dom, const StableNoiseSpec& noise,
                                      const PathParams& pp, RngStream& rng, PathSample* trace = nullptr) {
  detail::check_path_params(pp);
  if (!pp.split) throw std::invalid_argument("jump-adapted scheme needs a SplitSpec");
  SplitSpec split = *pp.split;
  if (noise.stable_enabled && split.alpha != noise.alpha) {
    throw std::invalid_argument("SplitSpec alpha differs from the noise alpha");
  }
  if (!noise.stable_enabled) {
    split.stable_enabled = false;
    split.beta = 0.0;
  }

  ExitRecord rec;
  rec.stream_id = rng.stream_id();
  double x = pp.x0;
  if (trace) trace->push(0.0, x);
  if (!dom.contains(x)) {
    detail::finish_exit(rec, 0.0, x, pp);
    return rec;
  }
  const SmallJumpSampler small(split, noise.d, pp.h);
  const bool diffusive = small.diffusive_rate() > 0.0 || small.mid_range_rate() > 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  double next_arrival = split.beta > 0.0 ? rng.exponential() / split.beta : inf;
  double t = 0.0;

  while (t < pp.t_max) {
    const double step_end = std::min({t + pp.h, next_arrival, pp.t_max});
    const double dt = step_end - t;
    x = drift_step(p, x, dt) + (diffusive ? pp.eps * small.xi(dt, rng) : 0.0);
    t = step_end;
    if (trace) trace->push(t, x);
    if (!dom.contains(x)) {
      detail::finish_exit(rec, t, x, pp);
      return rec;
    }
    if (step_end == next_arrival) {
      const double before = x;
      x += pp.eps * sample_large_jump(split, rng).w;
      ++rec.n_large_jumps;
      if (trace) trace->push(t, x);
      if (!dom.contains(x)) {
        rec.exited_at_large_jump = true;
        rec.pre_jump_position = before;
        detail::finish_exit(rec, t, x, pp);
        return rec;
      }
      next_arrival = t + rng.exponential() / split.beta;
    }
  }
  rec.censored = true;
  rec.exit_time = pp.t_max;
  rec.exit_position = x;
  return rec;
}

template <Potential P>
ExitRecord simulate_exit(const P& p, const ExitDomain& dom, const StableNoiseSpec& noise, const PathParams& pp,
                         RngStream& rng, PathSample* trace = nullptr) {
  return pp.scheme == Scheme::Euler ? simulate_exit_euler(p, dom, noise, pp, rng, trace)
                                    : simulate_exit_jump_adapted(p, dom, noise, pp, rng, trace);
}

/// First-order term Z of the small-noise expansion around Y_t(x):
/// dZ = -U''(Y_t(x)) Z dt + d xi^eps, Z_0 = 0. `driver` holds xi^eps.
template <Potential P>
PathSample simulate_first_order_z(const P& p, double x, const SplitSpec& split, double d, double h, double t_end,
                                  RngStream& rng) {
  if (!(t_end > 0.0)) throw std::domain_error("t_end must be positive");
  const SmallJumpSampler small(split, d, h);
  PathSample path;
  path.push(0.0, 0.0);
  path.driver.push_back(0.0);
  double y = x;
  double z = 0.0;
  double xi = 0.0;
  double t = 0.0;
  while (t < t_end) {
    const double dt = std::min(h, t_end - t);
    const double dxi = small.xi(dt, rng);
    z += -p.d2u(y) * z * dt + dxi;
    xi += dxi;
    y = drift_step(p, y, dt);
    t = (t_end - t <= h) ? t_end : t + dt;
    path.push(t, z);
    path.driver.push_back(xi);
  }
  return path;
}

struct DeviationEstimate {
  double probability = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t n = 0;
  double tube_radius = 0.0;
};

/// Wilson score interval at 95%.
inline DeviationEstimate wilson_estimate(std::uint64_t hits, std::uint64_t n) {
  DeviationEstimate e;
  e.hits = hits;
  e.n = n;
  if (n == 0) return e;
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (ph + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / denom;
  e.probability = ph;
  e.ci_low = hits == 0 ? 0.0 : std::max(0.0, centre - half);
  e.ci_high = hits == n ? 1.0 : std::min(1.0, centre + half);
  return e;
}

/// Monte Carlo estimate of P(sup_{t <= T} |x^eps_t - Y_t(x)| >= c eps^gamma),
/// T ~ Exp(beta_eps) independent, x^eps driven by the small jumps eps*xi^eps only.
/// Path i uses stream (seed, first_stream + i).
template <Potential P>
DeviationEstimate tube_deviation_prob(const P& p, double x, const SplitSpec& split, double d, double c,
                                      double gamma, double h, std::uint64_t n_paths, std::uint64_t seed,
                                      std::uint64_t first_stream = 0, unsigned workers = 1) {
  if (!(c > 0.0)) throw std::domain_error("tube constant c must be positive");
  const double radius = c * std::pow(split.eps, gamma);
  const SmallJumpSampler small(split, d, h);
  const bool silent = small.diffusive_rate() == 0.0 && small.mid_range_rate() == 0.0;
  const double beta = split.beta > 0.0 ? split.beta : intensity_beta(split.alpha, split.eps, split.rho);

  std::vector<unsigned char> hit(n_paths, 0);
  if (!silent) {
    detail::parallel_for(n_paths, workers, [&](std::size_t i) {
      RngStream rng(seed, first_stream + i);
      const double horizon = rng.exponential() / beta;
      double xe = x;
      double y = x;
      double t = 0.0;
      while (t < horizon) {
        const double dt = std::min(h, horizon - t);
        xe = drift_step(p, xe, dt) + split.eps * small.xi(dt, rng);
        y = drift_step(p, y, dt);
        t += dt;
        if (std::abs(xe - y) >= radius) {
          hit[i] = 1;
          return;
        }
      }
    });
  }
  std::uint64_t hits = 0;
  for (auto v : hit) hits += v;
  auto est = wilson_estimate(hits, n_paths);
  est.tube_radius = radius;
  return est;
}

}  // namespace levyexit
