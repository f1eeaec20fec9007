#pragma once

// Decomposition L = xi^eps + eta^eps of the driving noise at threshold eps^{-rho}:
// eta^eps is compound Poisson (jumps beyond the threshold), xi^eps keeps the
// Brownian part and all jumps up to the threshold.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyexit/detail/levy_integrals.hpp"
#include "levyexit/domain.hpp"
#include "levyexit/noise.hpp"
#include "levyexit/rng.hpp"

namespace levyexit {

inline double intensity_beta(double alpha, double eps, double rho) {
  check_alpha(alpha);
  if (!(eps > 0.0)) throw std::domain_error("eps must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("rho must lie in (0,1)");
  return (2.0 / alpha) * std::pow(eps, alpha * rho);
}

struct SplitSpec {
  double alpha = 1.0;
  double eps = 0.1;
  double rho = 0.5;
  double threshold = 0.0;  // eps^{-rho}
  double beta = 0.0;       // (2/alpha) eps^{alpha rho}
  bool stable_enabled = true;

  SplitSpec() = default;
  SplitSpec(double alpha_, double eps_, double rho_ = 0.5, bool stable_enabled_ = true)
      : alpha(alpha_), eps(eps_), rho(rho_), stable_enabled(stable_enabled_) {
    beta = intensity_beta(alpha, eps, rho);
    threshold = std::pow(eps, -rho);
    if (!stable_enabled) beta = 0.0;
  }
};

struct ArrivalSchedule {
  std::vector<double> times;
  double horizon = 0.0;
};

inline ArrivalSchedule sample_arrival_times(const SplitSpec& spec, double horizon, RngStream& rng) {
  if (!(horizon > 0.0)) throw std::domain_error("horizon must be positive");
  ArrivalSchedule schedule{{}, horizon};
  if (spec.beta <= 0.0) return schedule;
  double t = rng.exponential() / spec.beta;
  while (t <= horizon) {
    schedule.times.push_back(t);
    t += rng.exponential() / spec.beta;
  }
  return schedule;
}

struct LargeJump {
  double w = 0.0;
};

/// Jump from uniforms: sign from sign_u < 1/2, magnitude threshold * mag_u^{-1/alpha}.
inline LargeJump large_jump_from_uniforms(const SplitSpec& spec, double sign_u, double mag_u) {
  const double magnitude = spec.threshold * std::pow(mag_u, -1.0 / spec.alpha);
  return {sign_u < 0.5 ? -magnitude : magnitude};
}

inline LargeJump sample_large_jump(const SplitSpec& spec, RngStream& rng) {
  const double sign_u = rng.uniform();
  return large_jump_from_uniforms(spec, sign_u, rng.uniform());
}

/// P(eps W_1 leaves the domain) for a jump W_1 of eta^eps.
inline double big_jump_exit_prob(const SplitSpec& spec, const ExitDomain& dom) {
  if (!(spec.eps * spec.threshold < dom.min_distance())) {
    throw std::domain_error("big_jump_exit_prob: eps * threshold must be below the boundary distance");
  }
  const double scale = 1.0 / (spec.beta * spec.alpha);
  double tail = std::pow(spec.eps / dom.a, spec.alpha);
  if (!dom.is_half_line()) tail += std::pow(spec.eps / dom.b, spec.alpha);
  return scale * tail;
}

/// Var(eps xi^eps_1) = eps^2 d + (2/(2-alpha)) eps^2 threshold^{2-alpha}.
inline double small_jump_variance(const SplitSpec& spec, double d) {
  double var = spec.eps * spec.eps * d;
  if (spec.stable_enabled) {
    var += 2.0 / (2.0 - spec.alpha) * spec.eps * spec.eps * std::pow(spec.threshold, 2.0 - spec.alpha);
  }
  return var;
}

/// Step sampler for xi^eps: jumps below the cutoff are replaced by a Brownian
/// motion of matched variance, jumps in (cutoff, threshold] are simulated as
/// compound Poisson. The symmetric measure needs no compensating drift.
class SmallJumpSampler {
 public:
  SmallJumpSampler(const SplitSpec& spec, double d, double h, double cutoff = -1.0)
      : spec_(spec), d_(d), h_(h) {
    if (!(h > 0.0)) throw std::domain_error("time step h must be positive");
    if (!(d >= 0.0)) throw std::domain_error("Brownian weight d must be >= 0");
    if (spec.stable_enabled) {
      cutoff_ = cutoff > 0.0 ? std::min(cutoff, spec.threshold)
                             : std::min(std::pow(h, 1.0 / spec.alpha), spec.threshold);
      const double a = spec.alpha;
      sub_cutoff_var_ = 2.0 * std::pow(cutoff_, 2.0 - a) / (2.0 - a);
      cutoff_pow_ = std::pow(cutoff_, -a);
      threshold_pow_ = std::pow(spec.threshold, -a);
      mid_rate_ = (2.0 / a) * (cutoff_pow_ - threshold_pow_);
    }
  }

  double cutoff() const { return cutoff_; }
  double mid_range_rate() const { return mid_rate_; }
  /// Diffusive variance per unit time of xi^eps (Brownian + substituted sub-cutoff jumps).
  double diffusive_rate() const { return d_ + sub_cutoff_var_; }

  /// Unscaled increment of xi^eps over dt (dt <= h allowed for partial steps).
  double xi(double dt, RngStream& rng) const {
    double inc = 0.0;
    const double var = diffusive_rate() * dt;
    if (var > 0.0) inc += std::sqrt(var) * rng.normal();
    if (mid_rate_ > 0.0) {
      const auto count = rng.poisson(mid_rate_ * dt);
      for (std::uint64_t k = 0; k < count; ++k) inc += mid_range_jump(rng);
    }
    return inc;
  }
  double xi(RngStream& rng) const { return xi(h_, rng); }

  /// Increment of eps * xi^eps over one base step.
  double operator()(RngStream& rng) const { return spec_.eps * xi(h_, rng); }

 private:
  double mid_range_jump(RngStream& rng) const {
    const double sign_u = rng.uniform();
    const double u = rng.uniform();
    const double y = std::pow(cutoff_pow_ - u * (cutoff_pow_ - threshold_pow_), -1.0 / spec_.alpha);
    return sign_u < 0.5 ? -y : y;
  }

  SplitSpec spec_;
  double d_;
  double h_;
  double cutoff_ = 0.0;
  double sub_cutoff_var_ = 0.0;
  double cutoff_pow_ = 0.0;
  double threshold_pow_ = 0.0;
  double mid_rate_ = 0.0;
};

inline double small_jump_increment(const SplitSpec& spec, double d, double h, RngStream& rng) {
  return SmallJumpSampler(spec, d, h)(rng);
}

struct SplitCheckPoint {
  double lambda;
  double psi_xi;
  double psi_eta;
  double psi_total;
  double error;
};

struct SplitCheckReport {
  bool passed = true;
  double tolerance = 1e-8;
  double max_error = 0.0;
  std::vector<SplitCheckPoint> points;
};

/// Quadrature of the xi and eta exponents against the closed-form exponent of L.
inline SplitCheckReport split_characteristic_check(const SplitSpec& spec, double d,
                                                   const std::vector<double>& lambda_grid,
                                                   double tolerance = 1e-8) {
  SplitCheckReport report;
  report.tolerance = tolerance;
  const double inf = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    SplitCheckPoint pt{lambda, -0.5 * d * lambda * lambda, 0.0, 0.0, 0.0};
    if (spec.stable_enabled) {
      pt.psi_xi += 2.0 * detail::levy_cos_integral(lambda, 0.0, spec.threshold, spec.alpha);
      pt.psi_eta = 2.0 * detail::levy_cos_integral(lambda, spec.threshold, inf, spec.alpha);
    }
    double closed = -0.5 * d * lambda * lambda;
    if (spec.stable_enabled && lambda != 0.0) {
      closed -= stable_scale_constant(spec.alpha) * std::pow(std::abs(lambda), spec.alpha);
    }
    pt.psi_total = pt.psi_xi + pt.psi_eta;
    pt.error = std::abs(pt.psi_total - closed);
    report.max_error = std::max(report.max_error, pt.error);
    if (!(pt.error <= tolerance)) report.passed = false;
    report.points.push_back(pt);
  }
  return report;
}

/// Default tube exponent gamma = (2 - alpha) / 5.
inline double gamma_default(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::domain_error("alpha must lie in (0,2)");
  return (2.0 - alpha) / 5.0;
}

struct FeasibilityResult {
  bool feasible = true;
  std::vector<std::string> violations;
  explicit operator bool() const { return feasible; }
};

/// Admissible (rho, gamma) pairs for the threshold eps^{-rho} and tube width eps^gamma.
inline FeasibilityResult rho_gamma_feasible(double alpha, double rho, double gamma) {
  FeasibilityResult r;
  auto require = [&r](bool ok, std::string what) {
    if (!ok) {
      r.feasible = false;
      r.violations.push_back(std::move(what));
    }
  };
  require(rho > 0.0 && rho < 1.0, "0 < rho < 1");
  require(gamma > 0.0, "gamma > 0");
  require(gamma < (2.0 - alpha) * (1.0 - rho) / 2.0, "gamma < (2-alpha)(1-rho)/2");
  require(gamma > alpha * (1.0 - 2.0 * rho), "gamma > alpha(1-2rho)");
  return r;
}

}  // namespace levyexit
