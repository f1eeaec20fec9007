#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "levyexit/detail/levy_integrals.hpp"
#include "levyexit/rng.hpp"

namespace levyexit {

inline constexpr double kAlphaMin = 1e-3;
inline constexpr double kAlphaMax = 2.0 - 1e-3;

inline void check_alpha(double alpha) {
  if (!(alpha >= kAlphaMin && alpha <= kAlphaMax)) {
    throw std::domain_error("alpha must lie in (0,2) (supported range [1e-3, 2-1e-3]), got " +
                            std::to_string(alpha));
  }
}

/// Driving noise L = sqrt(d) W + S, where S is the symmetric alpha-stable
/// motion with Levy measure dy/|y|^{1+alpha}.
struct StableNoiseSpec {
  double alpha = 1.0;
  double d = 0.0;
  bool stable_enabled = true;

  StableNoiseSpec() = default;
  StableNoiseSpec(double alpha_, double d_, bool stable_enabled_ = true)
      : alpha(alpha_), d(d_), stable_enabled(stable_enabled_) {
    if (stable_enabled) check_alpha(alpha);
    if (!(d >= 0.0)) throw std::domain_error("Brownian weight d must be >= 0");
    if (d == 0.0 && !stable_enabled) throw std::domain_error("noise has neither a Gaussian nor a stable part");
  }

  /// Zero noise, for deterministic reductions of the path simulators.
  static StableNoiseSpec silent(double alpha = 1.0) {
    StableNoiseSpec s;
    s.alpha = alpha;
    s.d = 0.0;
    s.stable_enabled = false;
    return s;
  }
};

/// C(alpha) = int_{R\{0}} (1 - cos y) |y|^{-1-alpha} dy = pi / (Gamma(1+alpha) sin(pi alpha / 2)).
/// The stable part of L has characteristic exponent -C(alpha)|lambda|^alpha.
inline double stable_scale_constant(double alpha) {
  check_alpha(alpha);
  return std::numbers::pi / (std::tgamma(1.0 + alpha) * std::sin(0.5 * std::numbers::pi * alpha));
}

/// Same constant evaluated by quadrature of the Levy measure; used for validation.
inline double stable_scale_constant_quadrature(double alpha) {
  check_alpha(alpha);
  return -2.0 * detail::levy_cos_integral(1.0, 0.0, std::numeric_limits<double>::infinity(), alpha);
}

/// psi(lambda) with E exp(i lambda L_1) = exp(psi(lambda)).
inline double characteristic_exponent(const StableNoiseSpec& spec, double lambda) {
  double psi = -0.5 * spec.d * lambda * lambda;
  if (spec.stable_enabled && lambda != 0.0) {
    psi -= stable_scale_constant(spec.alpha) * std::pow(std::abs(lambda), spec.alpha);
  }
  return psi;
}

inline double sample_gaussian_increment(double d, double h, RngStream& rng) {
  if (!(h > 0.0)) throw std::domain_error("time step h must be positive");
  if (d == 0.0) return 0.0;
  return std::sqrt(d * h) * rng.normal();
}

/// Chambers-Mallows-Stuck map for the standard symmetric stable law
/// (characteristic function exp(-|lambda|^alpha)); v uniform on (-pi/2, pi/2),
/// w ~ Exp(1). Odd in v.
inline double cms_symmetric(double alpha, double v, double w) {
  if (alpha == 1.0) return std::tan(v);
  const double cv = std::cos(v);
  return std::sin(alpha * v) / std::pow(cv, 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

inline double standard_symmetric_stable(double alpha, RngStream& rng) {
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  return cms_symmetric(alpha, v, w);
}

/// Precomputed sampler for stable increments over a fixed horizon h.
class StableIncrementSampler {
 public:
  StableIncrementSampler(double alpha, double h) : alpha_(alpha) {
    check_alpha(alpha);
    if (!(h > 0.0)) throw std::domain_error("time step h must be positive");
    scale_ = std::pow(h * stable_scale_constant(alpha), 1.0 / alpha);
  }
  double operator()(RngStream& rng) const { return scale_ * standard_symmetric_stable(alpha_, rng); }
  double scale() const { return scale_; }

 private:
  double alpha_;
  double scale_;
};

/// Increment over time h of the stable component of L: characteristic
/// function exp(-h C(alpha) |lambda|^alpha).
inline double sample_stable_increment(double alpha, double h, RngStream& rng) {
  return StableIncrementSampler(alpha, h)(rng);
}

}  // namespace levyexit
