#pragma once

// Closed-form exit laws: the stable-noise exponential law, its two-sided
// error sandwich, and the Gaussian (Kramers) mean exit time.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "levyexit/domain.hpp"
#include "levyexit/noise.hpp"
#include "levyexit/potential.hpp"

namespace levyexit {

inline double theta(const ExitDomain& dom, double alpha) {
  double t = std::pow(dom.a, -alpha);
  if (!dom.is_half_line()) t += std::pow(dom.b, -alpha);
  return t;
}

struct TheoryPrediction {
  std::string model = "stable";  // "stable" or "kramers"
  double theta = std::numeric_limits<double>::quiet_NaN();
  double rate = 0.0;
  double mean = 0.0;
  double delta = 0.0;  // error exponent min(alpha/2, gamma/2)

  double survival(double u) const { return std::exp(-u * rate); }
};

/// Exponential exit law with rate eps^alpha theta / alpha.
inline TheoryPrediction stable_exit_law(double alpha, double eps, const ExitDomain& dom, double gamma) {
  check_alpha(alpha);
  if (!(eps > 0.0)) throw std::domain_error("eps must be positive");
  TheoryPrediction pred;
  pred.theta = theta(dom, alpha);
  pred.rate = std::pow(eps, alpha) * pred.theta / alpha;
  pred.mean = 1.0 / pred.rate;
  pred.delta = std::min(alpha / 2.0, gamma / 2.0);
  return pred;
}

/// Lower and upper survival curves exp{-u r (1 +- C eps^delta)} (1 -+ C eps^delta).
inline std::pair<double, double> theorem_sandwich(double u, double eps, const TheoryPrediction& pred, double c) {
  if (!(c >= 0.0) || !(u >= 0.0)) throw std::domain_error("theorem_sandwich needs C >= 0 and u >= 0");
  const double slack = c * std::pow(eps, pred.delta);
  const double lower = std::exp(-u * pred.rate * (1.0 + slack)) * (1.0 - slack);
  const double upper = std::exp(-u * pred.rate * (1.0 - slack)) * (1.0 + slack);
  return {lower, upper};
}

/// Smallest C for which the empirical survival function of `sorted_times`
/// (ascending; `n_total` includes censored paths beyond the last entry) stays
/// inside the sandwich on [0, u_max]. Bisection over [0, c_max]; returns
/// +inf when even c_max fails.
inline double fit_sandwich_constant(std::span<const double> sorted_times, std::size_t n_total, double eps,
                                    const TheoryPrediction& pred, double u_max, double c_max = 1e3) {
  const double n = static_cast<double>(n_total);
  auto inside = [&](double c) {
    // On [t_{i-1}, t_i) the survival is (n - i)/n with 0-based i.
    double left = 0.0;
    for (std::size_t i = 0; i <= sorted_times.size(); ++i) {
      const double right = i < sorted_times.size() ? std::min(sorted_times[i], u_max) : u_max;
      const double s = (n - static_cast<double>(i)) / n;
      if (left > u_max) break;
      if (s < theorem_sandwich(left, eps, pred, c).first) return false;
      if (s > theorem_sandwich(right, eps, pred, c).second) return false;
      if (right >= u_max) break;
      left = right;
    }
    return true;
  };
  if (inside(0.0)) return 0.0;
  if (!inside(c_max)) return std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = c_max;
  for (int it = 0; it < 100 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return hi;
}

/// Kramers' mean exit time over the barrier at a for dX = -U'(X)dt + eps dW:
/// eps sqrt(pi) / (|U'(a)| sqrt(U''(0))) exp(2 U(a) / eps^2). `a` may be negative
/// (barrier on the left).
template <Potential P>
double kramers_mean_exit(double eps, const P& p, double a) {
  if (!(eps > 0.0)) throw std::domain_error("eps must be positive");
  return eps * std::sqrt(std::numbers::pi) / (std::abs(p.du(a)) * std::sqrt(p.d2u(0.0))) *
         std::exp(2.0 * p.u(a) / (eps * eps));
}

/// Kramers prediction through the lower of the two barriers of the domain.
template <Potential P>
TheoryPrediction kramers_exit_law(double eps, const P& p, const ExitDomain& dom) {
  double barrier = dom.a;
  if (!dom.is_half_line() && p.u(-dom.b) < p.u(dom.a)) barrier = -dom.b;
  TheoryPrediction pred;
  pred.model = "kramers";
  pred.mean = kramers_mean_exit(eps, p, barrier);
  pred.rate = 1.0 / pred.mean;
  return pred;
}

}  // namespace levyexit
