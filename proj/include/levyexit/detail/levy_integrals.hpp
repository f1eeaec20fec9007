#pragma once

// Numerical evaluation of the symmetric Levy-Khintchine integral
//   J(lambda; lo, hi) = int_lo^hi (cos(lambda*y) - 1) y^{-1-alpha} dy,  0 <= lo < hi <= inf,
// used to check characteristic exponents independently of their closed forms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace levyexit::detail {

// int_0^y0 (cos(l*y) - 1) y^{-1-alpha} dy by termwise integration of the cosine series.
inline double cosine_series_near_zero(double lambda, double y0, double alpha) {
  double sum = 0.0;
  double power = 1.0;  // (lambda*y0)^{2k} / (2k)!
  const double z = lambda * y0;
  for (int k = 1; k < 60; ++k) {
    power *= -z * z / ((2.0 * k - 1.0) * (2.0 * k));
    const double term = power / (2.0 * k - alpha);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum * std::pow(y0, -alpha);
}

// int_R^inf cos(l*y) y^{-s} dy by the asymptotic integration-by-parts series,
// accurate when l*R is large (>= ~60).
inline double oscillatory_tail(double lambda, double R, double s) {
  using C = std::complex<double>;
  const C il(0.0, lambda);
  C term = std::pow(R, -s) / il;  // k = 0
  C sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= (s + k - 1.0) / (il * R);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  const C phase = std::exp(il * R);
  return std::real(-phase * sum);
}

inline double levy_cos_integral(double lambda, double lo, double hi, double alpha) {
  lambda = std::abs(lambda);
  if (lambda == 0.0 || hi <= lo) return 0.0;
  using boost::math::quadrature::gauss_kronrod;

  double result = 0.0;
  double start = lo;
  if (lo == 0.0) {
    const double y0 = std::min(hi, 1.0 / lambda);
    result += cosine_series_near_zero(lambda, y0, alpha);
    start = y0;
  }

  const double period = 2.0 * std::numbers::pi / lambda;
  const bool infinite = std::isinf(hi);
  const double stop = infinite ? std::max(start, 80.0 / lambda) : hi;

  auto integrand = [lambda, alpha](double y) {
    const double s = std::sin(0.5 * lambda * y);
    return -2.0 * s * s * std::pow(y, -1.0 - alpha);
  };
  double a = start;
  while (a < stop) {
    const double b = std::min(stop, a + std::min(period, a));
    result += gauss_kronrod<double, 31>::integrate(integrand, a, b, 12, 1e-14);
    a = b;
  }

  if (infinite) {
    result += oscillatory_tail(lambda, stop, 1.0 + alpha) - std::pow(stop, -alpha) / alpha;
  }
  return result;
}

}  // namespace levyexit::detail
