#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "levyexit/sde.hpp"

namespace levyexit {

/// KS distance between the ECDF of `samples` and Exp(rate = 1/sample mean).
/// The rate is fitted, so the usual KS critical values are conservative
/// (Lilliefors setting).
inline double ks_exponential(std::span<const double> samples) {
  if (samples.size() < 30) throw std::invalid_argument("ks_exponential needs at least 30 samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  if (!(mean > 0.0)) throw std::invalid_argument("ks_exponential needs a positive sample mean");
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double cdf = 1.0 - std::exp(-s[i] / mean);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

inline double ks_exponential(std::span<const ExitRecord> records) {
  std::vector<double> times;
  times.reserve(records.size());
  for (const auto& r : records) {
    if (r.censored) throw std::invalid_argument("ks_exponential: censored records present; extend t_max or filter");
    times.push_back(r.exit_time);
  }
  return ks_exponential(std::span<const double>(times));
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// KS distance of a sample against an arbitrary continuous CDF.
template <class Cdf>
double ks_against(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

struct StatsSummary {
  std::uint64_t n = 0;
  std::uint64_t n_uncensored = 0;
  std::uint64_t censored_count = 0;
  std::uint64_t clamped_count = 0;
  bool sufficient = false;  // enough uncensored exits for the statistics below
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  double ks_statistic = std::numeric_limits<double>::quiet_NaN();
  double big_jump_exit_fraction = std::numeric_limits<double>::quiet_NaN();
};

/// Summary over uncensored records. The 95% CI is the delta-method normal
/// interval on the log scale, log(mean) +- z SE/mean, exponentiated.
inline StatsSummary summarize(std::span<const ExitRecord> records) {
  StatsSummary s;
  s.n = records.size();
  std::vector<double> times;
  std::uint64_t big = 0;
  for (const auto& r : records) {
    if (r.clamped) ++s.clamped_count;
    if (r.censored) {
      ++s.censored_count;
      continue;
    }
    times.push_back(r.exit_time);
    if (r.exited_at_large_jump) ++big;
  }
  s.n_uncensored = times.size();
  if (times.empty()) return s;
  const double n = static_cast<double>(times.size());
  s.mean = std::accumulate(times.begin(), times.end(), 0.0) / n;
  s.big_jump_exit_fraction = static_cast<double>(big) / n;
  if (times.size() >= 2) {
    double ss = 0.0;
    for (double t : times) ss += (t - s.mean) * (t - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    const double z = 1.959963984540054;
    const double half = s.mean > 0.0 ? z * s.std_error / s.mean : 0.0;
    s.ci_low = s.mean * std::exp(-half);
    s.ci_high = s.mean * std::exp(half);
  }
  if (times.size() >= 30 && s.mean > 0.0) {
    s.ks_statistic = ks_exponential(std::span<const double>(times));
    s.sufficient = true;
  }
  return s;
}

struct LinearFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double slope_se = std::numeric_limits<double>::quiet_NaN();
};

/// Ordinary least squares y = intercept + slope x.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return f;
}

/// Power-law fit log p = intercept + slope log eps over tube-deviation
/// estimates. A point with no hits enters at its Wilson upper bound, which can
/// only flatten the fitted slope.
inline LinearFit deviation_power_fit(std::span<const double> eps, std::span<const DeviationEstimate> est) {
  if (eps.size() != est.size()) throw std::invalid_argument("deviation_power_fit: size mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double p = est[i].hits > 0 ? est[i].probability : est[i].ci_high;
    if (!(p > 0.0)) continue;
    x.push_back(std::log(eps[i]));
    y.push_back(std::log(p));
  }
  if (x.size() < 2) throw std::invalid_argument("deviation_power_fit needs two estimates with n > 0");
  return linear_fit(x, y);
}

/// sup over u in [0, u_max] of |P_emp(T > mean u) - e^{-u}|, evaluated at the
/// ECDF jump points (both one-sided limits) and at u_max.
inline double survival_sup_deviation(std::vector<double> times, double u_max = 3.0) {
  if (times.empty()) throw std::invalid_argument("survival_sup_deviation needs samples");
  std::sort(times.begin(), times.end());
  const double n = static_cast<double>(times.size());
  const double mean = std::accumulate(times.begin(), times.end(), 0.0) / n;
  double d = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double u = times[i] / mean;
    if (u > u_max) break;
    const double e = std::exp(-u);
    d = std::max({d, std::abs((n - static_cast<double>(i)) / n - e), std::abs((n - static_cast<double>(i) - 1.0) / n - e)});
  }
  const auto above = static_cast<double>(times.end() - std::upper_bound(times.begin(), times.end(), u_max * mean));
  return std::max(d, std::abs(above / n - std::exp(-u_max)));
}

}  // namespace levyexit
