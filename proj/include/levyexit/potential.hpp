#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levyexit/domain.hpp"

namespace levyexit {

/// Single-well potential with its first two derivatives. Types that can
/// integrate the deterministic flow in closed form report it through
/// has_exact_flow()/exact_flow(); the simulators use it for stiff drift steps.
template <class P>
concept Potential = requires(const P& p, double x, double t) {
  { p.u(x) } -> std::convertible_to<double>;
  { p.du(x) } -> std::convertible_to<double>;
  { p.d2u(x) } -> std::convertible_to<double>;
  { p.curvature() } -> std::convertible_to<double>;
  { p.growth_exponent() } -> std::convertible_to<std::optional<double>>;
  { p.has_exact_flow() } -> std::convertible_to<bool>;
  { p.exact_flow(x, t) } -> std::convertible_to<double>;
  { p.name() } -> std::convertible_to<std::string>;
};

/// U = M x^2 / 2.
struct Quadratic {
  double m = 1.0;

  double u(double x) const { return 0.5 * m * x * x; }
  double du(double x) const { return m * x; }
  double d2u(double) const { return m; }
  double curvature() const { return m; }
  std::optional<double> growth_exponent() const { return std::nullopt; }
  bool has_exact_flow() const { return true; }
  double exact_flow(double x, double t) const { return x * std::exp(-m * t); }
  std::string name() const { return "quadratic"; }
};

/// U = M x^2 / 2 + kappa x^4 / 4; quartic growth (exponent 2) at -inf.
struct HarmonicQuartic {
  double m = 1.0;
  double kappa = 1.0;

  double u(double x) const { return 0.5 * m * x * x + 0.25 * kappa * x * x * x * x; }
  double du(double x) const { return m * x + kappa * x * x * x; }
  double d2u(double x) const { return m + 3.0 * kappa * x * x; }
  double curvature() const { return m; }
  std::optional<double> growth_exponent() const {
    return kappa > 0.0 ? std::optional<double>(2.0) : std::nullopt;
  }
  bool has_exact_flow() const { return m > 0.0; }
  // Bernoulli equation: z = 1/y^2 solves z' = 2 M z + 2 kappa.
  double exact_flow(double x, double t) const {
    if (x == 0.0) return 0.0;
    const double k = kappa / m;
    const double z = (1.0 / (x * x) + k) * std::exp(2.0 * m * t) - k;
    return std::copysign(1.0 / std::sqrt(z), x);
  }
  std::string name() const { return "harmonic_quartic"; }
};

/// Type-erased potential, e.g. for user-supplied closures.
struct PotentialSpec {
  std::string label = "custom";
  std::function<double(double)> u_fn;
  std::function<double(double)> du_fn;
  std::function<double(double)> d2u_fn;
  double m = 0.0;
  std::optional<double> growth;
  std::function<double(double, double)> flow_fn;  // optional closed-form flow

  template <Potential P>
  static PotentialSpec from(const P& p) {
    PotentialSpec s;
    s.label = p.name();
    s.u_fn = [p](double x) { return p.u(x); };
    s.du_fn = [p](double x) { return p.du(x); };
    s.d2u_fn = [p](double x) { return p.d2u(x); };
    s.m = p.curvature();
    s.growth = p.growth_exponent();
    if (p.has_exact_flow()) s.flow_fn = [p](double x, double t) { return p.exact_flow(x, t); };
    return s;
  }

  double u(double x) const { return u_fn(x); }
  double du(double x) const { return du_fn(x); }
  double d2u(double x) const { return d2u_fn(x); }
  double curvature() const { return m; }
  std::optional<double> growth_exponent() const { return growth; }
  bool has_exact_flow() const { return static_cast<bool>(flow_fn); }
  double exact_flow(double x, double t) const { return flow_fn(x, t); }
  std::string name() const { return label; }
};

struct CheckItem {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckItem> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const CheckItem* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Grid checks of the single-well conditions on the working domain, plus
/// derivative consistency against central finite differences.
template <Potential P>
ValidationReport validate_potential(const P& p, const ExitDomain& dom) {
  ValidationReport report;
  auto add = [&report](std::string name, bool ok, std::string detail = {}) {
    report.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  add("u(0) = 0", std::abs(p.u(0.0)) <= 1e-12, "u(0) = " + std::to_string(p.u(0.0)));
  add("u'(0) = 0", std::abs(p.du(0.0)) <= 1e-12, "u'(0) = " + std::to_string(p.du(0.0)));
  const double m = p.curvature();
  add("curvature u''(0) = M > 0", m > 0.0 && std::abs(p.d2u(0.0) - m) <= 1e-9 * std::max(1.0, m),
      "u''(0) = " + std::to_string(p.d2u(0.0)) + ", M = " + std::to_string(m));

  const double left = dom.is_half_line() ? -std::max(10.0 * dom.a, 10.0) : -dom.b;
  const double right = dom.a;
  constexpr int kGrid = 400;
  bool sign_ok = true;
  bool du_ok = true;
  bool d2u_ok = true;
  double worst_du = 0.0;
  double worst_d2u = 0.0;
  constexpr double kStep = 1e-4;
  for (int i = 0; i <= kGrid; ++i) {
    const double x = left + (right - left) * i / kGrid;
    if (x == 0.0) continue;
    if (!(x * p.du(x) > 0.0)) sign_ok = false;
    if (std::abs(x) < 0.05) continue;
    const double fd1 = (p.u(x + kStep) - p.u(x - kStep)) / (2.0 * kStep);
    const double fd2 = (p.du(x + kStep) - p.du(x - kStep)) / (2.0 * kStep);
    const double e1 = std::abs(fd1 - p.du(x)) / std::max(std::abs(p.du(x)), 1e-12);
    const double e2 = std::abs(fd2 - p.d2u(x)) / std::max(std::abs(p.d2u(x)), 1e-12);
    worst_du = std::max(worst_du, e1);
    worst_d2u = std::max(worst_d2u, e2);
    if (!(e1 < 1e-5)) du_ok = false;
    if (!(e2 < 1e-5)) d2u_ok = false;
  }
  add("x u'(x) > 0 for x != 0", sign_ok);
  add("u' matches finite differences of u", du_ok, "max rel error " + std::to_string(worst_du));
  add("u'' matches finite differences of u'", d2u_ok, "max rel error " + std::to_string(worst_d2u));

  if (dom.is_half_line()) {
    const auto g = p.growth_exponent();
    bool ok = g.has_value() && *g > 0.0;
    // U(x)/|x|^2 must grow without bound towards -inf.
    if (ok) {
      double prev = p.u(-10.0) / 100.0;
      for (double x = -20.0; x >= -1e4; x *= 2.0) {
        const double cur = p.u(x) / (x * x);
        if (!(cur > prev)) ok = false;
        prev = cur;
      }
    }
    add("growth condition: U ~ c|x|^{2+c2} at -inf", ok,
        g ? "growth exponent " + std::to_string(*g) : "potential has no superquadratic growth exponent");
  }
  return report;
}

struct FlowOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_steps = 1'000'000;
};

/// Deterministic gradient flow y' = -U'(y) integrated with the adaptive
/// Dormand-Prince 5(4) pair.
template <Potential P>
double flow(const P& p, double x, double t, const FlowOptions& opt = {}) {
  if (!(t >= 0.0)) throw std::domain_error("flow: t must be >= 0");
  if (t == 0.0 || x == 0.0) return x;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto f = [&p](double y) { return -p.du(y); };
  double y = x;
  double s = 0.0;
  double dt = std::min(t, 0.1 / std::max(std::abs(p.d2u(x)), 1e-3));
  double k1 = f(y);
  for (int step = 0; step < opt.max_steps; ++step) {
    if (s >= t) return y;
    dt = std::min(dt, t - s);
    const double k2 = f(y + dt * a21 * k1);
    const double k3 = f(y + dt * (a31 * k1 + a32 * k2));
    const double k4 = f(y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = f(y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 = f(y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double y_new = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = f(y_new);
    const double err = std::abs(dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    const double scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(y), std::abs(y_new));
    const double ratio = std::isfinite(err) ? err / scale : std::numeric_limits<double>::infinity();
    if (ratio <= 1.0) {
      s = (t - s <= dt) ? t : s + dt;
      y = y_new;
      k1 = k7;
    }
    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    dt *= factor;
    if (!(dt > 0.0) || dt < 1e-300) break;
  }
  throw std::runtime_error("flow: integration failed to reach the requested time");
}

/// Time for the flow to bring the domain edges into the delta-neighbourhood of
/// the origin. On a half-line the left edge is the hand-off radius return_radius.
template <Potential P>
double relaxation_time(const P& p, const ExitDomain& dom, double delta, double return_radius = 0.0) {
  const double left_edge = dom.is_half_line() ? (return_radius > 0.0 ? return_radius : dom.a) : dom.b;
  if (!(delta > 0.0 && delta <= std::min(dom.a, left_edge))) {
    throw std::domain_error("relaxation_time: delta must lie in (0, min boundary distance]");
  }
  using boost::math::quadrature::gauss_kronrod;
  auto right = [&p](double y) { return 1.0 / p.du(y); };
  auto left = [&p](double y) { return -1.0 / p.du(y); };
  const double tr = delta < dom.a ? gauss_kronrod<double, 31>::integrate(right, delta, dom.a, 15, 1e-12) : 0.0;
  const double tl =
      delta < left_edge ? gauss_kronrod<double, 31>::integrate(left, -left_edge, -delta, 15, 1e-12) : 0.0;
  return std::max(tr, tl);
}

}  // namespace levyexit
