#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace levyexit {

/// Interval [-b, a] or half-line (-inf, a] around the attractor at the origin.
struct ExitDomain {
  enum class Kind { Bounded, HalfLine };

  Kind kind = Kind::Bounded;
  double a = 1.0;
  double b = 1.0;  // +inf for HalfLine

  static ExitDomain bounded(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw std::domain_error("bounded domain needs a > 0 and b > 0");
    return {Kind::Bounded, a, b};
  }
  static ExitDomain half_line(double a) {
    if (!(a > 0.0)) throw std::domain_error("half-line domain needs a > 0");
    return {Kind::HalfLine, a, std::numeric_limits<double>::infinity()};
  }

  bool is_half_line() const { return kind == Kind::HalfLine; }
  bool contains(double x) const { return x <= a && x >= -b; }
  double min_distance() const { return std::min(a, b); }

  std::string describe() const {
    return is_half_line() ? "halfline(a=" + std::to_string(a) + ")"
                          : "bounded(a=" + std::to_string(a) + ", b=" + std::to_string(b) + ")";
  }
};

}  // namespace levyexit
