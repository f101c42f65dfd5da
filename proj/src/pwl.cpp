#include "mecgrid/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mecgrid {

double PwlCurve::slope(int s) const {
  const auto& a = breakpoints[s];
  const auto& b = breakpoints[s + 1];
  return (b.y - a.y) / (b.x - a.x);
}

PwlCurve pwl_approximate(const std::function<double(double)>& f, double lo, double hi,
                         int segments) {
  if (segments < 1) throw std::invalid_argument("pwl: segments must be at least 1");
  if (!(hi > lo)) throw std::invalid_argument("pwl: degenerate domain");
  PwlCurve curve;
  curve.breakpoints.reserve(segments + 1);
  for (int i = 0; i <= segments; ++i) {
    // evaluate at the exact endpoints to avoid drift at the domain edges
    double x = i == segments ? hi : lo + (hi - lo) * i / segments;
    curve.breakpoints.push_back({x, f(x)});
  }
  for (int s = 1; s < segments; ++s) {
    double prev = curve.slope(s - 1);
    double cur = curve.slope(s);
    if (cur < prev - 1e-9 * std::max(1.0, std::abs(prev)))
      throw std::domain_error("pwl: non-convex samples (secant slope decreases at segment " +
                              std::to_string(s) + ")");
  }
  return curve;
}

double pwl_evaluate(const PwlCurve& curve, double x) {
  const double lo = curve.x_lo(), hi = curve.x_hi();
  const double slack = 1e-7 * std::max(1.0, hi - lo);
  if (x < lo - slack || x > hi + slack)
    throw std::domain_error("pwl: x=" + std::to_string(x) + " outside [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
  x = std::clamp(x, lo, hi);
  // locate the segment whose right breakpoint is the first one >= x
  auto it = std::lower_bound(curve.breakpoints.begin(), curve.breakpoints.end(), x,
                             [](const PwlPoint& p, double v) { return p.x < v; });
  if (it == curve.breakpoints.begin()) return it->y;
  if (it->x == x) return it->y;
  const auto& b = *it;
  const auto& a = *(it - 1);
  double t = (x - a.x) / (b.x - a.x);
  return a.y + t * (b.y - a.y);
}

}  // namespace mecgrid
