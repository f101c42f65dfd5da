#pragma once

// Piecewise-linear secant approximation of convex scalar curves. A convex
// curve sampled at its breakpoints is over-estimated between them, which
// keeps minimized cost/fuel terms safe to encode without binaries.

#include <functional>
#include <vector>

namespace mecgrid {

struct PwlPoint {
  double x, y;
};

struct PwlCurve {
  std::vector<PwlPoint> breakpoints;  // x strictly increasing

  int segments() const { return static_cast<int>(breakpoints.size()) - 1; }
  double x_lo() const { return breakpoints.front().x; }
  double x_hi() const { return breakpoints.back().x; }
  // Slope of segment s (0-based).
  double slope(int s) const;
};

// Samples `f` at `segments`+1 uniformly spaced breakpoints over [lo, hi].
// Throws std::invalid_argument on a degenerate domain or segments < 1, and
// std::domain_error when the samples reveal decreasing secant slopes.
PwlCurve pwl_approximate(const std::function<double(double)>& f, double lo, double hi,
                         int segments);

// Linear interpolation on the containing segment; exact at breakpoints.
// x outside the domain (beyond a small relative slack that absorbs solver
// round-off) throws std::domain_error.
double pwl_evaluate(const PwlCurve& curve, double x);

}  // namespace mecgrid
