#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace geomag {

struct QuadratureSpec {
  /// Target relative error of the full integral (including any tail estimate).
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  /// Budget of interval bisections across all panels.
  std::size_t max_subdivisions = 20000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t subdivisions = 0;
  std::size_t evaluations = 0;
  /// Midpoint of the interval carrying the largest error estimate at exit.
  double worst_point = 0.0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f over the panels
/// delimited by consecutive `breakpoints` (ascending, at least two). Stops when
/// the summed error estimate is within max(abs_tol, rel_tol |I|) or the
/// subdivision budget is spent; the caller decides what an unmet target means.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureSpec& spec = {});

}  // namespace geomag
