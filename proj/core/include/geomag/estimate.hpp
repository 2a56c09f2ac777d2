#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "geomag/analytic.hpp"

namespace geomag {

struct Measurement {
  double signal = 0.0;
  /// dP/dB from a two-point difference at B +- step/2.
  std::optional<double> slope;
  /// Per-value signal uncertainty (one standard deviation).
  double sigma = 0.0;
  /// Field step of the slope difference; 0 means the model default (B_max / 1000).
  double slope_step = 0.0;
};

struct FieldEstimate {
  double field = 0.0;
  std::size_t candidates_considered = 0;
  /// Geometric: oscillation lobe counted from B = 0. Dynamic: fringe index m.
  int lobe_index = 0;
  /// Slope separation between the chosen and the runner-up candidate in units
  /// of the decision tolerance (infinite when there is a single candidate).
  double confidence = 0.0;
  bool clamped = false;
  bool slope_consistent = true;
};

/// Picks the field in [0, B_max] whose signal matches P and whose analytic
/// slope best matches the measured slope. Throws InvalidParameter without a
/// slope, OutOfRange when |P| > 1 + 3 sigma, and Unresolvable when another
/// candidate is within 3 sigma_slope (plus the difference-rule error) of the
/// best match.
FieldEstimate estimate_geometric(const GeometricModel& model, const Measurement& measurement);

/// Every Ramsey candidate in the window. The slope, when present, only marks
/// which candidates are consistent with it; the 2 pi ladder stays.
std::vector<FieldEstimate> estimate_dynamic(const DynamicModel& model,
                                            const Measurement& measurement, FieldInterval window);

}  // namespace geomag
