#pragma once

#include <array>
#include <functional>
#include <vector>

#include "geomag/units.hpp"

namespace geomag {

struct FieldInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Ramsey (dynamic-phase) signal model, P = cos(gamma B T).
struct DynamicModel {
  double interaction_time = 0.0;
  PhysicalConstants constants;

  void validate() const;
};

/// Berry-sequence (geometric-phase) signal model in the adiabatic limit.
struct GeometricModel {
  double rabi = 0.0;
  int rotations = 1;
  PhysicalConstants constants;

  void validate() const;
};

double ramsey_signal(const DynamicModel& model, double field);
double ramsey_slope(const DynamicModel& model, double field);
/// cos((gamma B + offset) T); the hyperfine building block.
double ramsey_signal_offset(const DynamicModel& model, double field, double detuning_offset);

/// Every B_m = (acos P + 2 pi m) / (gamma T) and its mirror branch inside the
/// window, ascending. Throws InvalidParameter when |P| > 1.
std::vector<double> ramsey_ambiguities(const DynamicModel& model, double measured_signal,
                                       FieldInterval window);

/// One full fringe, 2 pi / (gamma T).
double ramsey_field_range(const DynamicModel& model);

/// Cosine argument 4 pi N (1 - cos theta), cos theta = gamma B / R.
double berry_argument(const GeometricModel& model, double field);
double berry_signal(const GeometricModel& model, double field);
double berry_signal_offset(const GeometricModel& model, double field, double detuning_offset);
/// dP/dB = sin(arg) 4 pi N gamma Omega^2 / R^3.
double berry_slope(const GeometricModel& model, double field);
/// Field at which arg = pi: the last minimum of the chirped signal.
double berry_field_range(const GeometricModel& model);
/// Inverse of berry_argument on arg in (0, 4 pi N]; returns B >= 0.
double berry_field_from_argument(const GeometricModel& model, double argument);

struct SensitivityReport {
  double eta = 0.0;                  // T / sqrt(Hz)
  double max_slope = 0.0;            // 1 / T
  double field_at_max_slope = 0.0;   // T
  double sigma_p = 1.0;
  double overhead = 0.0;             // s
};

struct SensitivityOptions {
  double sigma_p = 1.0;
  double overhead = 0.0;
  std::size_t grid_points = 4096;
  /// Step for the central difference used when no slope function is given.
  double difference_step = 0.0;
};

using FieldFunction = std::function<double(double)>;

/// eta = sigma_P sqrt(T + overhead) / max |slope| over the search interval.
/// The maximum is located on a uniform grid and refined by golden-section
/// search. If `slope_fn` is empty the slope is a central difference of
/// `signal_fn`. Throws DegenerateSlope if the maximum is below 1e-15 per tesla.
SensitivityReport sensitivity(const FieldFunction& signal_fn, const FieldFunction& slope_fn,
                              FieldInterval search, double interaction_time,
                              const SensitivityOptions& options = {});

/// Three hyperfine lines at -d, 0, +d with normalized weights.
struct HyperfineModel {
  std::array<double, 3> offsets{};
  std::array<double, 3> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  static HyperfineModel triplet(double splitting);
  void validate() const;
};

/// Weighted sum of base(offset) over the three hyperfine offsets.
double hyperfine_average(const std::function<double(double)>& base, const HyperfineModel& model);

struct Adiabaticity {
  /// (4 pi N / T) Omega / (2 R^2), R^2 = Omega^2 + (gamma B)^2.
  double exact = 0.0;
  /// N / (Omega T) with Omega angular; drops the 2 pi of the exact form at B = 0.
  double approx = 0.0;
};

Adiabaticity adiabaticity(double rabi, int rotations, double interaction_time, double field,
                          const PhysicalConstants& constants = {});

}  // namespace geomag
