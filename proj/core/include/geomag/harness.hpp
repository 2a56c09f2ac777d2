#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geomag/analytic.hpp"
#include "geomag/noise.hpp"
#include "geomag/sequences.hpp"

namespace geomag {

enum class Engine { Analytic, Numeric, NumericNoise };

std::string_view to_string(Engine engine);
std::optional<Engine> parse_engine(std::string_view name);

std::vector<double> linear_grid(double lo, double hi, std::size_t n);
std::vector<double> log_grid(double lo, double hi, std::size_t n);

struct SweepSpec {
  Protocol protocol = Protocol::Ramsey;
  Engine engine = Engine::Analytic;
  std::vector<double> rabi;            // rad/s, Berry only
  std::vector<int> rotations;          // Berry only
  std::vector<double> interaction_time;  // s
  std::vector<double> field;           // T, signal-curve grid
  PhysicalConstants constants;
  PulseAxes axes;
  ExecuteOptions execute;
  SensitivityOptions sensitivity;
  /// Averages the signal over the hyperfine triplet (analytic and numeric engines).
  bool hyperfine = false;
  /// Required by the noisy engine and by T2g extraction.
  std::optional<Lorentzian> bath;
  std::uint64_t seed = 1;
  std::size_t ensemble = 200;
  /// When set, each record also carries T2g from a decay over these times.
  std::vector<double> coherence_times;
  /// Off skips the eta search and leaves only the signal curve.
  bool compute_sensitivity = true;
  unsigned workers = 1;

  void validate() const;
};

struct SweepRecord {
  std::size_t index = 0;
  std::optional<double> rabi;
  std::optional<int> rotations;
  double interaction_time = 0.0;
  std::optional<double> adiabaticity;  // exact form at B = 0
  std::vector<double> signal;          // over SweepSpec::field
  std::optional<SensitivityReport> sensitivity;
  std::optional<double> field_range;
  std::optional<T2gFit> t2g;
  bool ok = true;
  std::string error;
};

struct SweepResult {
  std::vector<double> field;
  std::vector<SweepRecord> records;
  std::size_t failures() const;
};

/// Evaluates every grid point (Cartesian product of the control grids). Errors
/// are recorded per point; records come back in grid order for any worker count.
SweepResult run_sweep(const SweepSpec& spec);

enum class Response { Eta, FieldRange, T2g };
enum class Control { Rabi, Rotations, Time, Adiabaticity };

std::string_view to_string(Response response);
std::string_view to_string(Control control);

struct PowerLawFit {
  std::vector<Control> controls;
  std::vector<double> exponents;
  std::vector<double> std_errors;
  double log_prefactor = 0.0;
  double r_squared = 0.0;
  double rms_log_residual = 0.0;
  std::size_t samples = 0;
};

/// Least squares of log y = c + sum_j e_j log x_j. `columns[j][i]` is control j
/// at sample i. Throws FitFailure on rank deficiency, nonpositive data or
/// fewer than three distinct values of a control.
PowerLawFit fit_power_law(std::span<const std::vector<double>> columns, std::span<const double> y,
                          std::vector<Control> controls = {});
/// Fits the chosen response of the successful records of a sweep.
PowerLawFit fit_power_law(const SweepResult& result, Response response,
                          std::vector<Control> controls);

struct SmartControlRow {
  double k = 0.0;
  double rabi = 0.0;
  int rotations = 0;
  double adiabaticity = 0.0;
  double eta = 0.0;
  double eta_ratio = 0.0;
  double field_range = 0.0;
  double field_range_ratio = 0.0;
};

struct SmartControlResult {
  std::vector<SmartControlRow> rows;
  double eta_reference = 0.0;
  double max_eta_deviation = 0.0;  // max |eta / eta_reference - 1|
  double enhancement = 0.0;        // largest field-range ratio
  bool eta_held = false;           // max_eta_deviation <= 0.1
};

/// Scales Omega -> k Omega and N -> round(k N) at fixed T. eta_reference is
/// eta_target when positive, otherwise eta at k = 1 (or the smallest k).
/// Throws AdiabaticityViolation when the exact A at B = 0 exceeds 0.1.
SmartControlResult smart_control_curve(const GeometricModel& base, double interaction_time,
                                       std::span<const double> k_grid, double eta_target = 0.0,
                                       const SensitivityOptions& options = {});

/// Regime labels over A: adiabatic (< 0.1), intermediate (< 1),
/// nonadiabatic (< 3), strongly nonadiabatic.
std::string_view regime_label(double adiabaticity);
int regime_rank(double adiabaticity);

struct NonadiabaticRow {
  double target_adiabaticity = 0.0;
  double adiabaticity = 0.0;  // achieved, exact form at B = 0
  double rabi = 0.0;
  int rotations = 0;
  double attenuation = 1.0;
  double eta_geometric = 0.0;
  double eta_dynamic = 0.0;
  double max_slope = 0.0;
  double field_at_max_slope = 0.0;
};

struct NonadiabaticScan {
  double interaction_time = 0.0;
  std::vector<NonadiabaticRow> rows;
  /// Smallest achieved A with eta_geometric < eta_dynamic.
  std::optional<double> crossover;
};

struct NonadiabaticOptions {
  double rabi = kTwoPi * 5e6;
  PhysicalConstants constants;
  SensitivityOptions sensitivity;
  QuadratureSpec quadrature;
  unsigned workers = 1;
};

/// Geometric eta from the full propagator at fixed Omega with N = round(A Omega T / 2 pi),
/// the signal attenuated by exp(-chi) of the decoherence integral; the
/// dynamic reference is Ramsey at the same T attenuated by exp(-chi_Ramsey).
NonadiabaticScan nonadiabatic_sensitivity_scan(std::span<const double> a_grid,
                                               double interaction_time,
                                               const SpectralDensity& density,
                                               const NonadiabaticOptions& options = {});

enum class RegimeEngine { FilterIntegral, MonteCarlo };

struct RegimeRow {
  double adiabaticity = 0.0;
  double t2g = 0.0;
  double fit_residual = 0.0;
  std::string_view label;
  bool ok = true;
  std::string error;
  CoherenceCurve curve;
};

struct RegimeOptions {
  std::size_t samples = 16;  // decay samples per A
  QuadratureSpec quadrature;
  // Monte-Carlo engine.
  double rabi = kTwoPi * 1e6;
  std::size_t ensemble = 200;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  PhysicalConstants constants;
};

/// T2g(A) from the decoherence integral (FilterIntegral) or from Berry-sequence ensembles
/// under OU noise (MonteCarlo). Each A is sampled on 0.1 to 2 times its own
/// 1/e time. Fit failures are recorded per row, as are strongly nonadiabatic
/// points (A >= 3) under FilterIntegral.
std::vector<RegimeRow> decoherence_regime_scan(std::span<const double> a_grid,
                                               const Lorentzian& bath, RegimeEngine engine,
                                               const RegimeOptions& options = {});

/// Log-log slope of T2g against A over successful rows with lo < A < hi.
PowerLawFit regime_slope(std::span<const RegimeRow> rows, double lo, double hi);

}  // namespace geomag
