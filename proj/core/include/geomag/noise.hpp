#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "geomag/quadrature.hpp"
#include "geomag/sequences.hpp"
#include "geomag/trajectory.hpp"
#include "geomag/units.hpp"

namespace geomag {

// Spectral convention, used everywhere in this module: S(w) is the Fourier
// transform of the detuning autocorrelation, evaluated for w >= 0, and enters
// chi(T) = (1/pi) int_0^inf S(w) F(wT) / w^2 dw. With this choice an
// Ornstein-Uhlenbeck detuning of variance delta^2 and correlation time tau_c
// has S(w) = 2 delta^2 tau_c / (1 + w^2 tau_c^2), and chi equals half the
// accumulated phase variance.

/// Ornstein-Uhlenbeck bath: autocorrelation delta^2 exp(-|t| / tau_c).
struct Lorentzian {
  double delta = 0.0;             // rad/s
  double correlation_time = 0.0;  // s
};

struct WhiteNoise {
  double level = 0.0;  // rad^2/s
};

/// S(w) = amplitude / max(w, low_cutoff) for w <= high_cutoff, zero above.
struct OneOverF {
  double amplitude = 0.0;  // rad^2/s^2
  double low_cutoff = 0.0;
  double high_cutoff = 0.0;
};

class SpectralDensity {
 public:
  using Family = std::variant<Lorentzian, WhiteNoise, OneOverF>;

  SpectralDensity() : family_(WhiteNoise{0.0}) {}
  SpectralDensity(Family family);  // NOLINT(google-explicit-constructor)

  static SpectralDensity none() { return SpectralDensity{WhiteNoise{0.0}}; }

  double operator()(double omega) const;
  /// int_w^inf S(u) / u^2 du, in closed form.
  double tail_integral(double omega) const;
  /// Characteristic frequencies of the spectrum (knees and cutoffs).
  std::vector<double> scales() const;
  /// Frequency above which S is identically zero, or +inf.
  double support_end() const;
  bool is_zero() const;

  const Family& family() const noexcept { return family_; }
  const Lorentzian* lorentzian() const noexcept { return std::get_if<Lorentzian>(&family_); }

 private:
  Family family_;
};

enum class FilterKind { GeometricF0, DynamicF1 };

/// F0(x) = 2 sin^2(x/2); F1(x) = 8 sin^4(x/4).
double filter_function(FilterKind kind, double x);

/// (1/pi) int_0^inf S(w) F(wT) / w^2 dw. Throws QuadratureFailure when the
/// error target is not met within the subdivision budget.
QuadratureResult filter_integral(const SpectralDensity& density, FilterKind kind,
                                 double interaction_time, const QuadratureSpec& spec = {});

struct DecoherenceTerms {
  double geometric = 0.0;  // A^2 (1/pi) int S F0 / w^2
  double dynamic = 0.0;    // (1/pi) int S F1 / w^2
  double total = 0.0;
  double error = 0.0;
};

DecoherenceTerms decoherence_function(const SpectralDensity& density, double adiabaticity,
                                      double interaction_time, const QuadratureSpec& spec = {});

/// Pure-F0 (Ramsey) and pure-F1 (Hahn echo) decoherence exponents.
double ramsey_chi(const SpectralDensity& density, double t, const QuadratureSpec& spec = {});
double hahn_chi(const SpectralDensity& density, double t, const QuadratureSpec& spec = {});

/// Time at which a nondecreasing chi(T) reaches `level` (1 gives the 1/e point).
double decay_time(const std::function<double(double)>& chi, double guess, double level = 1.0);

struct T2gFit {
  double t2g = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  // RMS
};

/// Least-squares fit of amplitude * exp(-(T / T2g)^2). Throws FitFailure for
/// fewer than four samples or when the samples show no decay.
T2gFit fit_t2g(std::span<const double> times, std::span<const double> values);

struct CoherenceCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::optional<T2gFit> fit;
};

/// W(T) = exp(-chi(T)) on an increasing grid, with a Gaussian-decay fit when
/// one is possible.
CoherenceCurve coherence_decay(const SpectralDensity& density, double adiabaticity,
                               std::span<const double> times, const QuadratureSpec& spec = {});

struct NoiseCalibration {
  Lorentzian bath;
  double ramsey_time = 0.0;  // 1/e time of the pure-F0 decay
  double echo_time = 0.0;    // 1/e time of the pure-F1 decay
  double residual = 0.0;     // largest relative mismatch against the targets
};

/// Lorentzian bath whose Ramsey and Hahn-echo 1/e times hit the targets.
/// delta enters chi as delta^2, so the search reduces to a bracketed root in
/// tau_c followed by a closed-form delta. Throws CalibrationFailure when no
/// Lorentzian meets both targets within 5%.
NoiseCalibration calibrate_noise(double ramsey_target, double echo_target,
                                 const QuadratureSpec& spec = {});

/// Stationary Ornstein-Uhlenbeck field trajectory with detuning variance
/// delta^2 and correlation time tau_c, sampled every `dt` and returned in tesla
/// (detuning / gamma). The stream depends only on (seed, stream).
/// Throws InvalidParameter if dt > tau_c / 10.
FieldTrajectory ou_trajectory(const Lorentzian& bath, double duration, double dt,
                              std::uint64_t seed, std::uint64_t stream = 0,
                              const PhysicalConstants& constants = {});

struct OverlayRow {
  double omega = 0.0;
  double density = 0.0;
  double geometric = 0.0;  // A^2 F0(wT) / w^2
  double dynamic = 0.0;    // F1(wT) / w^2
};

std::vector<OverlayRow> spectral_overlay(const SpectralDensity& density, double adiabaticity,
                                         double interaction_time, std::span<const double> omegas);

struct EnsembleOptions {
  std::size_t trajectories = 2000;
  std::uint64_t seed = 1;
  /// Trajectory sampling interval; 0 picks min(tau_c / 10, T_max / 1024).
  double sample_interval = 0.0;
  unsigned workers = 1;
  ExecuteOptions execute;
};

struct EnsemblePoint {
  double time = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
};

/// Ensemble-averaged signal of build(T) for each T, each trajectory driven by
/// its own OU realization (shared across the T grid).
std::vector<EnsemblePoint> monte_carlo_decay(const std::function<SequencePlan(double)>& build,
                                             std::span<const double> times, double field,
                                             const Lorentzian& bath,
                                             const PhysicalConstants& constants,
                                             const EnsembleOptions& options = {});

}  // namespace geomag
