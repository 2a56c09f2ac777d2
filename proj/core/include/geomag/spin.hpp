#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "geomag/units.hpp"

namespace geomag {

/// Bloch vector (s_x, s_y, s_z) of a two-level state.
struct SpinState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;

  friend SpinState operator+(const SpinState& a, const SpinState& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend SpinState operator-(const SpinState& a, const SpinState& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend SpinState operator*(double k, const SpinState& a) { return {k * a.x, k * a.y, k * a.z}; }
  friend bool operator==(const SpinState&, const SpinState&) = default;
};

double dot(const SpinState& a, const SpinState& b);
SpinState cross(const SpinState& a, const SpinState& b);
/// Largest absolute component difference.
double max_abs_diff(const SpinState& a, const SpinState& b);

/// Instantaneous control of H = (1/2)(rabi cos(phase) sx + rabi sin(phase) sy + detuning sz).
struct DriveParams {
  double rabi = 0.0;      // rad/s, >= 0
  double phase = 0.0;     // rad
  double detuning = 0.0;  // rad/s, gamma * B

  void validate() const;
};

/// Effective field the Bloch vector precesses about, in spherical form.
struct LarmorVector {
  double magnitude = 0.0;    // rad/s
  double polar_angle = 0.0;  // rad, in [0, pi]
  double azimuth = 0.0;      // rad

  /// Cartesian vector magnitude * (sin th cos ph, sin th sin ph, cos th).
  SpinState cartesian() const;
};

LarmorVector larmor_from_drive(const DriveParams& drive);

/// Cartesian Larmor vector (rabi cos phase, rabi sin phase, detuning).
SpinState larmor_cartesian(const DriveParams& drive);

/// Right-handed rotation of `state` about `rotation_vector`, by an angle equal
/// to the vector's length.
SpinState rotate(const SpinState& state, const SpinState& rotation_vector);

/// Exact evolution under a constant Hamiltonian. ds/dt = R x s, so positive
/// detuning precesses +x toward +y.
SpinState propagate_constant(const SpinState& state, const DriveParams& drive, double duration);

/// Instantaneous rotation by `angle` about (cos axis_phase, sin axis_phase, 0).
SpinState apply_ideal_pulse(const SpinState& state, double axis_phase, double angle);

/// Mesh control for propagate_swept. The starting mesh has at least
/// `steps_per_cycle` steps per 2 pi of drive-phase sweep and per Larmor period;
/// it is halved until successive results differ by at most `tolerance` in every
/// component, or `max_depth` halvings have been spent.
struct StepControl {
  double tolerance = 1e-6;
  int max_depth = 12;
  int steps_per_cycle = 64;
  std::size_t min_steps = 1;
  /// Upper bound on the step length; set from the noise sampling interval.
  double max_step = std::numeric_limits<double>::infinity();
};

using TimeFunction = std::function<double(double)>;

struct SweptPropagation {
  SpinState state;
  std::size_t steps = 0;
  /// Largest component change between consecutive refinement levels, one entry
  /// per halving, coarse to fine.
  std::vector<double> refinement_errors;
};

/// Evolution under time-dependent phase and detuning with constant Rabi
/// frequency. Each step composes two exact rotations evaluated at the Gauss
/// points of the step (fourth-order commutator-free Magnus scheme).
/// Throws ConvergenceFailure if the mesh tolerance is not met at max depth.
SweptPropagation propagate_swept_detailed(const SpinState& state, double rabi,
                                          const TimeFunction& phase_fn,
                                          const TimeFunction& detuning_fn, double duration,
                                          const StepControl& control = {});

SpinState propagate_swept(const SpinState& state, double rabi, const TimeFunction& phase_fn,
                          const TimeFunction& detuning_fn, double duration,
                          const StepControl& control = {});

/// Fixed-mesh pass used by propagate_swept; exposed for convergence studies.
SpinState propagate_swept_fixed(const SpinState& state, double rabi,
                                const TimeFunction& phase_fn, const TimeFunction& detuning_fn,
                                double duration, std::size_t steps);

}  // namespace geomag
