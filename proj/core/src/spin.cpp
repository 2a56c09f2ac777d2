#include "geomag/spin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geomag/errors.hpp"

namespace geomag {

void PhysicalConstants::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidParameter("gyromagnetic ratio must be positive");
  }
  if (!(hyperfine_splitting > 0.0) || !std::isfinite(hyperfine_splitting)) {
    throw InvalidParameter("hyperfine splitting must be positive");
  }
}

double SpinState::norm() const { return std::sqrt(x * x + y * y + z * z); }

double dot(const SpinState& a, const SpinState& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

SpinState cross(const SpinState& a, const SpinState& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double max_abs_diff(const SpinState& a, const SpinState& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

void DriveParams::validate() const {
  if (!(rabi >= 0.0) || !std::isfinite(rabi)) throw InvalidParameter("rabi must be >= 0");
  if (!std::isfinite(phase)) throw InvalidParameter("drive phase must be finite");
  if (!std::isfinite(detuning)) throw InvalidParameter("detuning must be finite");
}

SpinState LarmorVector::cartesian() const {
  const double st = std::sin(polar_angle);
  return {magnitude * st * std::cos(azimuth), magnitude * st * std::sin(azimuth),
          magnitude * std::cos(polar_angle)};
}

LarmorVector larmor_from_drive(const DriveParams& drive) {
  const double r = std::hypot(drive.rabi, drive.detuning);
  if (r == 0.0) return {0.0, 0.0, drive.phase};
  // atan2 keeps the polar angle accurate near the poles where acos is not.
  return {r, std::atan2(drive.rabi, drive.detuning), drive.phase};
}

SpinState larmor_cartesian(const DriveParams& drive) {
  return {drive.rabi * std::cos(drive.phase), drive.rabi * std::sin(drive.phase), drive.detuning};
}

SpinState rotate(const SpinState& state, const SpinState& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle == 0.0) return state;
  const SpinState k = (1.0 / angle) * rotation_vector;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const SpinState kxs = cross(k, state);
  const double kds = dot(k, state);
  return {state.x * c + kxs.x * s + k.x * kds * (1.0 - c),
          state.y * c + kxs.y * s + k.y * kds * (1.0 - c),
          state.z * c + kxs.z * s + k.z * kds * (1.0 - c)};
}

SpinState propagate_constant(const SpinState& state, const DriveParams& drive, double duration) {
  if (duration < 0.0) throw InvalidParameter("duration must be >= 0");
  return rotate(state, duration * larmor_cartesian(drive));
}

SpinState apply_ideal_pulse(const SpinState& state, double axis_phase, double angle) {
  return rotate(state, SpinState{angle * std::cos(axis_phase), angle * std::sin(axis_phase), 0.0});
}

namespace {

// Commutator-free Magnus weights (Blanes & Moan, order 4).
constexpr double kGaussOffset = 0.28867513459481287;  // sqrt(3)/6
constexpr double kAlphaLow = 0.25 - kGaussOffset;
constexpr double kAlphaHigh = 0.25 + kGaussOffset;

SpinState field_at(double rabi, const TimeFunction& phase_fn, const TimeFunction& detuning_fn,
                   double t) {
  const double phase = phase_fn(t);
  return {rabi * std::cos(phase), rabi * std::sin(phase), detuning_fn(t)};
}

std::size_t initial_steps(double rabi, const TimeFunction& phase_fn,
                          const TimeFunction& detuning_fn, double duration,
                          const StepControl& control) {
  constexpr int kProbe = 64;
  double swept_phase = 0.0;
  double max_detuning = 0.0;
  double previous_phase = phase_fn(0.0);
  max_detuning = std::abs(detuning_fn(0.0));
  for (int i = 1; i <= kProbe; ++i) {
    const double t = duration * static_cast<double>(i) / kProbe;
    const double phase = phase_fn(t);
    swept_phase += std::abs(phase - previous_phase);
    previous_phase = phase;
    max_detuning = std::max(max_detuning, std::abs(detuning_fn(t)));
  }
  const double larmor_cycles = std::hypot(rabi, max_detuning) * duration / kTwoPi;
  const double phase_cycles = swept_phase / kTwoPi;
  double steps = std::max(larmor_cycles, phase_cycles) * control.steps_per_cycle;
  if (std::isfinite(control.max_step) && control.max_step > 0.0) {
    steps = std::max(steps, duration / control.max_step);
  }
  steps = std::max(steps, static_cast<double>(control.min_steps));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(steps)));
}

}  // namespace

SpinState propagate_swept_fixed(const SpinState& state, double rabi,
                                const TimeFunction& phase_fn, const TimeFunction& detuning_fn,
                                double duration, std::size_t steps) {
  if (steps == 0) throw InvalidParameter("step count must be positive");
  const double h = duration / static_cast<double>(steps);
  SpinState s = state;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t0 = h * static_cast<double>(i);
    const SpinState r1 = field_at(rabi, phase_fn, detuning_fn, t0 + (0.5 - kGaussOffset) * h);
    const SpinState r2 = field_at(rabi, phase_fn, detuning_fn, t0 + (0.5 + kGaussOffset) * h);
    s = rotate(s, h * (kAlphaHigh * r1 + kAlphaLow * r2));
    s = rotate(s, h * (kAlphaLow * r1 + kAlphaHigh * r2));
  }
  return s;
}

SweptPropagation propagate_swept_detailed(const SpinState& state, double rabi,
                                          const TimeFunction& phase_fn,
                                          const TimeFunction& detuning_fn, double duration,
                                          const StepControl& control) {
  if (duration < 0.0) throw InvalidParameter("duration must be >= 0");
  if (!(rabi >= 0.0)) throw InvalidParameter("rabi must be >= 0");
  SweptPropagation out;
  if (duration == 0.0) {
    out.state = state;
    return out;
  }

  std::size_t steps = initial_steps(rabi, phase_fn, detuning_fn, duration, control);
  SpinState coarse = propagate_swept_fixed(state, rabi, phase_fn, detuning_fn, duration, steps);
  for (int depth = 1; depth <= control.max_depth; ++depth) {
    steps *= 2;
    const SpinState fine =
        propagate_swept_fixed(state, rabi, phase_fn, detuning_fn, duration, steps);
    const double change = max_abs_diff(fine, coarse);
    out.refinement_errors.push_back(change);
    if (change <= control.tolerance) {
      out.state = fine;
      out.steps = steps;
      return out;
    }
    coarse = fine;
  }
  throw ConvergenceFailure("swept propagation did not reach tolerance " +
                               std::to_string(control.tolerance) + " after " +
                               std::to_string(control.max_depth) + " refinements",
                           out.refinement_errors.empty() ? 0.0 : out.refinement_errors.back());
}

SpinState propagate_swept(const SpinState& state, double rabi, const TimeFunction& phase_fn,
                          const TimeFunction& detuning_fn, double duration,
                          const StepControl& control) {
  return propagate_swept_detailed(state, rabi, phase_fn, detuning_fn, duration, control).state;
}

}  // namespace geomag
