#include "geomag/sequences.hpp"

#include <algorithm>
#include <cmath>

#include "geomag/errors.hpp"

namespace geomag {

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::Ramsey:
      return "ramsey";
    case Protocol::Hahn:
      return "hahn";
    case Protocol::Berry:
      return "berry";
  }
  return "unknown";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
  if (name == "ramsey") return Protocol::Ramsey;
  if (name == "hahn") return Protocol::Hahn;
  if (name == "berry") return Protocol::Berry;
  return std::nullopt;
}

double SequencePlan::evolution_time() const {
  double total = 0.0;
  for (const auto& segment : segments) {
    if (const auto* free = std::get_if<FreeEvolution>(&segment)) total += free->duration;
    if (const auto* swept = std::get_if<SweptDrive>(&segment)) total += swept->duration;
  }
  return total;
}

void SequencePlan::validate() const {
  for (const auto& segment : segments) {
    if (const auto* free = std::get_if<FreeEvolution>(&segment)) {
      if (!(free->duration >= 0.0)) throw InvalidParameter("negative free-evolution duration");
    } else if (const auto* swept = std::get_if<SweptDrive>(&segment)) {
      if (!(swept->duration >= 0.0)) throw InvalidParameter("negative swept-drive duration");
      if (!(swept->rabi >= 0.0)) throw InvalidParameter("negative swept-drive rabi frequency");
    }
  }
  const double total = evolution_time();
  if (std::abs(total - control.interaction_time) > 1e-12 * std::max(1e-6, total)) {
    throw InvalidParameter("segment durations do not add up to the interaction time");
  }
  if (protocol != Protocol::Berry) return;

  if (segments.size() != 5) throw InvalidParameter("Berry plan must have five segments");
  const auto* first = std::get_if<SweptDrive>(&segments[1]);
  const auto* second = std::get_if<SweptDrive>(&segments[3]);
  const auto* refocus = std::get_if<IdealPulse>(&segments[2]);
  if (!std::get_if<IdealPulse>(&segments[0]) || !std::get_if<IdealPulse>(&segments[4]) ||
      !first || !second || !refocus) {
    throw InvalidParameter("Berry plan must be pulse/sweep/pulse/sweep/pulse");
  }
  const double half = control.interaction_time / 2.0;
  const double tol = 1e-12 * std::max(1e-6, control.interaction_time);
  if (std::abs(first->duration - half) > tol || std::abs(second->duration - half) > tol) {
    throw InvalidParameter("Berry sweeps must each last half the interaction time");
  }
  if (!(first->phase_rate * second->phase_rate < 0.0)) {
    throw InvalidParameter("Berry sweeps must rotate in opposite directions");
  }
  if (std::abs(refocus->angle - kPi) > 1e-12) {
    throw InvalidParameter("Berry sweeps must be separated by a pi pulse");
  }
}

namespace {

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("interaction time must be > 0");
}

}  // namespace

SequencePlan build_ramsey(double interaction_time, const PulseAxes& axes) {
  require_positive_time(interaction_time);
  SequencePlan plan;
  plan.protocol = Protocol::Ramsey;
  plan.label = "ramsey";
  plan.control.interaction_time = interaction_time;
  plan.segments = {IdealPulse{axes.preparation, kPi / 2.0}, FreeEvolution{interaction_time},
                   IdealPulse{axes.preparation, kPi / 2.0}};
  return plan;
}

SequencePlan build_hahn(double interaction_time, const PulseAxes& axes) {
  require_positive_time(interaction_time);
  SequencePlan plan;
  plan.protocol = Protocol::Hahn;
  plan.label = "hahn";
  plan.control.interaction_time = interaction_time;
  const double half = interaction_time / 2.0;
  plan.segments = {IdealPulse{axes.preparation, kPi / 2.0}, FreeEvolution{half},
                   IdealPulse{axes.refocus, kPi}, FreeEvolution{interaction_time - half},
                   IdealPulse{axes.preparation, kPi / 2.0}};
  return plan;
}

SequencePlan build_berry(double rabi, int rotations, double interaction_time,
                         const PulseAxes& axes) {
  if (!(rabi > 0.0) || !std::isfinite(rabi)) throw InvalidParameter("rabi must be > 0");
  if (rotations < 1) throw InvalidParameter("rotation count N must be >= 1");
  require_positive_time(interaction_time);

  SequencePlan plan;
  plan.protocol = Protocol::Berry;
  plan.label = "berry";
  plan.control = {rabi, rotations, interaction_time};
  const double half = interaction_time / 2.0;
  const double rate = 4.0 * kPi * rotations / interaction_time;
  const double end_phase = kTwoPi * rotations;
  plan.segments = {IdealPulse{axes.preparation, kPi / 2.0},
                   SweptDrive{rabi, 0.0, rate, half},
                   IdealPulse{axes.refocus, kPi},
                   SweptDrive{rabi, end_phase, -rate, half},
                   IdealPulse{axes.preparation, kPi / 2.0}};
  return plan;
}

namespace {

struct Runner {
  double field;
  const PhysicalConstants& constants;
  const FieldTrajectory* noise;
  const ExecuteOptions& options;
  double clock = 0.0;

  StepControl step_control() const {
    StepControl control = options.step;
    if (noise) control.max_step = std::min(control.max_step, noise->sample_interval());
    return control;
  }

  TimeFunction detuning(double offset) const {
    const double gamma = constants.gamma;
    const double b = field;
    const double start = clock;
    const FieldTrajectory* trajectory = noise;
    return [=](double t) { return gamma * (b + (*trajectory)(start + t)) - offset; };
  }

  SpinState operator()(const SpinState& s, const IdealPulse& pulse) {
    return apply_ideal_pulse(s, pulse.axis_phase, pulse.angle);
  }

  SpinState operator()(const SpinState& s, const FreeEvolution& free) {
    SpinState out;
    if (noise == nullptr) {
      out = propagate_constant(s, DriveParams{0.0, 0.0, constants.gamma * field}, free.duration);
    } else {
      out = propagate_swept(s, 0.0, [](double) { return 0.0; }, detuning(0.0), free.duration,
                            step_control());
    }
    clock += free.duration;
    return out;
  }

  SpinState operator()(const SpinState& s, const SweptDrive& drive) {
    SpinState out;
    const bool lab_frame = options.integrator == Integrator::LabFrameMesh;
    if (lab_frame) {
      const double p0 = drive.phase_start;
      const double rate = drive.phase_rate;
      const TimeFunction phase = [=](double t) { return p0 + rate * t; };
      const TimeFunction detune =
          noise ? detuning(0.0)
                : TimeFunction([d = constants.gamma * field](double) { return d; });
      out = propagate_swept(s, drive.rabi, phase, detune, drive.duration, step_control());
    } else {
      // In the frame rotating at phase_rate about z the drive is static and
      // the detuning is shifted by -phase_rate.
      SpinState rotating;
      if (noise == nullptr) {
        rotating = propagate_constant(
            s, DriveParams{drive.rabi, drive.phase_start, constants.gamma * field - drive.phase_rate},
            drive.duration);
      } else {
        const double p0 = drive.phase_start;
        rotating = propagate_swept(s, drive.rabi, [p0](double) { return p0; },
                                   detuning(drive.phase_rate), drive.duration, step_control());
      }
      out = rotate(rotating, SpinState{0.0, 0.0, drive.phase_rate * drive.duration});
    }
    clock += drive.duration;
    return out;
  }
};

}  // namespace

SpinState execute_state(const SequencePlan& plan, double field, const PhysicalConstants& constants,
                        const FieldTrajectory* noise, const ExecuteOptions& options) {
  if (!std::isfinite(field)) throw InvalidParameter("field must be finite");
  plan.validate();
  Runner runner{field, constants, noise, options};
  SpinState s{0.0, 0.0, 1.0};
  for (const auto& segment : plan.segments) {
    s = std::visit([&](const auto& seg) { return runner(s, seg); }, segment);
  }
  return s;
}

double execute(const SequencePlan& plan, double field, const PhysicalConstants& constants,
               const FieldTrajectory* noise, const ExecuteOptions& options) {
  return -execute_state(plan, field, constants, noise, options).z;
}

}  // namespace geomag
