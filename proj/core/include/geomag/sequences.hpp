#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geomag/spin.hpp"
#include "geomag/trajectory.hpp"
#include "geomag/units.hpp"

namespace geomag {

struct IdealPulse {
  double axis_phase = 0.0;
  double angle = 0.0;
};

struct FreeEvolution {
  double duration = 0.0;
};

/// Constant-amplitude drive whose phase advances linearly:
/// phase(t) = phase_start + phase_rate * t for t in [0, duration].
struct SweptDrive {
  double rabi = 0.0;
  double phase_start = 0.0;
  double phase_rate = 0.0;
  double duration = 0.0;
};

using Segment = std::variant<IdealPulse, FreeEvolution, SweptDrive>;

enum class Protocol { Ramsey, Hahn, Berry };

std::string_view to_string(Protocol protocol);
std::optional<Protocol> parse_protocol(std::string_view name);

struct ControlParams {
  std::optional<double> rabi;   // rad/s, Berry only
  std::optional<int> rotations;  // N, Berry only
  double interaction_time = 0.0;
};

struct SequencePlan {
  Protocol protocol = Protocol::Ramsey;
  std::string label;
  std::vector<Segment> segments;
  ControlParams control;

  /// Sum of free-evolution and swept-drive durations.
  double evolution_time() const;
  /// Checks segment invariants and, for Berry plans, the mirrored-sweep layout.
  void validate() const;
};

/// Pulse axes. The refocusing pi pulse sits 90 degrees from the pi/2 pulses by
/// default; with a same-axis pi pulse the Berry sequence no longer cancels the
/// dynamic phase.
struct PulseAxes {
  double preparation = 0.0;
  double refocus = kPi / 2.0;
};

SequencePlan build_ramsey(double interaction_time, const PulseAxes& axes = {});
SequencePlan build_hahn(double interaction_time, const PulseAxes& axes = {});
SequencePlan build_berry(double rabi, int rotations, double interaction_time,
                         const PulseAxes& axes = {});

enum class Integrator {
  /// Exact rotations; swept drives are solved in the frame co-rotating with the
  /// drive phase. Falls back to the mesh integrator when noise is present.
  Auto,
  /// Mesh integration of every swept or noisy segment in the laboratory frame.
  LabFrameMesh,
};

struct ExecuteOptions {
  Integrator integrator = Integrator::Auto;
  StepControl step;
};

/// Runs the plan from (0, 0, 1) with detuning gamma * (field + noise(t)) and
/// returns the final Bloch vector just before readout.
SpinState execute_state(const SequencePlan& plan, double field, const PhysicalConstants& constants,
                        const FieldTrajectory* noise = nullptr, const ExecuteOptions& options = {});

/// Population-difference signal P = -s_z of the final state, so that zero
/// accumulated phase reads as P = +1 (P = cos phi).
double execute(const SequencePlan& plan, double field, const PhysicalConstants& constants,
               const FieldTrajectory* noise = nullptr, const ExecuteOptions& options = {});

}  // namespace geomag
