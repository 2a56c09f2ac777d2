#include "geomag/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geomag/errors.hpp"

namespace geomag {

namespace {

struct SlopeTolerance {
  double sigma = 0.0;  // slope standard deviation from signal noise
  double floor = 0.0;  // central-difference truncation allowance
  double total() const { return 3.0 * sigma + floor; }
};

// A central difference over step h misses the derivative by h^2 |P'''| / 24;
// |P'''| <= 3 k^3 when the cosine argument changes at rate at most k.
SlopeTolerance slope_tolerance(const Measurement& m, double step, double max_rate) {
  SlopeTolerance tol;
  tol.sigma = std::sqrt(2.0) * m.sigma / step;
  tol.floor = 3.0 * step * step * max_rate * max_rate * max_rate / 24.0 + 1e-12 * max_rate;
  return tol;
}

double clamp_signal(const Measurement& m, bool& clamped) {
  clamped = std::abs(m.signal) > 1.0;
  return std::clamp(m.signal, -1.0, 1.0);
}

}  // namespace

FieldEstimate estimate_geometric(const GeometricModel& model, const Measurement& measurement) {
  model.validate();
  if (!measurement.slope) throw InvalidParameter("geometric estimation needs a slope measurement");
  if (!(measurement.sigma >= 0.0)) throw InvalidParameter("sigma must be >= 0");
  if (!std::isfinite(measurement.signal)) throw InvalidParameter("signal must be finite");
  if (std::abs(measurement.signal) > 1.0 + 3.0 * measurement.sigma) {
    throw OutOfRange("signal magnitude exceeds 1 beyond the noise allowance");
  }
  bool clamped = false;
  const double p = clamp_signal(measurement, clamped);

  const double b_max = berry_field_range(model);
  const double step = measurement.slope_step > 0.0 ? measurement.slope_step : b_max / 1e3;
  const double full = 4.0 * kPi * model.rotations;
  const double max_rate = full * model.constants.gamma / model.rabi;
  const SlopeTolerance tol = slope_tolerance(measurement, step, max_rate);

  // Arguments on [pi, 4 pi N] map one-to-one onto [0, B_max].
  struct Candidate {
    double argument;
    double field;
    double slope;
  };
  std::vector<Candidate> candidates;
  const double base = std::acos(p);
  for (int m = 0; m <= 2 * model.rotations; ++m) {
    for (double branch : {base, -base}) {
      const double arg = branch + kTwoPi * m;
      if (arg < kPi * (1.0 - 1e-12) || arg > full * (1.0 + 1e-12)) continue;
      const double a = std::clamp(arg, kPi, full);
      const bool duplicate = std::any_of(candidates.begin(), candidates.end(), [&](const Candidate& c) {
        return std::abs(c.argument - a) <= 1e-12 * full;
      });
      if (duplicate) continue;
      const double b = berry_field_from_argument(model, a);
      candidates.push_back({a, b, berry_slope(model, b)});
    }
  }
  if (candidates.empty()) throw OutOfRange("no field in [0, B_max] reproduces the signal");

  const double measured = *measurement.slope;
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
    return std::abs(measured - x.slope) < std::abs(measured - y.slope);
  });
  const Candidate& best = candidates.front();
  FieldEstimate out;
  out.field = best.field;
  out.candidates_considered = candidates.size();
  out.lobe_index = static_cast<int>(std::floor((full - best.argument) / kTwoPi));
  out.lobe_index = std::clamp(out.lobe_index, 0, 2 * model.rotations - 1);
  out.clamped = clamped;
  out.slope_consistent = std::abs(measured - best.slope) <= tol.total();
  out.confidence = std::numeric_limits<double>::infinity();
  if (candidates.size() > 1) {
    const double margin =
        std::abs(measured - candidates[1].slope) - std::abs(measured - best.slope);
    out.confidence = margin / tol.total();
    if (margin <= tol.total()) {
      std::vector<double> fields;
      for (const auto& c : candidates) {
        if (std::abs(measured - c.slope) - std::abs(measured - best.slope) <= tol.total()) {
          fields.push_back(c.field);
        }
      }
      std::sort(fields.begin(), fields.end());
      throw Unresolvable("several fields match the measured signal and slope", std::move(fields));
    }
  }
  return out;
}

std::vector<FieldEstimate> estimate_dynamic(const DynamicModel& model,
                                            const Measurement& measurement, FieldInterval window) {
  model.validate();
  if (!(measurement.sigma >= 0.0)) throw InvalidParameter("sigma must be >= 0");
  if (!std::isfinite(measurement.signal)) throw InvalidParameter("signal must be finite");
  bool clamped = false;
  const double p = clamp_signal(measurement, clamped);
  const auto fields = ramsey_ambiguities(model, p, window);

  const double gt = model.constants.gamma * model.interaction_time;
  const double step =
      measurement.slope_step > 0.0 ? measurement.slope_step : ramsey_field_range(model) / 1e3;
  const SlopeTolerance tol = slope_tolerance(measurement, step, gt);

  std::vector<FieldEstimate> out;
  out.reserve(fields.size());
  for (double b : fields) {
    FieldEstimate e;
    e.field = b;
    e.candidates_considered = fields.size();
    e.lobe_index = static_cast<int>(std::floor(gt * b / kTwoPi));
    e.clamped = clamped;
    if (measurement.slope) {
      const double miss = std::abs(*measurement.slope - ramsey_slope(model, b));
      e.slope_consistent = miss <= tol.total();
      e.confidence = tol.total() > 0.0 ? 1.0 - miss / tol.total() : 0.0;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace geomag
