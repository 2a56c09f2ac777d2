#include "geomag/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geomag/errors.hpp"

namespace geomag {

void DynamicModel::validate() const {
  constants.validate();
  if (!(interaction_time > 0.0)) throw InvalidParameter("interaction time must be > 0");
}

void GeometricModel::validate() const {
  constants.validate();
  if (!(rabi > 0.0)) throw InvalidParameter("rabi must be > 0");
  if (rotations < 1) throw InvalidParameter("rotation count N must be >= 1");
}

double ramsey_signal(const DynamicModel& model, double field) {
  return std::cos(model.constants.gamma * field * model.interaction_time);
}

double ramsey_slope(const DynamicModel& model, double field) {
  const double gt = model.constants.gamma * model.interaction_time;
  return -gt * std::sin(gt * field);
}

double ramsey_signal_offset(const DynamicModel& model, double field, double detuning_offset) {
  return std::cos((model.constants.gamma * field + detuning_offset) * model.interaction_time);
}

std::vector<double> ramsey_ambiguities(const DynamicModel& model, double measured_signal,
                                       FieldInterval window) {
  model.validate();
  if (!(std::abs(measured_signal) <= 1.0)) {
    throw InvalidParameter("measured signal must lie in [-1, 1]");
  }
  std::vector<double> out;
  if (!(window.hi >= window.lo)) return out;
  const double gt = model.constants.gamma * model.interaction_time;
  const double base = std::acos(measured_signal);
  const double period = kTwoPi / gt;
  const auto m_lo = static_cast<long long>(std::floor(window.lo / period)) - 1;
  const auto m_hi = static_cast<long long>(std::ceil(window.hi / period)) + 1;
  const double eps = 1e-12 * std::max(std::abs(window.lo), std::abs(window.hi));
  for (long long m = m_lo; m <= m_hi; ++m) {
    for (double branch : {base, -base}) {
      const double b = (branch + kTwoPi * static_cast<double>(m)) / gt;
      if (b >= window.lo - eps && b <= window.hi + eps) out.push_back(b);
    }
  }
  std::sort(out.begin(), out.end());
  // acos P = 0 or pi puts both branches on the same field.
  const double merge = 1e-9 * period;
  out.erase(std::unique(out.begin(), out.end(),
                        [merge](double a, double b) { return std::abs(a - b) <= merge; }),
            out.end());
  return out;
}

double ramsey_field_range(const DynamicModel& model) {
  model.validate();
  return kTwoPi / (model.constants.gamma * model.interaction_time);
}

double berry_argument(const GeometricModel& model, double field) {
  const double x = model.constants.gamma * field;
  const double r = std::hypot(x, model.rabi);
  return 4.0 * kPi * model.rotations * (1.0 - x / r);
}

double berry_signal(const GeometricModel& model, double field) {
  return std::cos(berry_argument(model, field));
}

double berry_signal_offset(const GeometricModel& model, double field, double detuning_offset) {
  const double x = model.constants.gamma * field + detuning_offset;
  const double r = std::hypot(x, model.rabi);
  return std::cos(4.0 * kPi * model.rotations * (1.0 - x / r));
}

double berry_slope(const GeometricModel& model, double field) {
  const double x = model.constants.gamma * field;
  const double r = std::hypot(x, model.rabi);
  const double arg = 4.0 * kPi * model.rotations * (1.0 - x / r);
  return std::sin(arg) * 4.0 * kPi * model.rotations * model.constants.gamma * model.rabi *
         model.rabi / (r * r * r);
}

double berry_field_from_argument(const GeometricModel& model, double argument) {
  const double full = 4.0 * kPi * model.rotations;
  if (!(argument > 0.0 && argument <= full)) {
    throw InvalidParameter("Berry argument outside (0, 4 pi N]");
  }
  const double u = 1.0 - argument / full;  // cos theta
  return model.rabi * u / std::sqrt((1.0 - u) * (1.0 + u)) / model.constants.gamma;
}

double berry_field_range(const GeometricModel& model) {
  model.validate();
  return berry_field_from_argument(model, kPi);
}

namespace {

double golden_maximize(const std::function<double(double)>& f, double a, double b, double& best_x) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < 200 && std::abs(b - a) > 1e-14 * std::max(std::abs(a), std::abs(b)); ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  if (fc > fd) {
    best_x = c;
    return fc;
  }
  best_x = d;
  return fd;
}

}  // namespace

SensitivityReport sensitivity(const FieldFunction& signal_fn, const FieldFunction& slope_fn,
                              FieldInterval search, double interaction_time,
                              const SensitivityOptions& options) {
  if (!(interaction_time > 0.0)) throw InvalidParameter("interaction time must be > 0");
  if (!(options.sigma_p > 0.0)) throw InvalidParameter("sigma_P must be > 0");
  if (!(options.overhead >= 0.0)) throw InvalidParameter("overhead must be >= 0");
  if (!(search.hi > search.lo)) throw InvalidParameter("empty sensitivity search interval");
  if (!slope_fn && !signal_fn) throw InvalidParameter("need a signal or slope function");
  const std::size_t n = std::max<std::size_t>(options.grid_points, 3);
  const double grid_step = (search.hi - search.lo) / static_cast<double>(n - 1);

  std::function<double(double)> abs_slope;
  if (slope_fn) {
    abs_slope = [&](double b) { return std::abs(slope_fn(b)); };
  } else {
    const double h = options.difference_step > 0.0 ? options.difference_step : 1e-3 * grid_step;
    abs_slope = [&, h](double b) { return std::abs((signal_fn(b + h) - signal_fn(b - h)) / (2 * h)); };
  }

  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = abs_slope(search.lo + grid_step * static_cast<double>(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double left = search.lo + grid_step * static_cast<double>(best == 0 ? 0 : best - 1);
  const double right = search.lo + grid_step * static_cast<double>(std::min(best + 1, n - 1));
  double best_field = search.lo + grid_step * static_cast<double>(best);
  double refined_field = best_field;
  const double refined = golden_maximize(abs_slope, left, right, refined_field);
  if (refined > best_value) {
    best_value = refined;
    best_field = refined_field;
  }
  if (!(best_value >= 1e-15)) {
    throw DegenerateSlope("maximum signal slope is zero over the search interval");
  }
  SensitivityReport report;
  report.max_slope = best_value;
  report.field_at_max_slope = best_field;
  report.sigma_p = options.sigma_p;
  report.overhead = options.overhead;
  report.eta = options.sigma_p * std::sqrt(interaction_time + options.overhead) / best_value;
  return report;
}

HyperfineModel HyperfineModel::triplet(double splitting) {
  HyperfineModel model;
  model.offsets = {-splitting, 0.0, splitting};
  return model;
}

void HyperfineModel::validate() const {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidParameter("hyperfine weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidParameter("hyperfine weights must sum to 1");
}

double hyperfine_average(const std::function<double(double)>& base, const HyperfineModel& model) {
  model.validate();
  double total = 0.0;
  for (std::size_t i = 0; i < model.offsets.size(); ++i) {
    total += model.weights[i] * base(model.offsets[i]);
  }
  return total;
}

Adiabaticity adiabaticity(double rabi, int rotations, double interaction_time, double field,
                          const PhysicalConstants& constants) {
  if (!(interaction_time > 0.0)) throw InvalidParameter("interaction time must be > 0");
  if (!(rabi > 0.0)) throw InvalidParameter("rabi must be > 0");
  const double sweep_rate = 4.0 * kPi * rotations / interaction_time;
  const double x = constants.gamma * field;
  const double r2 = rabi * rabi + x * x;
  return {sweep_rate * rabi / (2.0 * r2), rotations / (rabi * interaction_time)};
}

}  // namespace geomag
