#include "geomag/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "geomag/errors.hpp"
#include "parallel.hpp"

namespace geomag {

namespace {

double sinc(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

// F(wT) / w^2 through sinc, finite at w = 0.
double filter_weight(FilterKind kind, double omega, double t) {
  if (kind == FilterKind::GeometricF0) {
    const double s = sinc(0.5 * omega * t);
    return 0.5 * t * t * s * s;
  }
  const double u = 0.25 * omega * t;
  const double s = sinc(u);
  const double sn = std::sin(u);
  return 0.5 * t * t * s * s * sn * sn;
}

double filter_max(FilterKind kind) { return kind == FilterKind::GeometricF0 ? 2.0 : 8.0; }
double filter_mean(FilterKind kind) { return kind == FilterKind::GeometricF0 ? 1.0 : 3.0; }

constexpr double kTruncation = 1e-8;
constexpr double kMaxPeriods = 1 << 20;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_time_grid(std::span<const double> times) {
  if (times.empty()) throw InvalidParameter("time grid is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || !std::isfinite(times[i])) {
      throw InvalidParameter("time grid values must be positive");
    }
    if (i > 0 && !(times[i] > times[i - 1])) throw InvalidParameter("time grid must be increasing");
  }
}

}  // namespace

QuadratureResult filter_integral(const SpectralDensity& density, FilterKind kind,
                                 double interaction_time, const QuadratureSpec& spec) {
  if (!(interaction_time > 0.0) || !std::isfinite(interaction_time)) {
    throw InvalidParameter("interaction time must be > 0");
  }
  QuadratureResult out;
  if (density.is_zero()) return out;

  const double t = interaction_time;
  const double period = kTwoPi / t;
  const double support = density.support_end();
  auto integrand = [&](double w) { return density(w) * filter_weight(kind, w, t); };

  std::vector<double> knees;
  for (double s : density.scales()) {
    for (double m : {1e-2, 1e-1, 1.0, 10.0, 100.0}) knees.push_back(m * s);
  }
  auto breakpoints = [&](double a, double b) {
    std::vector<double> pts{a, b};
    const auto first = static_cast<long long>(std::ceil(a / period));
    const auto last = static_cast<long long>(std::floor(b / period));
    for (long long k = first; k <= last; ++k) pts.push_back(static_cast<double>(k) * period);
    for (double k : knees) {
      if (k > a && k < b) pts.push_back(k);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  };

  double lo = 0.0;
  double hi = std::min(64.0 * period, support);
  double value = 0.0;
  double error = 0.0;
  double worst_error = -1.0;
  for (;;) {
    QuadratureSpec segment = spec;
    if (lo > 0.0) segment.abs_tol = std::max(spec.abs_tol, 0.1 * spec.rel_tol * std::abs(value));
    const auto pts = breakpoints(lo, hi);
    const QuadratureResult r = integrate_adaptive(integrand, pts, segment);
    value += r.value;
    error += r.error;
    out.subdivisions += r.subdivisions;
    out.evaluations += r.evaluations;
    if (r.error > worst_error) {
      worst_error = r.error;
      out.worst_point = r.worst_point;
    }
    if (hi >= support) break;
    const double g = density(hi) / (hi * hi);
    if (g * filter_max(kind) * period <= kTruncation * std::abs(value) ||
        hi >= kMaxPeriods * period) {
      break;
    }
    lo = hi;
    hi = std::min(4.0 * hi, support);
  }

  if (hi < support) {
    // Beyond the cutoff the filter averages to its mean over each period; the
    // residual oscillation is bounded by one period's worth of the envelope.
    const double g = density(hi) / (hi * hi);
    value += filter_mean(kind) * density.tail_integral(hi);
    const double tail_error = filter_max(kind) * period / kTwoPi * g;
    error += tail_error;
    if (tail_error > worst_error) out.worst_point = hi;
  }
  out.value = value / kPi;
  out.error = error / kPi;
  if (out.error > std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value))) {
    throw QuadratureFailure("decoherence integral missed its error target (estimate " +
                                std::to_string(out.error) + ")",
                            out.error, out.worst_point);
  }
  return out;
}

DecoherenceTerms decoherence_function(const SpectralDensity& density, double adiabaticity,
                                      double interaction_time, const QuadratureSpec& spec) {
  if (!(adiabaticity >= 0.0) || !std::isfinite(adiabaticity)) {
    throw InvalidParameter("adiabaticity must be >= 0");
  }
  DecoherenceTerms terms;
  const double a2 = adiabaticity * adiabaticity;
  if (a2 > 0.0) {
    const auto geo = filter_integral(density, FilterKind::GeometricF0, interaction_time, spec);
    terms.geometric = a2 * geo.value;
    terms.error += a2 * geo.error;
  } else if (!(interaction_time > 0.0)) {
    throw InvalidParameter("interaction time must be > 0");
  }
  const auto dyn = filter_integral(density, FilterKind::DynamicF1, interaction_time, spec);
  terms.dynamic = dyn.value;
  terms.error += dyn.error;
  terms.total = terms.geometric + terms.dynamic;
  return terms;
}

double ramsey_chi(const SpectralDensity& density, double t, const QuadratureSpec& spec) {
  return filter_integral(density, FilterKind::GeometricF0, t, spec).value;
}

double hahn_chi(const SpectralDensity& density, double t, const QuadratureSpec& spec) {
  return filter_integral(density, FilterKind::DynamicF1, t, spec).value;
}

double decay_time(const std::function<double(double)>& chi, double guess, double level) {
  if (!(guess > 0.0)) throw InvalidParameter("decay-time guess must be > 0");
  if (!(level > 0.0)) throw InvalidParameter("decay level must be > 0");
  double lo = guess;
  double hi = guess;
  double f_lo = chi(guess) - level;
  double f_hi = f_lo;
  if (f_lo < 0.0) {
    int i = 0;
    for (; i < 200 && f_hi < 0.0; ++i) {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      f_hi = chi(hi) - level;
    }
    if (f_hi < 0.0) throw ConvergenceFailure("chi never reaches the decay level", -f_hi);
  } else {
    int i = 0;
    for (; i < 200 && f_lo >= 0.0; ++i) {
      hi = lo;
      f_hi = f_lo;
      lo *= 0.5;
      f_lo = chi(lo) - level;
    }
    if (f_lo >= 0.0) throw ConvergenceFailure("chi exceeds the decay level at all times", f_lo);
  }
  if (f_hi == 0.0) return hi;
  boost::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      [&](double x) { return chi(x) - level; }, lo, hi, f_lo, f_hi,
      boost::math::tools::eps_tolerance<double>(44), iterations);
  return 0.5 * (bracket.first + bracket.second);
}

T2gFit fit_t2g(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw InvalidParameter("times and values differ in length");
  if (times.size() < 4) throw FitFailure("T2g fit needs at least four samples");
  double t_min = std::numeric_limits<double>::infinity();
  double t_max = 0.0;
  double v_min = std::numeric_limits<double>::infinity();
  double v_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(values[i])) {
      throw InvalidParameter("T2g samples must have nonnegative times and finite values");
    }
    if (times[i] > 0.0) t_min = std::min(t_min, times[i]);
    t_max = std::max(t_max, times[i]);
    v_min = std::min(v_min, values[i]);
    v_max = std::max(v_max, values[i]);
  }
  if (!(t_max > 0.0) || !(t_min < t_max)) throw FitFailure("T2g fit needs distinct sample times");
  if (v_max - v_min <= 1e-12 * std::max(1.0, std::abs(v_max))) {
    throw FitFailure("no decay detected: samples are constant");
  }

  // For fixed T2g the amplitude is linear, so the residual is profiled in closed form.
  auto profile = [&](double log_tau, double* amplitude) {
    const double tau = std::exp(log_tau);
    double ye = 0.0;
    double ee = 0.0;
    double yy = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double r = times[i] / tau;
      const double e = std::exp(-r * r);
      ye += values[i] * e;
      ee += e * e;
      yy += values[i] * values[i];
    }
    if (amplitude) *amplitude = ee > 0.0 ? ye / ee : 0.0;
    return ee > 0.0 ? yy - ye * ye / ee : yy;
  };

  const double a = std::log(0.02 * t_min);
  const double b = std::log(50.0 * t_max);
  constexpr int kGrid = 600;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double x = a + (b - a) * i / kGrid;
    const double r = profile(x, nullptr);
    if (r < best_value) {
      best_value = r;
      best = i;
    }
  }
  if (best == 0 || best == kGrid) throw FitFailure("no decay detected: T2g fit hit the search boundary");
  const double step = (b - a) / kGrid;
  const double left = a + step * (best - 1);
  const double right = a + step * (best + 1);
  const auto m = boost::math::tools::brent_find_minima(
      [&](double x) { return profile(x, nullptr); }, left, right, 26);

  T2gFit fit;
  const double rss = profile(m.first, &fit.amplitude);
  fit.t2g = std::exp(m.first);
  fit.residual = std::sqrt(std::max(rss, 0.0) / static_cast<double>(times.size()));
  if (!(fit.amplitude > 0.0)) throw FitFailure("no decay detected: fitted amplitude is not positive");
  return fit;
}

CoherenceCurve coherence_decay(const SpectralDensity& density, double adiabaticity,
                               std::span<const double> times, const QuadratureSpec& spec) {
  check_time_grid(times);
  CoherenceCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.values.reserve(times.size());
  for (double t : times) {
    curve.values.push_back(std::exp(-decoherence_function(density, adiabaticity, t, spec).total));
  }
  if (times.size() >= 4) {
    try {
      curve.fit = fit_t2g(curve.times, curve.values);
    } catch (const FitFailure&) {
    }
  }
  return curve;
}

NoiseCalibration calibrate_noise(double ramsey_target, double echo_target,
                                 const QuadratureSpec& spec) {
  if (!(ramsey_target > 0.0) || !(echo_target > 0.0) || !std::isfinite(ramsey_target) ||
      !std::isfinite(echo_target)) {
    throw InvalidParameter("calibration targets must be positive");
  }
  auto unit = [](double tau) { return SpectralDensity{Lorentzian{1.0, tau}}; };
  auto mismatch = [&](double log_tau) {
    const auto s = unit(std::exp(log_tau));
    return std::log(hahn_chi(s, echo_target, spec)) - std::log(ramsey_chi(s, ramsey_target, spec));
  };
  auto finish = [&](double tau) {
    NoiseCalibration cal;
    cal.bath = {1.0 / std::sqrt(ramsey_chi(unit(tau), ramsey_target, spec)), tau};
    const SpectralDensity s{cal.bath};
    cal.ramsey_time = decay_time([&](double t) { return ramsey_chi(s, t, spec); }, ramsey_target);
    cal.echo_time = decay_time([&](double t) { return hahn_chi(s, t, spec); }, echo_target);
    cal.residual = std::max(std::abs(cal.ramsey_time / ramsey_target - 1.0),
                            std::abs(cal.echo_time / echo_target - 1.0));
    return cal;
  };

  const double a = std::log(1e-4 * ramsey_target);
  const double b = std::log(1e4 * std::max(ramsey_target, echo_target));
  constexpr int kGrid = 96;
  double x_prev = a;
  double h_prev = mismatch(a);
  double best_x = a;
  double best_h = std::abs(h_prev);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = a + (b - a) * i / kGrid;
    const double h = mismatch(x);
    if (std::abs(h) < best_h) {
      best_h = std::abs(h);
      best_x = x;
    }
    if ((h_prev > 0.0) != (h > 0.0) || h == 0.0) {
      boost::uintmax_t iterations = 100;
      const auto root = boost::math::tools::toms748_solve(
          mismatch, x_prev, x, h_prev, h, boost::math::tools::eps_tolerance<double>(40), iterations);
      NoiseCalibration cal = finish(std::exp(0.5 * (root.first + root.second)));
      if (cal.residual > 0.05) {
        throw CalibrationFailure("calibrated Lorentzian misses a target by more than 5%",
                                 cal.residual);
      }
      return cal;
    }
    x_prev = x;
    h_prev = h;
  }
  double residual = std::numeric_limits<double>::infinity();
  try {
    residual = finish(std::exp(best_x)).residual;
  } catch (const Error&) {
  }
  throw CalibrationFailure("no Lorentzian bath reproduces both coherence times", residual);
}

FieldTrajectory ou_trajectory(const Lorentzian& bath, double duration, double dt,
                              std::uint64_t seed, std::uint64_t stream,
                              const PhysicalConstants& constants) {
  const SpectralDensity check{bath};
  constants.validate();
  if (!(duration > 0.0) || !std::isfinite(duration)) throw InvalidParameter("duration must be > 0");
  if (!(dt > 0.0)) throw InvalidParameter("sample interval must be > 0");
  if (dt > bath.correlation_time / 10.0 * (1.0 + 1e-12)) {
    throw InvalidParameter("sample interval exceeds tau_c / 10");
  }
  const auto n = static_cast<std::size_t>(std::ceil(duration / dt * (1.0 - 1e-12))) + 1;
  std::mt19937_64 rng(splitmix64(splitmix64(seed) ^ stream));
  std::normal_distribution<double> normal;
  const double decay = std::exp(-dt / bath.correlation_time);
  const double kick = bath.delta * std::sqrt(-std::expm1(-2.0 * dt / bath.correlation_time));
  std::vector<double> samples(n);
  double x = bath.delta * normal(rng);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = x / constants.gamma;
    x = x * decay + kick * normal(rng);
  }
  return FieldTrajectory(dt, std::move(samples));
}

std::vector<OverlayRow> spectral_overlay(const SpectralDensity& density, double adiabaticity,
                                         double interaction_time, std::span<const double> omegas) {
  if (!(interaction_time > 0.0)) throw InvalidParameter("interaction time must be > 0");
  if (!(adiabaticity >= 0.0)) throw InvalidParameter("adiabaticity must be >= 0");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] > 0.0) || (i > 0 && !(omegas[i] > omegas[i - 1]))) {
      throw InvalidParameter("overlay frequencies must be positive and increasing");
    }
  }
  std::vector<OverlayRow> rows;
  rows.reserve(omegas.size());
  const double a2 = adiabaticity * adiabaticity;
  for (double w : omegas) {
    rows.push_back({w, density(w), a2 * filter_weight(FilterKind::GeometricF0, w, interaction_time),
                    filter_weight(FilterKind::DynamicF1, w, interaction_time)});
  }
  return rows;
}

std::vector<EnsemblePoint> monte_carlo_decay(const std::function<SequencePlan(double)>& build,
                                             std::span<const double> times, double field,
                                             const Lorentzian& bath,
                                             const PhysicalConstants& constants,
                                             const EnsembleOptions& options) {
  check_time_grid(times);
  if (options.trajectories < 2) throw InvalidParameter("ensemble needs at least two trajectories");
  std::vector<SequencePlan> plans;
  double longest = 0.0;
  for (double t : times) {
    plans.push_back(build(t));
    longest = std::max(longest, plans.back().evolution_time());
  }
  if (!(longest > 0.0)) throw InvalidParameter("sequences have no evolution time");
  const double dt = options.sample_interval > 0.0
                        ? options.sample_interval
                        : std::min(bath.correlation_time / 10.0, longest / 1024.0);

  const std::size_t n = options.trajectories;
  const std::size_t m = plans.size();
  std::vector<double> signals(n * m);
  detail::parallel_for(n, options.workers, [&](std::size_t i) {
    const auto noise = ou_trajectory(bath, longest, dt, options.seed, i, constants);
    for (std::size_t j = 0; j < m; ++j) {
      signals[i * m + j] = execute(plans[j], field, constants, &noise, options.execute);
    }
  });

  std::vector<EnsemblePoint> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = signals[i * m + j];
      sum += p;
      sum2 += p * p;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, (sum2 - sum * mean) / static_cast<double>(n - 1));
    out[j] = {times[j], mean, std::sqrt(var / static_cast<double>(n))};
  }
  return out;
}

}  // namespace geomag
