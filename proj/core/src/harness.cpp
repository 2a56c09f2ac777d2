#include "geomag/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geomag/errors.hpp"
#include "parallel.hpp"

namespace geomag {

namespace {

std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  return seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1));
}

struct GridPoint {
  std::optional<double> rabi;
  std::optional<int> rotations;
  double interaction_time = 0.0;
};

std::vector<GridPoint> expand(const SweepSpec& spec) {
  std::vector<GridPoint> points;
  if (spec.protocol == Protocol::Berry) {
    for (double w : spec.rabi) {
      for (int n : spec.rotations) {
        for (double t : spec.interaction_time) points.push_back({w, n, t});
      }
    }
  } else {
    for (double t : spec.interaction_time) points.push_back({std::nullopt, std::nullopt, t});
  }
  return points;
}

SequencePlan plan_for(const SweepSpec& spec, const GridPoint& p, double t) {
  switch (spec.protocol) {
    case Protocol::Ramsey: return build_ramsey(t, spec.axes);
    case Protocol::Hahn: return build_hahn(t, spec.axes);
    case Protocol::Berry: return build_berry(*p.rabi, *p.rotations, t, spec.axes);
  }
  throw InvalidParameter("unknown protocol");
}

// Largest central-difference slope of a sampled curve.
SensitivityReport curve_sensitivity(std::span<const double> field, std::span<const double> signal,
                                    double t, const SensitivityOptions& options) {
  SensitivityReport report;
  report.sigma_p = options.sigma_p;
  report.overhead = options.overhead;
  for (std::size_t i = 1; i + 1 < field.size(); ++i) {
    const double s = std::abs((signal[i + 1] - signal[i - 1]) / (field[i + 1] - field[i - 1]));
    if (s > report.max_slope) {
      report.max_slope = s;
      report.field_at_max_slope = field[i];
    }
  }
  if (!(report.max_slope >= 1e-15)) throw DegenerateSlope("sampled signal has no slope");
  report.eta = options.sigma_p * std::sqrt(t + options.overhead) / report.max_slope;
  return report;
}

SweepRecord evaluate_point(const SweepSpec& spec, const GridPoint& p, std::size_t index) {
  SweepRecord rec;
  rec.index = index;
  rec.rabi = p.rabi;
  rec.rotations = p.rotations;
  rec.interaction_time = p.interaction_time;
  const double t = p.interaction_time;
  const auto& k = spec.constants;
  try {
    if (spec.protocol == Protocol::Berry) {
      rec.adiabaticity = adiabaticity(*p.rabi, *p.rotations, t, 0.0, k).exact;
    }
    const DynamicModel dyn{t, k};
    GeometricModel geo;
    if (spec.protocol == Protocol::Berry) geo = {*p.rabi, *p.rotations, k};

    const SequencePlan plan = plan_for(spec, p, t);
    FieldFunction base;  // P(B) for one hyperfine line, offset in rad/s
    std::function<double(double, double)> line;
    if (spec.engine == Engine::Analytic) {
      if (spec.protocol == Protocol::Ramsey) {
        line = [dyn](double b, double off) { return ramsey_signal_offset(dyn, b, off); };
      } else {
        line = [geo](double b, double off) { return berry_signal_offset(geo, b, off); };
      }
    } else {
      line = [&spec, &plan, &k](double b, double off) {
        return execute(plan, b + off / k.gamma, k, nullptr, spec.execute);
      };
    }
    const HyperfineModel hf = HyperfineModel::triplet(k.hyperfine_splitting);
    FieldFunction signal_fn = [&](double b) {
      if (!spec.hyperfine) return line(b, 0.0);
      return hyperfine_average([&](double off) { return line(b, off); }, hf);
    };

    if (spec.protocol == Protocol::Ramsey) rec.field_range = ramsey_field_range(dyn);
    if (spec.protocol == Protocol::Berry) rec.field_range = berry_field_range(geo);

    if (spec.engine == Engine::NumericNoise) {
      const Lorentzian bath = *spec.bath;
      const double dt = std::min(bath.correlation_time / 10.0, plan.evolution_time() / 1024.0);
      std::vector<double> sum(spec.field.size(), 0.0);
      const std::uint64_t seed = point_seed(spec.seed, index);
      for (std::size_t i = 0; i < spec.ensemble; ++i) {
        const auto noise = ou_trajectory(bath, plan.evolution_time(), dt, seed, i, k);
        for (std::size_t j = 0; j < spec.field.size(); ++j) {
          sum[j] += execute(plan, spec.field[j], k, &noise, spec.execute);
        }
      }
      for (double s : sum) rec.signal.push_back(s / static_cast<double>(spec.ensemble));
    } else {
      for (double b : spec.field) rec.signal.push_back(signal_fn(b));
    }

    if (spec.compute_sensitivity && spec.protocol != Protocol::Hahn) {
      if (spec.engine == Engine::NumericNoise) {
        rec.sensitivity = curve_sensitivity(spec.field, rec.signal, t, spec.sensitivity);
      } else {
        SensitivityOptions opts = spec.sensitivity;
        if (spec.protocol == Protocol::Berry) {
          opts.grid_points = std::max<std::size_t>(opts.grid_points, 256 * static_cast<std::size_t>(*p.rotations));
        }
        FieldFunction slope_fn;
        if (spec.engine == Engine::Analytic && !spec.hyperfine) {
          if (spec.protocol == Protocol::Ramsey) {
            slope_fn = [dyn](double b) { return ramsey_slope(dyn, b); };
          } else {
            slope_fn = [geo](double b) { return berry_slope(geo, b); };
          }
        }
        rec.sensitivity = sensitivity(signal_fn, slope_fn, {0.0, *rec.field_range}, t, opts);
      }
    }

    if (!spec.coherence_times.empty()) {
      const SpectralDensity density{*spec.bath};
      std::vector<double> values;
      if (spec.engine == Engine::NumericNoise) {
        EnsembleOptions eo;
        eo.trajectories = spec.ensemble;
        eo.seed = point_seed(spec.seed, index) ^ 0x5bd1e995ULL;
        eo.execute = spec.execute;
        const auto pts = monte_carlo_decay([&](double tt) { return plan_for(spec, p, tt); },
                                           spec.coherence_times, 0.0, *spec.bath, k, eo);
        for (const auto& e : pts) values.push_back(e.mean);
      } else {
        for (double tt : spec.coherence_times) {
          double chi = 0.0;
          switch (spec.protocol) {
            case Protocol::Ramsey: chi = ramsey_chi(density, tt); break;
            case Protocol::Hahn: chi = hahn_chi(density, tt); break;
            case Protocol::Berry:
              chi = decoherence_function(density,
                                         adiabaticity(*p.rabi, *p.rotations, tt, 0.0, k).exact, tt)
                        .total;
              break;
          }
          values.push_back(std::exp(-chi));
        }
      }
      rec.t2g = fit_t2g(spec.coherence_times, values);
    }
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::Analytic: return "analytic";
    case Engine::Numeric: return "numeric";
    case Engine::NumericNoise: return "numeric+noise";
  }
  return "?";
}

std::optional<Engine> parse_engine(std::string_view name) {
  if (name == "analytic") return Engine::Analytic;
  if (name == "numeric") return Engine::Numeric;
  if (name == "numeric+noise" || name == "noise") return Engine::NumericNoise;
  return std::nullopt;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw InvalidParameter("grid needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g.back() = hi;
  return g;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > 0.0)) throw InvalidParameter("log grid bounds must be positive");
  auto g = linear_grid(std::log(lo), std::log(hi), n);
  for (double& v : g) v = std::exp(v);
  g.front() = lo;
  if (n > 1) g.back() = hi;
  return g;
}

void SweepSpec::validate() const {
  constants.validate();
  if (interaction_time.empty()) throw InvalidParameter("interaction-time grid is empty");
  for (double t : interaction_time) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("interaction times must be > 0");
  }
  if (field.empty()) throw InvalidParameter("field grid is empty");
  for (double b : field) {
    if (!std::isfinite(b)) throw InvalidParameter("field grid values must be finite");
  }
  if (protocol == Protocol::Berry) {
    if (rabi.empty() || rotations.empty()) throw InvalidParameter("Berry sweep needs rabi and N grids");
    for (double w : rabi) {
      if (!(w > 0.0)) throw InvalidParameter("rabi values must be > 0");
    }
    for (int n : rotations) {
      if (n < 1) throw InvalidParameter("N values must be >= 1");
    }
  } else if (!rabi.empty() || !rotations.empty()) {
    throw InvalidParameter("rabi and N grids apply to the Berry protocol only");
  }
  if (engine == Engine::Analytic && protocol == Protocol::Hahn) {
    throw InvalidParameter("the analytic engine has no Hahn-echo model");
  }
  if (engine == Engine::NumericNoise) {
    if (!bath) throw InvalidParameter("the numeric+noise engine needs a noise bath");
    if (ensemble < 2) throw InvalidParameter("ensemble size must be >= 2");
    if (hyperfine) throw InvalidParameter("hyperfine averaging is not available with noise");
  }
  if (!coherence_times.empty() && !bath) throw InvalidParameter("T2g extraction needs a noise bath");
  if (bath) SpectralDensity check{*bath};
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const SweepRecord& r) { return !r.ok; }));
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto points = expand(spec);
  SweepResult result;
  result.field = spec.field;
  result.records.resize(points.size());
  detail::parallel_for(points.size(), spec.workers, [&](std::size_t i) {
    result.records[i] = evaluate_point(spec, points[i], i);
  });
  return result;
}

SmartControlResult smart_control_curve(const GeometricModel& base, double interaction_time,
                                       std::span<const double> k_grid, double eta_target,
                                       const SensitivityOptions& options) {
  base.validate();
  if (k_grid.empty()) throw InvalidParameter("k grid is empty");
  if (!(interaction_time > 0.0)) throw InvalidParameter("interaction time must be > 0");
  SmartControlResult out;
  std::vector<double> ks(k_grid.begin(), k_grid.end());
  std::sort(ks.begin(), ks.end());
  for (double k : ks) {
    if (!(k > 0.0)) throw InvalidParameter("scale factors must be > 0");
    SmartControlRow row;
    row.k = k;
    row.rabi = k * base.rabi;
    row.rotations = std::max(1, static_cast<int>(std::lround(k * base.rotations)));
    row.adiabaticity =
        adiabaticity(row.rabi, row.rotations, interaction_time, 0.0, base.constants).exact;
    if (row.adiabaticity > 0.1) {
      throw AdiabaticityViolation("adiabaticity exceeds 0.1 at k = " + std::to_string(k), k,
                                  row.adiabaticity);
    }
    const GeometricModel model{row.rabi, row.rotations, base.constants};
    row.field_range = berry_field_range(model);
    SensitivityOptions opts = options;
    opts.grid_points = std::max<std::size_t>(opts.grid_points, 256 * static_cast<std::size_t>(row.rotations));
    row.eta = sensitivity([&](double b) { return berry_signal(model, b); },
                          [&](double b) { return berry_slope(model, b); }, {0.0, row.field_range},
                          interaction_time, opts)
                  .eta;
    out.rows.push_back(row);
  }
  out.eta_reference = eta_target > 0.0 ? eta_target : out.rows.front().eta;
  const double b_ref = out.rows.front().field_range;
  for (auto& row : out.rows) {
    row.eta_ratio = row.eta / out.eta_reference;
    row.field_range_ratio = row.field_range / b_ref;
    out.max_eta_deviation = std::max(out.max_eta_deviation, std::abs(row.eta_ratio - 1.0));
    out.enhancement = std::max(out.enhancement, row.field_range_ratio);
  }
  out.eta_held = out.max_eta_deviation <= 0.1;
  return out;
}

int regime_rank(double a) {
  if (a < 0.1) return 0;
  if (a < 1.0) return 1;
  if (a < 3.0) return 2;
  return 3;
}

std::string_view regime_label(double a) {
  switch (regime_rank(a)) {
    case 0: return "adiabatic";
    case 1: return "intermediate";
    case 2: return "nonadiabatic";
    default: return "strongly-nonadiabatic";
  }
}

NonadiabaticScan nonadiabatic_sensitivity_scan(std::span<const double> a_grid,
                                               double interaction_time,
                                               const SpectralDensity& density,
                                               const NonadiabaticOptions& options) {
  const auto& k = options.constants;
  k.validate();
  if (!(interaction_time > 0.0)) throw InvalidParameter("interaction time must be > 0");
  if (!(options.rabi > 0.0)) throw InvalidParameter("rabi must be > 0");
  for (double a : a_grid) {
    if (!(a > 0.0)) throw InvalidParameter("adiabaticity targets must be > 0");
  }
  const double t = interaction_time;
  NonadiabaticScan scan;
  scan.interaction_time = t;
  scan.rows.resize(a_grid.size());

  const double ramsey_attenuation = std::exp(-ramsey_chi(density, t, options.quadrature));
  const DynamicModel dyn{t, k};
  const double eta_dyn =
      sensitivity(nullptr, [&](double b) { return ramsey_attenuation * ramsey_slope(dyn, b); },
                  {0.0, ramsey_field_range(dyn)}, t, options.sensitivity)
          .eta;

  detail::parallel_for(a_grid.size(), options.workers, [&](std::size_t i) {
    NonadiabaticRow row;
    row.target_adiabaticity = a_grid[i];
    row.rabi = options.rabi;
    row.rotations =
        std::max(1, static_cast<int>(std::lround(a_grid[i] * options.rabi * t / kTwoPi)));
    row.adiabaticity = adiabaticity(row.rabi, row.rotations, t, 0.0, k).exact;
    row.attenuation =
        std::exp(-decoherence_function(density, row.adiabaticity, t, options.quadrature).total);
    const SequencePlan plan = build_berry(row.rabi, row.rotations, t);
    const double sweep = 4.0 * kPi * row.rotations / t;
    const double b_hi = (2.0 * sweep + 2.0 * row.rabi) / k.gamma;
    const double step =
        std::min(row.rabi / (2.0 * row.rotations), kTwoPi / t) / (16.0 * k.gamma);
    SensitivityOptions opts = options.sensitivity;
    opts.grid_points = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(b_hi / step)) + 1,
                                               opts.grid_points, 2'000'000);
    const double att = row.attenuation;
    const auto report = sensitivity([&](double b) { return att * execute(plan, b, k); }, nullptr,
                                    {0.0, b_hi}, t, opts);
    row.eta_geometric = report.eta;
    row.max_slope = report.max_slope;
    row.field_at_max_slope = report.field_at_max_slope;
    row.eta_dynamic = eta_dyn;
    scan.rows[i] = row;
  });
  for (const auto& row : scan.rows) {
    if (row.eta_geometric < row.eta_dynamic &&
        (!scan.crossover || row.adiabaticity < *scan.crossover)) {
      scan.crossover = row.adiabaticity;
    }
  }
  return scan;
}

std::vector<RegimeRow> decoherence_regime_scan(std::span<const double> a_grid,
                                               const Lorentzian& bath, RegimeEngine engine,
                                               const RegimeOptions& options) {
  const SpectralDensity density{bath};
  if (options.samples < 4) throw InvalidParameter("regime scan needs at least four samples per A");
  std::vector<RegimeRow> rows(a_grid.size());
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    RegimeRow& row = rows[i];
    const double a = a_grid[i];
    row.adiabaticity = a;
    try {
      if (!(a >= 0.0)) throw InvalidParameter("adiabaticity must be >= 0");
      row.label = regime_label(a);
      if (engine == RegimeEngine::FilterIntegral && regime_rank(a) == 3) {
        throw InvalidParameter("strongly nonadiabatic A needs the Monte-Carlo engine");
      }
      auto chi = [&](double t) { return decoherence_function(density, a, t, options.quadrature).total; };
      const double guess = bath.delta > 0.0 ? std::sqrt(2.0) / bath.delta : bath.correlation_time;
      const double t_e = decay_time(chi, guess);
      std::vector<double> times;
      for (double f : linear_grid(0.1, 2.0, options.samples)) times.push_back(f * t_e);
      if (engine == RegimeEngine::FilterIntegral) {
        row.curve = coherence_decay(density, a, times, options.quadrature);
      } else {
        const double rabi = options.rabi;
        EnsembleOptions eo;
        eo.trajectories = options.ensemble;
        eo.seed = point_seed(options.seed, i);
        eo.workers = options.workers;
        auto build = [&](double t) {
          const int n = std::max(1, static_cast<int>(std::lround(a * rabi * t / kTwoPi)));
          return build_berry(rabi, n, t);
        };
        const auto pts = monte_carlo_decay(build, times, 0.0, bath, options.constants, eo);
        row.curve.times = times;
        for (const auto& p : pts) row.curve.values.push_back(p.mean);
      }
      const T2gFit fit = fit_t2g(row.curve.times, row.curve.values);
      row.curve.fit = fit;
      row.t2g = fit.t2g;
      row.fit_residual = fit.residual;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  }
  return rows;
}

PowerLawFit regime_slope(std::span<const RegimeRow> rows, double lo, double hi) {
  std::vector<std::vector<double>> columns(1);
  std::vector<double> y;
  for (const auto& r : rows) {
    if (r.ok && r.adiabaticity > lo && r.adiabaticity < hi) {
      columns[0].push_back(r.adiabaticity);
      y.push_back(r.t2g);
    }
  }
  return fit_power_law(columns, y, {Control::Adiabaticity});
}

}  // namespace geomag
