#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>

#include "format.hpp"
#include "geomag/errors.hpp"
#include "geomag/estimate.hpp"
#include "geomag/harness.hpp"
#include "geomag/noise.hpp"
#include "json.hpp"
#include "version.hpp"

namespace geomag::cli {

namespace {

using Json = nlohmann::ordered_json;

std::vector<KeySpec> common_keys() {
  return {
      {"gamma_ghz_per_t", "28", "gyromagnetic ratio / 2 pi, GHz/T"},
      {"hyperfine_mhz", "2.16", "hyperfine splitting, MHz"},
      {"seed", "1", "random seed"},
      {"workers", "1", "parallel workers"},
      {"out", "", "output path ('-' or empty: standard output)"},
  };
}

std::vector<KeySpec> noise_keys(const std::string& t2star, const std::string& t2) {
  return {
      {"t2star_us", t2star, "Ramsey 1/e time to calibrate the bath to, us"},
      {"t2_us", t2, "Hahn-echo 1/e time to calibrate the bath to, us"},
      {"delta_rad_s", "", "explicit bath amplitude, rad/s (with tau_c_us)"},
      {"tau_c_us", "", "explicit bath correlation time, us (with delta_rad_s)"},
  };
}

std::vector<KeySpec> curve_keys() {
  return {
      {"protocol", "ramsey", "ramsey, hahn or berry"},
      {"engine", "analytic", "analytic, numeric or numeric+noise"},
      {"omega_mhz", "5", "Rabi frequency list, MHz (berry)"},
      {"n", "3", "rotation count list (berry)"},
      {"t_us", "1", "interaction time list, us"},
      {"b_mt", "", "explicit field list, mT (replaces the b_min/b_max grid)"},
      {"b_min_mt", "0", "field grid start, mT"},
      {"b_max_mt", "0.1", "field grid end, mT"},
      {"b_points", "201", "field grid size"},
      {"hyperfine", "false", "average over the hyperfine triplet"},
      {"ensemble", "200", "noise trajectories per point (numeric+noise)"},
  };
}

std::vector<KeySpec> join(std::initializer_list<std::vector<KeySpec>> parts) {
  std::vector<KeySpec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

PhysicalConstants constants_from(const Config& c) {
  PhysicalConstants k;
  k.gamma = kTwoPi * c.number("gamma_ghz_per_t") * 1e9;
  k.hyperfine_splitting = units::mhz_to_angular(c.number("hyperfine_mhz"));
  if (!(k.gamma > 0.0)) c.fail("gamma_ghz_per_t", "must be > 0");
  if (!(k.hyperfine_splitting > 0.0)) c.fail("hyperfine_mhz", "must be > 0");
  return k;
}

unsigned workers_from(const Config& c) {
  const long long w = c.integer("workers");
  if (w < 1 || w > 1024) c.fail("workers", "must be in [1, 1024]");
  return static_cast<unsigned>(w);
}

std::optional<Lorentzian> bath_from(const Config& c) {
  const bool explicit_given = c.given("delta_rad_s") || c.given("tau_c_us");
  const bool targets_given = c.given("t2star_us") || c.given("t2_us");
  if (explicit_given && targets_given) {
    c.fail(c.given("delta_rad_s") ? "delta_rad_s" : "tau_c_us",
           "give either delta_rad_s/tau_c_us or t2star_us/t2_us, not both");
  }
  if (c.has("delta_rad_s") || c.has("tau_c_us")) {
    if (!c.has("delta_rad_s")) c.fail("delta_rad_s", "required together with tau_c_us");
    if (!c.has("tau_c_us")) c.fail("tau_c_us", "required together with delta_rad_s");
    return Lorentzian{c.number("delta_rad_s"), units::us_to_s(c.number("tau_c_us"))};
  }
  if (c.has("t2star_us") || c.has("t2_us")) {
    if (!c.has("t2star_us")) c.fail("t2star_us", "required together with t2_us");
    if (!c.has("t2_us")) c.fail("t2_us", "required together with t2star_us");
    return calibrate_noise(units::us_to_s(c.number("t2star_us")), units::us_to_s(c.number("t2_us")))
        .bath;
  }
  return std::nullopt;
}

std::vector<double> to_seconds(std::vector<double> us) {
  for (double& v : us) v = units::us_to_s(v);
  return us;
}

std::size_t count_from(const Config& c, const std::string& key, long long lo) {
  const long long n = c.integer(key);
  if (n < lo) c.fail(key, "must be >= " + std::to_string(lo));
  return static_cast<std::size_t>(n);
}

std::vector<double> field_grid(const Config& c) {
  std::vector<double> mt;
  if (c.given("b_mt")) {
    mt = c.numbers("b_mt");
    if (mt.empty()) c.fail("b_mt", "field grid is empty");
  } else {
    const std::size_t n = count_from(c, "b_points", 0);
    if (n == 0) c.fail("b_points", "field grid is empty");
    mt = linear_grid(c.number("b_min_mt"), c.number("b_max_mt"), n);
  }
  for (double& b : mt) b = units::mt_to_tesla(b);
  return mt;
}

SweepSpec sweep_spec_from(const Config& c) {
  SweepSpec spec;
  const auto protocol = parse_protocol(c.text("protocol"));
  if (!protocol) c.fail("protocol", "expected ramsey, hahn or berry");
  const auto engine = parse_engine(c.text("engine"));
  if (!engine) c.fail("engine", "expected analytic, numeric or numeric+noise");
  spec.protocol = *protocol;
  spec.engine = *engine;
  if (spec.protocol == Protocol::Berry) {
    for (double f : c.numbers("omega_mhz")) spec.rabi.push_back(units::mhz_to_angular(f));
    spec.rotations = c.integers("n");
    if (spec.rabi.empty()) c.fail("omega_mhz", "Berry needs at least one Rabi frequency");
    if (spec.rotations.empty()) c.fail("n", "Berry needs at least one rotation count");
  }
  spec.interaction_time = to_seconds(c.numbers("t_us"));
  if (spec.interaction_time.empty()) c.fail("t_us", "interaction-time list is empty");
  spec.field = field_grid(c);
  spec.constants = constants_from(c);
  spec.hyperfine = c.flag("hyperfine");
  spec.ensemble = count_from(c, "ensemble", 2);
  spec.seed = c.unsigned_integer("seed");
  spec.workers = workers_from(c);
  spec.bath = bath_from(c);
  if (spec.protocol == Protocol::Hahn && spec.engine == Engine::Analytic) {
    c.fail("engine", "the analytic engine has no Hahn-echo model; use numeric");
  }
  if (spec.engine == Engine::NumericNoise && !spec.bath) {
    c.fail("engine", "numeric+noise needs t2star_us/t2_us or delta_rad_s/tau_c_us");
  }
  return spec;
}

/// Console or file, chosen by the `out` key.
class Output {
 public:
  Output(const std::string& path, std::ostream& console) : stream_(&console) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw ConfigError("out", 0, "cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }
  bool to_console() const { return file_ == nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

int cmd_signal(const Config& c, std::ostream& console, std::ostream& log) {
  SweepSpec spec = sweep_spec_from(c);
  spec.compute_sensitivity = false;
  const auto result = run_sweep(spec);
  for (const auto& r : result.records) {
    if (!r.ok) {
      log << "geomag: computation error at grid point " << r.index << ": " << r.error << '\n';
      return kComputationError;
    }
  }
  Output out(c.text("out"), console);
  write_header(*out, "signal", c.resolved());
  *out << "B_mT,P,engine,protocol,omega_MHz,N,T_us\n";
  const std::string engine(to_string(spec.engine));
  const std::string protocol(to_string(spec.protocol));
  for (const auto& r : result.records) {
    const std::string omega = r.rabi ? num(units::angular_to_mhz(*r.rabi)) : "";
    const std::string n = r.rotations ? std::to_string(*r.rotations) : "";
    const std::string t = num(units::s_to_us(r.interaction_time));
    for (std::size_t i = 0; i < result.field.size(); ++i) {
      *out << num(units::tesla_to_mt(result.field[i])) << ',' << num(r.signal[i]) << ',' << engine << ','
           << protocol << ',' << omega << ',' << n << ',' << t << '\n';
    }
  }
  return kOk;
}

Json number_or_null(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return round9(*v);
}

int cmd_sweep(const Config& c, std::ostream& console, std::ostream& log) {
  SweepSpec spec = sweep_spec_from(c);
  spec.sensitivity.sigma_p = c.number("sigma_p");
  spec.sensitivity.overhead = units::us_to_s(c.number("overhead_us"));
  spec.coherence_times = to_seconds(c.numbers("t2g_times_us"));
  if (!spec.coherence_times.empty() && !spec.bath) {
    c.fail("t2g_times_us", "T2g extraction needs t2star_us/t2_us or delta_rad_s/tau_c_us");
  }
  std::vector<Response> responses;
  for (const auto& name : c.list("fit")) {
    if (name == "eta") responses.push_back(Response::Eta);
    else if (name == "b_max") responses.push_back(Response::FieldRange);
    else if (name == "t2g") responses.push_back(Response::T2g);
    else c.fail("fit", "unknown response '" + name + "' (eta, b_max, t2g)");
  }

  const auto result = run_sweep(spec);
  Output out(c.text("out"), console);
  Json header;
  header["type"] = "header";
  header["version"] = kVersion;
  header["command"] = "sweep";
  Json cfg = Json::object();
  for (const auto& [k, v] : c.resolved()) cfg[k] = v;
  header["config"] = cfg;
  *out << header.dump() << '\n';

  const std::string engine(to_string(spec.engine));
  const std::string protocol(to_string(spec.protocol));
  for (const auto& r : result.records) {
    Json j;
    j["type"] = "point";
    j["index"] = r.index;
    j["protocol"] = protocol;
    j["engine"] = engine;
    j["omega_MHz"] = r.rabi ? Json(round9(units::angular_to_mhz(*r.rabi))) : Json(nullptr);
    j["N"] = r.rotations ? Json(*r.rotations) : Json(nullptr);
    j["T_us"] = round9(units::s_to_us(r.interaction_time));
    j["A"] = number_or_null(r.adiabaticity);
    j["ok"] = r.ok;
    j["eta_T_per_sqrtHz"] = number_or_null(r.sensitivity ? std::optional(r.sensitivity->eta) : std::nullopt);
    j["max_slope_per_mT"] =
        number_or_null(r.sensitivity ? std::optional(r.sensitivity->max_slope * 1e-3) : std::nullopt);
    j["B_at_max_slope_mT"] = number_or_null(
        r.sensitivity ? std::optional(units::tesla_to_mt(r.sensitivity->field_at_max_slope)) : std::nullopt);
    j["B_max_mT"] =
        number_or_null(r.field_range ? std::optional(units::tesla_to_mt(*r.field_range)) : std::nullopt);
    j["T2g_us"] = number_or_null(r.t2g ? std::optional(units::s_to_us(r.t2g->t2g)) : std::nullopt);
    j["T2g_amplitude"] = number_or_null(r.t2g ? std::optional(r.t2g->amplitude) : std::nullopt);
    j["T2g_residual"] = number_or_null(r.t2g ? std::optional(r.t2g->residual) : std::nullopt);
    j["error"] = r.ok ? Json(nullptr) : Json(r.error);
    *out << j.dump() << '\n';
  }

  // Fit over every control that takes at least three values.
  std::vector<Control> controls;
  auto distinct = [](const auto& v) { return std::set(v.begin(), v.end()).size(); };
  if (spec.protocol == Protocol::Berry && distinct(spec.rabi) >= 3) controls.push_back(Control::Rabi);
  if (spec.protocol == Protocol::Berry && distinct(spec.rotations) >= 3) controls.push_back(Control::Rotations);
  if (distinct(spec.interaction_time) >= 3) controls.push_back(Control::Time);
  for (Response resp : responses) {
    Json j;
    j["type"] = "fit";
    j["response"] = std::string(to_string(resp));
    Json names = Json::array();
    for (Control ctl : controls) names.push_back(std::string(to_string(ctl)));
    j["controls"] = names;
    try {
      if (controls.empty()) throw FitFailure("no control takes three or more values");
      const auto fit = fit_power_law(result, resp, controls);
      Json e = Json::array(), s = Json::array();
      for (double v : fit.exponents) e.push_back(round9(v));
      for (double v : fit.std_errors) s.push_back(round9(v));
      j["exponents"] = e;
      j["std_errors"] = s;
      j["log_prefactor"] = round9(fit.log_prefactor);
      j["r_squared"] = round9(fit.r_squared);
      j["rms_log_residual"] = round9(fit.rms_log_residual);
      j["samples"] = fit.samples;
      j["error"] = nullptr;
    } catch (const FitFailure& e) {
      j["error"] = e.what();
    }
    *out << j.dump() << '\n';
  }

  const std::size_t failed = result.failures();
  if (failed > 0) {
    log << "geomag: " << failed << " of " << result.records.size() << " grid points failed\n";
    return failed == result.records.size() ? kComputationError : kPartial;
  }
  return kOk;
}

int cmd_estimate(const Config& c, std::ostream& console, std::ostream& log) {
  const auto protocol = parse_protocol(c.text("protocol"));
  if (!protocol || *protocol == Protocol::Hahn) c.fail("protocol", "expected ramsey or berry");
  const PhysicalConstants k = constants_from(c);
  Measurement m;
  m.signal = c.number("p");
  if (c.has("slope_per_mt")) m.slope = c.number("slope_per_mt") * 1e3;
  m.sigma = c.number("sigma");
  m.slope_step = units::mt_to_tesla(c.number("slope_step_mt"));

  struct Row {
    double field;
    int lobe;
    bool consistent;
    bool chosen;
  };
  std::vector<Row> rows;
  int code = kOk;
  std::string summary;
  bool clamped = false;
  if (*protocol == Protocol::Berry) {
    const auto n = c.integers("n");
    const auto w = c.numbers("omega_mhz");
    if (n.size() != 1) c.fail("n", "estimation takes a single rotation count");
    if (w.size() != 1) c.fail("omega_mhz", "estimation takes a single Rabi frequency");
    if (!m.slope) c.fail("slope_per_mt", "the geometric estimator needs the measured slope");
    const GeometricModel model{units::mhz_to_angular(w[0]), n[0], k};
    try {
      const auto e = estimate_geometric(model, m);
      rows.push_back({e.field, e.lobe_index, e.slope_consistent, true});
      clamped = e.clamped;
      summary = "B = " + num(units::tesla_to_mt(e.field)) + " mT, lobe " + std::to_string(e.lobe_index) +
                ", " + std::to_string(e.candidates_considered) + " candidates considered";
    } catch (const Unresolvable& u) {
      for (double b : u.candidates()) {
        const double arg = berry_argument(model, b);
        rows.push_back({b, static_cast<int>(std::floor((4.0 * kPi * model.rotations - arg) / kTwoPi)),
                        true, false});
      }
      code = kUnresolvable;
      summary = std::string("unresolvable: ") + u.what() + "; " + std::to_string(rows.size()) +
                " candidates";
    }
  } else {
    const auto t = c.numbers("t_us");
    if (t.size() != 1) c.fail("t_us", "estimation takes a single interaction time");
    const DynamicModel model{units::us_to_s(t[0]), k};
    FieldInterval window{units::mt_to_tesla(c.number("window_min_mt")), 0.0};
    window.hi = c.has("window_max_mt") ? units::mt_to_tesla(c.number("window_max_mt"))
                                       : window.lo + 5.0 * ramsey_field_range(model);
    const auto all = estimate_dynamic(model, m, window);
    for (const auto& e : all) {
      rows.push_back({e.field, e.lobe_index, e.slope_consistent, false});
      clamped = clamped || e.clamped;
    }
    summary = std::to_string(all.size()) + " Ramsey candidates in [" + num(units::tesla_to_mt(window.lo)) +
              ", " + num(units::tesla_to_mt(window.hi)) + "] mT";
  }

  Output out(c.text("out"), console);
  write_header(*out, "estimate", c.resolved());
  *out << "# result = " << summary << (clamped ? " (signal clamped to [-1, 1])" : "") << '\n';
  *out << "candidate,B_mT,lobe,slope_consistent,chosen\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    *out << i << ',' << num(units::tesla_to_mt(rows[i].field)) << ',' << rows[i].lobe << ','
         << (rows[i].consistent ? 1 : 0) << ',' << (rows[i].chosen ? 1 : 0) << '\n';
  }
  if (!out.to_console() || code != kOk) log << "geomag: " << summary << '\n';
  return code;
}

int cmd_decohere(const Config& c, std::ostream& console, std::ostream& log) {
  const auto bath = bath_from(c);
  if (!bath) c.fail("t2star_us", "decohere needs t2star_us/t2_us or delta_rad_s/tau_c_us");
  const SpectralDensity density{*bath};
  QuadratureSpec quad;
  quad.rel_tol = c.number("quad_rel_tol");
  quad.max_subdivisions = count_from(c, "quad_budget", 1);
  if (!(quad.rel_tol > 0.0)) c.fail("quad_rel_tol", "must be > 0");
  const auto a_grid = c.numbers("a");
  if (a_grid.empty()) c.fail("a", "A list is empty");
  for (double a : a_grid) {
    if (a < 0.0) c.fail("a", "A values must be >= 0");
  }
  const std::string engine_name = c.text("regime_engine");
  RegimeEngine engine = RegimeEngine::FilterIntegral;
  if (engine_name == "monte-carlo") engine = RegimeEngine::MonteCarlo;
  else if (engine_name != "filter") c.fail("regime_engine", "expected filter or monte-carlo");
  const std::size_t t_points = count_from(c, "t_points", 2);
  const auto times = linear_grid(units::us_to_s(c.number("t_min_us")), units::us_to_s(c.number("t_max_us")),
                                 t_points);
  if (!(times.front() > 0.0) || !(times.back() > times.front())) {
    c.fail("t_min_us", "need 0 < t_min_us < t_max_us");
  }
  const std::size_t o_points = count_from(c, "overlay_points", 1);
  const double o_lo = c.number("overlay_min_rad_s");
  const double o_hi = c.number("overlay_max_rad_s");
  if (!(o_lo > 0.0) || !(o_hi >= o_lo)) c.fail("overlay_min_rad_s", "need 0 < overlay_min_rad_s <= overlay_max_rad_s");
  const std::string prefix = c.text("out").empty() || c.text("out") == "-" ? "decohere" : c.text("out");

  // Coherence curves.
  std::vector<std::vector<DecoherenceTerms>> curves;
  for (double a : a_grid) {
    std::vector<DecoherenceTerms> row;
    for (double t : times) row.push_back(decoherence_function(density, a, t, quad));
    curves.push_back(std::move(row));
  }
  RegimeOptions ro;
  ro.samples = count_from(c, "regime_samples", 4);
  ro.quadrature = quad;
  ro.rabi = units::mhz_to_angular(c.number("omega_mhz"));
  ro.ensemble = count_from(c, "ensemble", 2);
  ro.seed = c.unsigned_integer("seed");
  ro.workers = workers_from(c);
  ro.constants = constants_from(c);
  const auto regimes = decoherence_regime_scan(a_grid, *bath, engine, ro);
  const auto overlay = spectral_overlay(density, c.number("overlay_a"), units::us_to_s(c.number("overlay_t_us")),
                                        log_grid(o_lo, o_hi, o_points));

  auto open = [&](const std::string& suffix) {
    const std::string path = prefix + suffix;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("out", 0, "cannot open '" + path + "' for writing");
    write_header(f, "decohere", c.resolved());
    f << "# bath_delta_rad_s = " << num(bath->delta) << '\n';
    f << "# bath_tau_c_us = " << num(units::s_to_us(bath->correlation_time)) << '\n';
    return f;
  };
  {
    auto f = open("_coherence.csv");
    f << "A,T_us,W,chi_geometric,chi_dynamic\n";
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
      for (std::size_t j = 0; j < times.size(); ++j) {
        const auto& d = curves[i][j];
        f << num(a_grid[i]) << ',' << num(units::s_to_us(times[j])) << ',' << num(std::exp(-d.total)) << ','
          << num(d.geometric) << ',' << num(d.dynamic) << '\n';
      }
    }
  }
  std::size_t failed = 0;
  {
    auto f = open("_regimes.csv");
    f << "A,T2g_us,fit_residual,regime,status\n";
    for (const auto& r : regimes) {
      f << num(r.adiabaticity) << ',' << (r.ok ? num(units::s_to_us(r.t2g)) : "") << ','
        << (r.ok ? num(r.fit_residual) : "") << ',' << regime_label(r.adiabaticity) << ','
        << (r.ok ? "ok" : "failed") << '\n';
      if (!r.ok) {
        ++failed;
        log << "geomag: regime point A = " << num(r.adiabaticity) << " failed: " << r.error << '\n';
      }
    }
  }
  {
    auto f = open("_overlay.csv");
    f << "# overlay_a = " << c.text("overlay_a") << ", overlay_t_us = " << c.text("overlay_t_us") << '\n';
    f << "omega_rad_s,S,geometric,dynamic\n";
    for (const auto& r : overlay) {
      f << num(r.omega) << ',' << num(r.density) << ',' << num(r.geometric) << ',' << num(r.dynamic) << '\n';
    }
  }
  console << "bath: delta = " << num(bath->delta) << " rad/s, tau_c = " << num(units::s_to_us(bath->correlation_time))
          << " us\n";
  try {
    const auto slope = regime_slope(regimes, 0.1, 1.0);
    console << "T2g ~ A^" << num(slope.exponents[0]) << " on 0.1 < A < 1 (" << slope.samples << " points)\n";
  } catch (const FitFailure&) {
    console << "T2g slope on 0.1 < A < 1: not enough points\n";
  }
  console << "wrote " << prefix << "_coherence.csv, " << prefix << "_regimes.csv, " << prefix << "_overlay.csv\n";
  if (failed > 0) return failed == regimes.size() ? kComputationError : kPartial;
  return kOk;
}

int cmd_calibrate(const Config& c, std::ostream& console, std::ostream&) {
  const auto cal = calibrate_noise(units::us_to_s(c.number("t2star_us")), units::us_to_s(c.number("t2_us")));
  Output out(c.text("out"), console);
  write_header(*out, "calibrate", c.resolved());
  *out << "delta_rad_s,tau_c_us,t2star_us,t2_us,residual\n";
  *out << num(cal.bath.delta) << ',' << num(units::s_to_us(cal.bath.correlation_time)) << ','
       << num(units::s_to_us(cal.ramsey_time)) << ',' << num(units::s_to_us(cal.echo_time)) << ','
       << num(cal.residual) << '\n';
  return kOk;
}

}  // namespace

std::vector<std::string> command_names() { return {"signal", "sweep", "estimate", "decohere", "calibrate"}; }

std::vector<KeySpec> command_schema(const std::string& command) {
  if (command == "signal") return join({curve_keys(), noise_keys("", ""), common_keys()});
  if (command == "sweep") {
    return join({curve_keys(), noise_keys("", ""),
                 {{"sigma_p", "1", "signal noise per shot for eta"},
                  {"overhead_us", "0", "per-shot dead time added to T in eta, us"},
                  {"t2g_times_us", "", "decay times for a T2g fit per point, us"},
                  {"fit", "eta,b_max", "responses to fit as power laws (eta, b_max, t2g)"}},
                 common_keys()});
  }
  if (command == "estimate") {
    return join({{{"protocol", "berry", "ramsey or berry"},
                  {"omega_mhz", "5", "Rabi frequency, MHz (berry)"},
                  {"n", "3", "rotation count (berry)"},
                  {"t_us", "1", "interaction time, us (ramsey)"},
                  {"p", "", "measured signal"},
                  {"slope_per_mt", "", "measured dP/dB, 1/mT"},
                  {"sigma", "0", "signal standard deviation"},
                  {"slope_step_mt", "0", "field step of the slope difference, mT (0: B_max/1000)"},
                  {"window_min_mt", "0", "Ramsey search window start, mT"},
                  {"window_max_mt", "", "Ramsey search window end, mT (default: five fringes)"}},
                 common_keys()});
  }
  if (command == "decohere") {
    return join({noise_keys("50", "500"),
                 {{"a", "0,0.01,0.03,0.1,0.15,0.2,0.3,0.5,0.7,1", "adiabaticity list"},
                  {"t_min_us", "5", "coherence-curve start, us"},
                  {"t_max_us", "1000", "coherence-curve end, us"},
                  {"t_points", "200", "coherence-curve size"},
                  {"regime_engine", "filter", "filter or monte-carlo"},
                  {"regime_samples", "16", "decay samples per A for the T2g fit"},
                  {"omega_mhz", "1", "Rabi frequency of the Monte-Carlo Berry runs, MHz"},
                  {"ensemble", "200", "Monte-Carlo trajectories per A"},
                  {"overlay_a", "1", "A of the spectral overlay"},
                  {"overlay_t_us", "25", "T of the spectral overlay, us"},
                  {"overlay_min_rad_s", "100", "overlay frequency start, rad/s"},
                  {"overlay_max_rad_s", "1e7", "overlay frequency end, rad/s"},
                  {"overlay_points", "400", "overlay size (log spaced)"},
                  {"quad_rel_tol", "1e-6", "relative tolerance of the decoherence integral"},
                  {"quad_budget", "20000", "subdivision budget of the decoherence integral"}},
                 common_keys()});
  }
  if (command == "calibrate") {
    return join({{{"t2star_us", "50", "Ramsey 1/e time, us"}, {"t2_us", "500", "Hahn-echo 1/e time, us"}},
                 common_keys()});
  }
  throw std::invalid_argument("unknown command '" + command + "'");
}

int run_command(const std::string& command, const Config& config, std::ostream& console, std::ostream& log) {
  if (command == "signal") return cmd_signal(config, console, log);
  if (command == "sweep") return cmd_sweep(config, console, log);
  if (command == "estimate") return cmd_estimate(config, console, log);
  if (command == "decohere") return cmd_decohere(config, console, log);
  if (command == "calibrate") return cmd_calibrate(config, console, log);
  throw std::invalid_argument("unknown command '" + command + "'");
}

}  // namespace geomag::cli
