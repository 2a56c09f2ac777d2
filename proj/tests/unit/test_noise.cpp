#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "generators.hpp"
#include "geomag/errors.hpp"
#include "geomag/noise.hpp"
#include "geomag/quadrature.hpp"
#include "oracles.hpp"

using namespace geomag;
using geomag::testing::Gen;
using geomag::testing::ou_hahn_chi;
using geomag::testing::ou_ramsey_chi;

TEST_SUITE("quadrature") {

TEST_CASE("polynomials and smooth integrands") {
  const double bp[] = {0.0, 1.0};
  auto r = integrate_adaptive([](double x) { return x * x * x; }, bp);
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-14));
  const double bp2[] = {0.0, kPi};
  r = integrate_adaptive([](double x) { return std::sin(x); }, bp2);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.error <= 1e-6 * 2.0);
}

TEST_CASE("oscillatory and peaked integrands") {
  const double bp[] = {0.0, 1.0, 10.0};
  auto r = integrate_adaptive([](double x) { return std::cos(50.0 * x) * std::exp(-x); }, bp,
                              {1e-10, 0.0, 100000});
  const double exact = (1.0 - std::exp(-10.0) * (std::cos(500.0) - 50.0 * std::sin(500.0))) / 2501.0;
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-8));
  const double bp3[] = {-1.0, 1.0};
  r = integrate_adaptive([](double x) { return 1e-3 / (x * x + 1e-6); }, bp3, {1e-10, 0.0, 100000});
  CHECK(r.value == doctest::Approx(2.0 * std::atan(1000.0)).epsilon(1e-8));
}

TEST_CASE("budget exhaustion is reported, not hidden") {
  const double bp[] = {0.0, 1.0};
  const auto r = integrate_adaptive([](double x) { return std::sin(1e5 * x * x); }, bp,
                                    {1e-14, 0.0, 3});
  CHECK(r.subdivisions == 3);
  CHECK(r.error > 1e-14 * std::abs(r.value));
  CHECK_THROWS_AS(integrate_adaptive([](double) { return 1.0; }, std::span<const double>{}),
                  InvalidParameter);
}

}  // TEST_SUITE

TEST_SUITE("noise") {

TEST_CASE("filter functions") {
  CHECK(filter_function(FilterKind::GeometricF0, 0.0) == 0.0);
  CHECK(filter_function(FilterKind::DynamicF1, 0.0) == 0.0);
  CHECK(filter_function(FilterKind::GeometricF0, kPi) == doctest::Approx(2.0));
  CHECK(filter_function(FilterKind::DynamicF1, kTwoPi) == doctest::Approx(8.0));
  Gen g(1);
  for (int i = 0; i < 1000000; ++i) {
    const double x = g.uniform(-1e3, 1e3);
    const double s0 = std::sin(x / 2);
    const double s1 = std::sin(x / 4);
    REQUIRE(filter_function(FilterKind::GeometricF0, x) == doctest::Approx(2 * s0 * s0).epsilon(1e-15));
    REQUIRE(filter_function(FilterKind::DynamicF1, x) ==
            doctest::Approx(8 * s1 * s1 * s1 * s1).epsilon(1e-15));
  }
}

TEST_CASE("spectral densities") {
  const SpectralDensity l{Lorentzian{2.0, 0.5}};
  CHECK(l(0.0) == doctest::Approx(2 * 4 * 0.5));
  CHECK(l(2.0) == doctest::Approx(4.0 / 2.0));
  CHECK_THROWS_AS(SpectralDensity(Lorentzian{1.0, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(SpectralDensity(WhiteNoise{-1.0}), InvalidParameter);
  CHECK_THROWS_AS(SpectralDensity(OneOverF{1.0, 2.0, 1.0}), InvalidParameter);
  const SpectralDensity f{OneOverF{3.0, 1.0, 100.0}};
  CHECK(f(0.1) == doctest::Approx(3.0));
  CHECK(f(10.0) == doctest::Approx(0.3));
  CHECK(f(200.0) == 0.0);
  Gen g(2);
  for (int i = 0; i < 1000; ++i) {
    const double w = g.log_uniform(1e-3, 1e9);
    CHECK(l(w) >= 0.0);
    CHECK(f(w) >= 0.0);
  }
}

TEST_CASE("closed-form tails match numerical integration") {
  const SpectralDensity fams[] = {SpectralDensity{Lorentzian{3.0, 0.2}},
                                  SpectralDensity{WhiteNoise{1.5}},
                                  SpectralDensity{OneOverF{2.0, 0.5, 40.0}}};
  for (const auto& s : fams) {
    for (double w0 : {0.1, 1.0, 7.0, 30.0, 1e4}) {
      // Substitute u = 1/w to integrate over a finite range.
      std::vector<double> pts{0.0};
      if (1.0 / 40.0 < 1.0 / w0) pts.push_back(1.0 / 40.0);
      pts.push_back(1.0 / w0);
      const auto r = integrate_adaptive([&](double u) { return u > 0 ? s(1.0 / u) : 0.0; }, pts,
                                        {1e-12, 0.0, 100000});
      CHECK(s.tail_integral(w0) == doctest::Approx(r.value).epsilon(1e-8));
    }
  }
}

TEST_CASE("zero spectrum gives zero decoherence") {
  const auto t = decoherence_function(SpectralDensity::none(), 0.7, 1e-5);
  CHECK(t.total == 0.0);
  const double times[] = {1e-6, 2e-6, 3e-6};
  const auto curve = coherence_decay(SpectralDensity::none(), 1.0, times);
  for (double w : curve.values) CHECK(w == 1.0);
}

TEST_CASE("decoherence integral equals the OU time-domain closed forms") {
  Gen g(12);
  for (int i = 0; i < 60; ++i) {
    const double delta = g.log_uniform(1e3, 1e6);
    const double tau = g.log_uniform(1e-7, 1e-1);
    const double t = g.log_uniform(1e-7, 1e-3);
    const SpectralDensity s{Lorentzian{delta, tau}};
    const double d2 = delta * delta;
    CHECK(ramsey_chi(s, t) == doctest::Approx(ou_ramsey_chi(d2, tau, t)).epsilon(1e-5));
    CHECK(hahn_chi(s, t) == doctest::Approx(ou_hahn_chi(d2, tau, t)).epsilon(1e-5));
  }
}

TEST_CASE("decoherence examples") {
  const SpectralDensity s{Lorentzian{2e4, 1e-2}};
  const double t = 20e-6;
  const auto zero_a = decoherence_function(s, 0.0, t);
  CHECK(zero_a.geometric == 0.0);
  CHECK(zero_a.total == doctest::Approx(hahn_chi(s, t)));
  // Quasi-static bath: F0 term tends to A^2 delta^2 T^2 / 2.
  const auto one = decoherence_function(s, 0.5, t);
  CHECK(one.geometric == doctest::Approx(0.25 * 4e8 * t * t / 2).epsilon(2e-3));
  // White noise: (1/pi) int S F0 / w^2 = S T / 2.
  const SpectralDensity w{WhiteNoise{3.0}};
  CHECK(ramsey_chi(w, t) == doctest::Approx(1.5 * t).epsilon(1e-6));
  CHECK(hahn_chi(w, t) == doctest::Approx(1.5 * t).epsilon(1e-6));
  CHECK_THROWS_AS(decoherence_function(s, -1.0, t), InvalidParameter);
  CHECK_THROWS_AS(decoherence_function(s, 1.0, 0.0), InvalidParameter);
}

TEST_CASE("1/f decoherence matches direct integration") {
  const SpectralDensity f{OneOverF{1e6, 1e2, 1e7}};
  const double t = 30e-6;
  const double bp[] = {0.0, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7};
  std::vector<double> pts(std::begin(bp), std::end(bp));
  for (double k = 2 * kPi / t; k < 1e7; k += 2 * kPi / t) pts.push_back(k);
  std::sort(pts.begin(), pts.end());
  const auto r = integrate_adaptive(
      [&](double w) {
        return w > 0 ? f(w) * filter_function(FilterKind::GeometricF0, w * t) / (w * w)
                     : f(0) * t * t / 2;
      },
      pts, {1e-10, 0.0, 200000});
  CHECK(ramsey_chi(f, t) == doctest::Approx(r.value / kPi).epsilon(1e-6));
}

TEST_CASE("chi is exactly affine in A squared") {
  Gen g(13);
  for (int i = 0; i < 40; ++i) {
    const SpectralDensity s{Lorentzian{g.log_uniform(1e3, 1e5), g.log_uniform(1e-6, 1e-2)}};
    const double t = g.log_uniform(1e-6, 1e-3);
    const double a = g.uniform(0.0, 5.0);
    const double c0 = decoherence_function(s, 0.0, t).total;
    const double c1 = decoherence_function(s, 1.0, t).total;
    const double ca = decoherence_function(s, a, t).total;
    CHECK(ca - c0 == doctest::Approx(a * a * (c1 - c0)).epsilon(1e-12));
  }
}

TEST_CASE("quadrature convergence under a doubled budget") {
  const SpectralDensity s{Lorentzian{2.8e4, 8e-3}};
  for (double t : {10e-6, 50e-6, 500e-6}) {
    const QuadratureSpec budget{1e-9, 0.0, 400};
    const QuadratureSpec doubled{1e-9, 0.0, 800};
    const double a = filter_integral(s, FilterKind::DynamicF1, t, budget).value;
    const double b = filter_integral(s, FilterKind::DynamicF1, t, doubled).value;
    CHECK(std::abs(a - b) <= 1e-4 * std::abs(b));
  }
}

TEST_CASE("quadrature failure carries a frequency diagnostic") {
  const SpectralDensity s{Lorentzian{2.8e4, 1e-6}};
  try {
    filter_integral(s, FilterKind::GeometricF0, 1e-3, {1e-15, 0.0, 1});
    FAIL("expected QuadratureFailure");
  } catch (const QuadratureFailure& e) {
    CHECK(e.error_estimate() > 0.0);
    CHECK(e.worst_frequency() >= 0.0);
  }
}

TEST_CASE("coherence decay is nonincreasing") {
  const SpectralDensity s{Lorentzian{2.8e4, 8e-3}};
  std::vector<double> times;
  for (int i = 1; i <= 30; ++i) times.push_back(i * 10e-6);
  for (double a : {0.0, 0.3, 1.0, 3.0}) {
    const auto c = coherence_decay(s, a, times);
    for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] <= c.values[i - 1]);
  }
  const double bad[] = {2e-6, 1e-6};
  CHECK_THROWS_AS(coherence_decay(s, 1.0, bad), InvalidParameter);
  CHECK_THROWS_AS(coherence_decay(s, 1.0, std::span<const double>{}), InvalidParameter);
}

TEST_CASE("T2g fit") {
  std::vector<double> t, v;
  for (int i = 0; i < 20; ++i) {
    t.push_back(i * 15e-6);
    v.push_back(std::exp(-std::pow(t.back() / 100e-6, 2)));
  }
  const auto fit = fit_t2g(t, v);
  CHECK(fit.t2g == doctest::Approx(100e-6).epsilon(1e-3));
  CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.residual < 1e-6);
  std::vector<double> flat(20, 0.8);
  CHECK_THROWS_AS(fit_t2g(t, flat), FitFailure);
  CHECK_THROWS_AS(fit_t2g(std::span(t).first(3), std::span(v).first(3)), FitFailure);
  std::vector<double> rising;
  for (double x : t) rising.push_back(0.1 + x * 1e3);
  CHECK_THROWS_AS(fit_t2g(t, rising), FitFailure);
}

TEST_CASE("calibration reproduces both coherence times") {
  const auto start = std::chrono::steady_clock::now();
  const auto cal = calibrate_noise(50e-6, 500e-6);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(30));
  CHECK(cal.residual <= 0.05);
  CHECK(cal.ramsey_time == doctest::Approx(50e-6).epsilon(1e-3));
  CHECK(cal.echo_time == doctest::Approx(500e-6).epsilon(1e-3));
  CHECK(cal.bath.correlation_time > 20 * 50e-6);
  // Values produced by the OU closed forms solved independently.
  CHECK(cal.bath.delta == doctest::Approx(28313.0).epsilon(5e-3));
  CHECK(cal.bath.correlation_time == doctest::Approx(8.16e-3).epsilon(5e-3));
  const double d2 = cal.bath.delta * cal.bath.delta;
  CHECK(ou_ramsey_chi(d2, cal.bath.correlation_time, 50e-6) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(ou_hahn_chi(d2, cal.bath.correlation_time, 500e-6) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("calibration scales with the targets") {
  const auto a = calibrate_noise(50e-6, 500e-6);
  const auto b = calibrate_noise(100e-6, 1000e-6);
  CHECK(b.bath.delta == doctest::Approx(a.bath.delta / 2).epsilon(1e-4));
  CHECK(b.bath.correlation_time == doctest::Approx(2 * a.bath.correlation_time).epsilon(1e-4));
}

TEST_CASE("degenerate calibration targets") {
  try {
    calibrate_noise(50e-6, 50e-6);
    FAIL("expected CalibrationFailure");
  } catch (const CalibrationFailure& e) {
    CHECK(e.best_residual() > 0.0);
  }
  CHECK_THROWS_AS(calibrate_noise(0.0, 1e-4), InvalidParameter);
}

TEST_CASE("decay time") {
  CHECK(decay_time([](double t) { return t * t; }, 0.1) == doctest::Approx(1.0));
  CHECK(decay_time([](double t) { return t * t; }, 50.0) == doctest::Approx(1.0));
  CHECK(decay_time([](double t) { return 3 * t; }, 1.0, 2.0) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(decay_time([](double) { return 0.0; }, 1.0), ConvergenceFailure);
}

TEST_CASE("OU trajectories") {
  const Lorentzian bath{2.8e4, 1e-5};
  const PhysicalConstants k;
  const double dt = 1e-6;
  CHECK_THROWS_AS(ou_trajectory(bath, 1e-4, 2e-6, 1), InvalidParameter);
  const auto a = ou_trajectory(bath, 1e-4, dt, 7, 3);
  const auto b = ou_trajectory(bath, 1e-4, dt, 7, 3);
  CHECK(a.samples() == b.samples());
  CHECK(a.samples() != ou_trajectory(bath, 1e-4, dt, 7, 4).samples());
  CHECK(a.duration() == doctest::Approx(1e-4));

  // Variance and lag-tau autocorrelation over 10^4 trajectories.
  const std::size_t lag = 10;
  double var = 0.0, cov = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto tr = ou_trajectory(bath, 2e-5, dt, 99, static_cast<std::uint64_t>(i));
    const double x0 = tr.samples()[3] * k.gamma;
    const double x1 = tr.samples()[3 + lag] * k.gamma;
    var += x0 * x0;
    cov += x0 * x1;
  }
  var /= n;
  cov /= n;
  const double d2 = bath.delta * bath.delta;
  CHECK(var == doctest::Approx(d2).epsilon(0.03));
  CHECK(cov == doctest::Approx(d2 / std::exp(1.0)).epsilon(0.05));
}

TEST_CASE("spectral overlay") {
  const SpectralDensity s{Lorentzian{2.8e4, 8e-3}};
  std::vector<double> w;
  for (int i = 1; i <= 50; ++i) w.push_back(i * 1e4);
  const auto zero = spectral_overlay(s, 0.0, 50e-6, w);
  for (const auto& r : zero) CHECK(r.geometric == 0.0);
  const auto one = spectral_overlay(s, 1.0, 50e-6, w);
  for (const auto& r : one) {
    const double x = r.omega * 50e-6;
    CHECK(r.geometric == doctest::Approx(filter_function(FilterKind::GeometricF0, x) / (r.omega * r.omega)));
    CHECK(r.density == doctest::Approx(s(r.omega)));
  }
  const double tiny[] = {1e-2};
  const auto small = spectral_overlay(s, 1.0, 50e-6, tiny);
  const double t4 = std::pow(50e-6, 4);
  CHECK(small[0].dynamic == doctest::Approx(1e-4 * t4 / 32).epsilon(1e-6));
  const double bad[] = {2.0, 1.0};
  CHECK_THROWS_AS(spectral_overlay(s, 1.0, 1e-5, bad), InvalidParameter);
}

TEST_CASE("monte-carlo ramsey decay follows the F0 prediction") {
  const Lorentzian bath{2.8313e4, 8.16e-3};
  const SpectralDensity s{bath};
  const PhysicalConstants k;
  EnsembleOptions eo;
  eo.trajectories = 400;
  eo.seed = 5;
  const double times[] = {10e-6, 30e-6, 50e-6, 80e-6};
  const auto pts = monte_carlo_decay([](double t) { return build_ramsey(t); }, times, 0.0, bath, k, eo);
  for (const auto& p : pts) {
    CHECK(std::abs(p.mean - std::exp(-ramsey_chi(s, p.time))) <= 4 * p.std_error + 0.01);
  }
  eo.workers = 3;
  const auto again = monte_carlo_decay([](double t) { return build_ramsey(t); }, times, 0.0, bath, k, eo);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(again[i].mean == pts[i].mean);
}

}  // TEST_SUITE
