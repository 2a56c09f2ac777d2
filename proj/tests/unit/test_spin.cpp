#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "geomag/errors.hpp"
#include "geomag/spin.hpp"
#include "oracles.hpp"

using namespace geomag;
using geomag::testing::Gen;

TEST_SUITE("spin") {

TEST_CASE("physical constants validate") {
  PhysicalConstants k;
  CHECK_NOTHROW(k.validate());
  CHECK(k.gamma == doctest::Approx(kTwoPi * 28e9));
  k.gamma = 0.0;
  CHECK_THROWS_AS(k.validate(), InvalidParameter);
  k = {};
  k.hyperfine_splitting = -1.0;
  CHECK_THROWS_AS(k.validate(), InvalidParameter);
}

TEST_CASE("unit conversions round trip") {
  CHECK(units::angular_to_mhz(units::mhz_to_angular(5.0)) == doctest::Approx(5.0));
  CHECK(units::tesla_to_mt(units::mt_to_tesla(0.41)) == doctest::Approx(0.41));
  CHECK(units::s_to_us(units::us_to_s(8.0)) == doctest::Approx(8.0));
}

TEST_CASE("larmor vector from drive") {
  auto l = larmor_from_drive({0.0, 0.3, 7.0});
  CHECK(l.magnitude == doctest::Approx(7.0));
  CHECK(l.polar_angle == doctest::Approx(0.0));

  l = larmor_from_drive({4.0, 0.0, 0.0});
  CHECK(l.magnitude == doctest::Approx(4.0));
  CHECK(l.polar_angle == doctest::Approx(kPi / 2));

  const double w = units::mhz_to_angular(5.0);
  l = larmor_from_drive({w, 0.2, w});
  CHECK(units::angular_to_mhz(l.magnitude) == doctest::Approx(std::sqrt(50.0)));
  CHECK(l.polar_angle == doctest::Approx(kPi / 4));
  CHECK(l.azimuth == doctest::Approx(0.2));

  l = larmor_from_drive({0.0, 0.0, 0.0});
  CHECK(l.magnitude == 0.0);
  CHECK(l.polar_angle == 0.0);

  l = larmor_from_drive({1.0, 0.0, -1.0});
  CHECK(l.polar_angle == doctest::Approx(3 * kPi / 4));
}

TEST_CASE("larmor invariants on random drives") {
  Gen g(11);
  for (int i = 0; i < 2000; ++i) {
    const DriveParams d{g.uniform(0.0, 10.0), g.uniform(-7.0, 7.0), g.uniform(-10.0, 10.0)};
    const auto l = larmor_from_drive(d);
    CHECK(l.magnitude == doctest::Approx(std::hypot(d.rabi, d.detuning)));
    CHECK(l.polar_angle >= 0.0);
    CHECK(l.polar_angle <= kPi);
    if (l.magnitude > 0) CHECK(std::cos(l.polar_angle) == doctest::Approx(d.detuning / l.magnitude));
    CHECK(max_abs_diff(l.cartesian(), larmor_cartesian(d)) < 1e-12);
  }
}

TEST_CASE("drive validation") {
  CHECK_THROWS_AS((DriveParams{-1.0, 0.0, 0.0}.validate()), InvalidParameter);
  CHECK_THROWS_AS((DriveParams{1.0, NAN, 0.0}.validate()), InvalidParameter);
  CHECK_THROWS_AS((DriveParams{1.0, 0.0, INFINITY}.validate()), InvalidParameter);
}

TEST_CASE("propagate_constant examples") {
  const double w = 3.0;
  auto s = propagate_constant({0, 0, 1}, {w, 0.0, 0.0}, kPi / w);
  CHECK(max_abs_diff(s, {0, 0, -1}) < 1e-12);

  const double x = 2.0;
  const double t = 0.7;
  s = propagate_constant({1, 0, 0}, {0.0, 0.0, x}, t);
  CHECK(max_abs_diff(s, {std::cos(x * t), std::sin(x * t), 0}) < 1e-12);

  const SpinState any{0.3, -0.4, 0.5};
  CHECK(propagate_constant(any, {1.0, 2.0, 3.0}, 0.0) == any);
  CHECK(max_abs_diff(propagate_constant(any, {0.0, 0.0, 0.0}, 5.0), any) == 0.0);
  CHECK_THROWS_AS(propagate_constant(any, {1.0, 0.0, 0.0}, -1.0), InvalidParameter);
}

TEST_CASE("ideal pulses") {
  auto s = apply_ideal_pulse({0, 0, 1}, 0.0, kPi / 2);
  CHECK(max_abs_diff(s, {0, -1, 0}) < 1e-12);
  s = apply_ideal_pulse({0, 0, 1}, 0.0, kPi);
  CHECK(max_abs_diff(s, {0, 0, -1}) < 1e-12);
  Gen g(5);
  for (int i = 0; i < 200; ++i) {
    const SpinState v = g.state();
    CHECK(max_abs_diff(apply_ideal_pulse(v, g.uniform(-4, 4), kTwoPi), v) < 1e-12);
  }
}

TEST_CASE("norm conservation, composition and time reversal") {
  Gen g(2024);
  for (int i = 0; i < 2000; ++i) {
    const SpinState s = g.state();
    const DriveParams d{g.uniform(0, 1e8), g.uniform(-kPi, kPi), g.uniform(-1e8, 1e8)};
    const double t1 = g.uniform(0, 1e-6);
    const double t2 = g.uniform(0, 1e-6);
    const SpinState a = propagate_constant(s, d, t1);
    CHECK(std::abs(a.norm() - s.norm()) <= 1e-10);
    const SpinState ab = propagate_constant(a, d, t2);
    CHECK(max_abs_diff(ab, propagate_constant(s, d, t1 + t2)) <= 1e-10);
    // Reversed Larmor vector: rabi phase shifted by pi and detuning negated.
    const SpinState back = propagate_constant(a, {d.rabi, d.phase + kPi, -d.detuning}, t1);
    CHECK(max_abs_diff(back, s) <= 1e-9);
  }
}

TEST_CASE("swept propagation reduces to the constant case") {
  Gen g(7);
  for (int i = 0; i < 50; ++i) {
    const SpinState s = g.unit_state();
    const DriveParams d{g.uniform(0, 5e7), g.uniform(-kPi, kPi), g.uniform(-5e7, 5e7)};
    const double t = g.uniform(1e-8, 1e-6);
    const auto swept = propagate_swept(s, d.rabi, [&](double) { return d.phase; },
                                       [&](double) { return d.detuning; }, t);
    CHECK(max_abs_diff(swept, propagate_constant(s, d, t)) <= 1e-6);
  }
}

TEST_CASE("zero drive is free precession whatever the phase") {
  const double x = kTwoPi * 3e6;
  const double t = 1e-6;
  const auto s = propagate_swept({1, 0, 0}, 0.0, [](double u) { return 1e9 * u * u; },
                                 [&](double) { return x; }, t);
  CHECK(max_abs_diff(s, {std::cos(x * t), std::sin(x * t), 0}) <= 1e-6);
}

TEST_CASE("swept propagation matches an independent RK4 integration") {
  Gen g(99);
  for (int i = 0; i < 6; ++i) {
    const double rabi = kTwoPi * g.uniform(1e6, 6e6);
    const double rate = kTwoPi * g.uniform(-3e6, 3e6);
    const double chirp = g.uniform(-1e13, 1e13);
    const double det0 = kTwoPi * g.uniform(-4e6, 4e6);
    const double t = g.uniform(0.5e-6, 2e-6);
    const SpinState s = g.unit_state();
    auto phase = [&](double u) { return rate * u + 0.5 * chirp * u * u; };
    auto detuning = [&](double u) { return det0 * (1.0 + 0.3 * std::sin(4e6 * u)); };
    const auto ours = propagate_swept(s, rabi, phase, detuning, t, {1e-9, 14});
    const auto oracle =
        geomag::testing::rk4_bloch(s, [&](double) { return rabi; }, phase, detuning, t, 200000);
    CHECK(max_abs_diff(ours, oracle) <= 1e-7);
  }
}

TEST_CASE("refinement errors decrease and fourth-order convergence") {
  const double rabi = kTwoPi * 5e6;
  const double t = 4e-6;
  auto phase = [&](double u) { return 4.0 * kPi * 3.0 * u / 8e-6; };
  auto detuning = [](double) { return kTwoPi * 4e6; };
  const auto r = propagate_swept_detailed({1, 0, 0}, rabi, phase, detuning, t, {1e-12, 12});
  REQUIRE(r.refinement_errors.size() >= 2);
  for (std::size_t i = 1; i < r.refinement_errors.size(); ++i) {
    CHECK(r.refinement_errors[i] < r.refinement_errors[i - 1]);
  }
  // Step halving beyond the first level should shrink errors by far more than 2x.
  CHECK(r.refinement_errors[1] < r.refinement_errors[0] / 8.0);
}

TEST_CASE("convergence failure is reported") {
  StepControl tight;
  tight.tolerance = 1e-16;
  tight.max_depth = 1;
  tight.steps_per_cycle = 2;
  auto phase = [](double u) { return 1e14 * u * u; };
  auto detuning = [](double u) { return 1e8 * std::sin(1e7 * u); };
  try {
    propagate_swept({1, 0, 0}, 5e7, phase, detuning, 1e-6, tight);
    FAIL("expected ConvergenceFailure");
  } catch (const ConvergenceFailure& e) {
    CHECK(e.error_estimate() > 0.0);
  }
  CHECK_THROWS_AS(propagate_swept({1, 0, 0}, 1.0, phase, detuning, -1.0), InvalidParameter);
}

TEST_CASE("swept propagation is deterministic and norm preserving") {
  Gen g(3);
  for (int i = 0; i < 20; ++i) {
    const SpinState s = g.state();
    const double rabi = g.uniform(1e6, 3e7);
    const double rate = g.uniform(-3e7, 3e7);
    auto phase = [&](double u) { return rate * u; };
    auto det = [&](double u) { return 1e7 * std::cos(2e6 * u); };
    const auto a = propagate_swept(s, rabi, phase, det, 1e-6);
    const auto b = propagate_swept(s, rabi, phase, det, 1e-6);
    CHECK(a == b);
    CHECK(std::abs(a.norm() - s.norm()) <= 1e-10 * 64);
  }
}

}  // TEST_SUITE
