#include <benchmark/benchmark.h>

#include <array>
#include <cmath>

#include "geomag/harness.hpp"
#include "geomag/noise.hpp"
#include "geomag/quadrature.hpp"
#include "geomag/sequences.hpp"
#include "geomag/spin.hpp"

namespace {

using namespace geomag;

const PhysicalConstants kConstants{};

void BM_SweptMesh(benchmark::State& state) {
  const double rabi = kTwoPi * 1e6;
  const double t = 10e-6;
  const double detuning = kConstants.gamma * 0.05e-3;
  const auto steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto s = propagate_swept_fixed({0, 0, 1}, rabi, [&](double u) { return kTwoPi * u / t; },
                                   [&](double) { return detuning; }, t, steps);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SweptMesh)->RangeMultiplier(4)->Range(64, 16384);

void BM_BerryExecute(benchmark::State& state) {
  const auto plan = build_berry(kTwoPi * 1e6, static_cast<int>(state.range(0)), 100e-6);
  ExecuteOptions opts;
  opts.integrator = Integrator::LabFrameMesh;
  for (auto _ : state) benchmark::DoNotOptimize(execute(plan, 0.02e-3, kConstants, nullptr, opts));
}
BENCHMARK(BM_BerryExecute)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_GaussKronrod(benchmark::State& state) {
  const std::array<double, 2> range{0.0, 200.0};
  for (auto _ : state) {
    auto r = integrate_adaptive([](double x) { return std::sin(x) * std::sin(x) / (1.0 + x * x); },
                                range, {1e-10, 0.0, 20000});
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_GaussKronrod);

void BM_DecoherenceFunction(benchmark::State& state) {
  const SpectralDensity s{Lorentzian{28313.152, 8161.23e-6}};
  const double a = 0.01 * static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(decoherence_function(s, a, 100e-6).total);
}
BENCHMARK(BM_DecoherenceFunction)->Arg(1)->Arg(30)->Arg(100);

void BM_AnalyticSweep(benchmark::State& state) {
  SweepSpec spec;
  spec.protocol = Protocol::Berry;
  spec.engine = Engine::Analytic;
  spec.rabi = {kTwoPi * 1e6, kTwoPi * 2e6, kTwoPi * 5e6};
  spec.rotations = {1, 4, 16};
  spec.interaction_time = {20e-6, 50e-6, 100e-6};
  spec.field = log_grid(1e-7, 1e-4, 64);
  spec.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec).records.size());
}
BENCHMARK(BM_AnalyticSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
