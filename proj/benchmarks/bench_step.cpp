// Per-step cost of the integrator and of the scalar time integrals.
#include <benchmark/benchmark.h>

#include "oscad/system.hpp"

using namespace oscad;

namespace {

ExperimentConfig bubble(int N, double A) {
  ExperimentConfig c;
  c.shape = "circle";
  c.velocity = "radial";
  c.A = A;
  c.N = N;
  return c;
}

void BM_step(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const int order = static_cast<int>(state.range(1));
  const double A = static_cast<double>(state.range(2));
  const ExperimentConfig cfg = bubble(N, A);
  const Problem p = build_problem(cfg, N);
  Integrator integ(p.sys, make_time_factor(cfg, 1e-3), order);
  Field c = p.initial();
  double t = 0.0;
  const double dt = 0.01;
  for (auto _ : state) {
    c = integ.advance(c, t, dt);
    t += dt;
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["unknowns"] = p.sys.size();
  state.counters["gmres_its"] = benchmark::Counter(static_cast<double>(integ.stats().iterations),
                                                   benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_step)
    ->ArgsProduct({{40, 80, 160}, {2, 3}, {1, 100}})
    ->Unit(benchmark::kMillisecond);

void BM_integrals(benchmark::State& state) {
  const TimeFactor g = TimeFactor::cosine(1e-3);
  double a = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrals_for_step(g, a, a + 0.01));
    a += 0.01;
  }
}
BENCHMARK(BM_integrals);

}  // namespace

BENCHMARK_MAIN();
