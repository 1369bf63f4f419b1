#include <benchmark/benchmark.h>

#include <numbers>

#include "qmotor/correlators.hpp"
#include "qmotor/dynamics.hpp"
#include "qmotor/noise.hpp"
#include "qmotor/velocity.hpp"

namespace {

qmotor::MotorParams reduced(double k = 1.0) {
  qmotor::MotorParams p;
  p.k = k;
  p.v0 = 0.5;
  p.phi = std::numbers::pi / 2;
  p.bath1.temperature = 1.0;
  p.bath2.temperature = 2.5;
  return p;
}

void BM_KernelEvaluation(benchmark::State& state) {
  qmotor::MotorParams p = reduced();
  if (state.range(0) == 1)
    for (auto* b : {&p.bath1, &p.bath2}) b->cutoff = qmotor::Cutoff::soft_lorentzian(20.0);
  const qmotor::KernelEvaluator eval(p);
  double tau = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval(tau));
    tau = tau < 20.0 ? tau * 1.1 : 0.5;
  }
}
BENCHMARK(BM_KernelEvaluation)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_SteadyVelocity(benchmark::State& state) {
  const qmotor::MotorParams p = reduced(static_cast<double>(state.range(0)) / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(qmotor::steady_velocity(p));
}
BENCHMARK(BM_SteadyVelocity)->Arg(3)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_NoiseSynthesis(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  qmotor::NoiseSynthesizer syn(n);
  qmotor::BathSpec b;
  b.temperature = 1.0;
  std::vector<double> out;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    syn.generate(b, 0.05, seed++, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NoiseSynthesis)->RangeMultiplier(16)->Range(1 << 10, 1 << 22)->Unit(benchmark::kMillisecond);

void BM_IntegrateTrajectory(benchmark::State& state) {
  const qmotor::MotorParams p = reduced();
  qmotor::SimConfig c;
  c.n_steps = static_cast<std::size_t>(state.range(0));
  c.dt = qmotor::default_time_step(qmotor::MotorSystem{p, {}});
  c.mode = state.range(1) ? qmotor::SimMode::QMD : qmotor::SimMode::MD;
  std::size_t traj = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qmotor::integrate_motor(p, {}, c, traj++).slope);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IntegrateTrajectory)->Args({1 << 16, 1})->Args({1 << 16, 0})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
