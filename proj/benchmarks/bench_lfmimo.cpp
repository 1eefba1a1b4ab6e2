#include <benchmark/benchmark.h>

#include "lfmimo/allocator.hpp"
#include "lfmimo/simulator.hpp"
#include "lfmimo/sinr.hpp"
#include "lfmimo/traffic.hpp"

namespace {

using namespace lfmimo;

AllocationContext reference_context(double xi) {
  AllocationContext ctx;
  ctx.traffic.rho_hat = 0.01045;
  ctx.cost = CostModel::from_xi(xi);
  return ctx;
}

void BM_MinServeRate(benchmark::State& state) {
  TrafficSpec spec;
  spec.lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(min_serve_rate(spec));
}
BENCHMARK(BM_MinServeRate)->Arg(10)->Arg(300)->Arg(5000);

void BM_AvgViolation(benchmark::State& state) {
  const auto table = default_table();
  const auto pd = level_violations(table, TrafficSpec{});
  const SinrModelParams params{4, 8.0, 1e3, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(avg_violation(params, table, pd, Regime::general));
}
BENCHMARK(BM_AvgViolation);

void BM_PowerForFeedback(benchmark::State& state) {
  const JointAllocator a(reference_context(80));
  for (auto _ : state) benchmark::DoNotOptimize(a.power_for_feedback(9.5));
}
BENCHMARK(BM_PowerForFeedback);

void BM_AllocateProposed(benchmark::State& state) {
  const JointAllocator a(reference_context(static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(a.allocate_proposed());
}
BENCHMARK(BM_AllocateProposed)->Arg(80)->Arg(240);

void BM_AllocateExhaustive(benchmark::State& state) {
  const JointAllocator a(reference_context(static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(a.allocate_exhaustive());
}
BENCHMARK(BM_AllocateExhaustive)->Arg(80)->Arg(240);

// One Monte Carlo SINR trial: channels, per-user RVQ, ZFBF.
void BM_SinrTrial(benchmark::State& state) {
  LinkConfig cfg;
  cfg.b = static_cast<int>(state.range(0));
  cfg.codebook = state.range(1) ? CodebookMode::sampled_rvq : CodebookMode::explicit_rvq;
  Rng rng = substream(1, 0);
  std::uint64_t redraws = 0;
  for (auto _ : state) benchmark::DoNotOptimize(draw_sinr(cfg, rng, redraws));
}
BENCHMARK(BM_SinrTrial)->Args({4, 0})->Args({8, 0})->Args({12, 0})->Args({8, 1})->Args({16, 1});

void BM_QueueSlots(benchmark::State& state) {
  QueueSimConfig q;
  q.horizon = static_cast<std::uint64_t>(state.range(0));
  q.link.b = 8;
  q.link.gamma = 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_queue(q));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QueueSlots)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
