#include <benchmark/benchmark.h>

#include <string>

#include "sharesim/entitlements.hpp"
#include "sharesim/planner.hpp"
#include "sharesim/scenario_io.hpp"
#include "sharesim/simcore.hpp"

using namespace sharesim;

namespace {

Scenario shipped(const char* name, std::int64_t duration_ms) {
  Scenario s = load_scenario_file(std::string(SHARESIM_SCENARIO_DIR "/") + name);
  s.sim.duration_ms = duration_ms;
  s.sim.warmup_ms = duration_ms / 10;
  return s;
}

void BM_SimulateTs(benchmark::State& state) {
  const Scenario s = shipped("loophole.scn", 60'000);
  for (auto _ : state) {
    SimReport r = run(s);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * (s.sim.duration_ms / s.sched.tick_ms));
}
BENCHMARK(BM_SimulateTs)->Unit(benchmark::kMillisecond);

void BM_SimulateFs(benchmark::State& state) {
  const Scenario s = shipped("fairshare9010.scn", 60'000);
  for (auto _ : state) {
    SimReport r = run(s);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * (s.sim.duration_ms / s.sched.tick_ms));
}
BENCHMARK(BM_SimulateFs)->Unit(benchmark::kMillisecond);

void BM_SimulateFsCapped(benchmark::State& state) {
  const Scenario s = shipped("capdemo.scn", 60'000);
  for (auto _ : state) {
    SimReport r = run(s);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * (s.sim.duration_ms / s.sched.tick_ms));
}
BENCHMARK(BM_SimulateFsCapped)->Unit(benchmark::kMillisecond);

void BM_PlannerPredict(benchmark::State& state) {
  const Scenario s = shipped("consolidation.scn", 600'000);
  for (auto _ : state) {
    PlanReport r = predict(s);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_PlannerPredict);

void BM_PlannerWhatIf(benchmark::State& state) {
  const Scenario s = shipped("consolidation.scn", 600'000);
  for (auto _ : state) {
    WhatIfReport r =
        what_if(s, {{"usrA", "usrB"}, {"dbms", "web", "usrA", "usrB", "usrC"}});
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_PlannerWhatIf);

void BM_Entitlements(benchmark::State& state) {
  const ShareAllocation alloc = shipped("consolidation.scn", 600'000).alloc;
  for (auto _ : state) {
    EntitlementTable t = dynamic_entitlements(alloc, {"web", "usrA", "usrB", "usrC"});
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_Entitlements);

void BM_ScenarioRoundTrip(benchmark::State& state) {
  const std::string text = emit_scenario(shipped("consolidation.scn", 600'000));
  for (auto _ : state) {
    Scenario s = parse_scenario_text(text);
    benchmark::DoNotOptimize(s);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ScenarioRoundTrip);

}  // namespace

BENCHMARK_MAIN();
