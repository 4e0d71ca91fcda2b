#include <benchmark/benchmark.h>

#include "dtm/agents/valuation.hpp"
#include "dtm/harness/run.hpp"
#include "dtm/negotiation/negotiation.hpp"

using namespace dtm;

namespace {

std::shared_ptr<const traffic::Scenario> reference_scenario(double flow) {
  harness::ScenarioConfig cfg;
  cfg.demand.flow_vph = flow;
  return std::make_shared<const traffic::Scenario>(cfg.build_scenario());
}

void BM_SimulatorStep(benchmark::State& state) {
  const auto sc = reference_scenario(static_cast<double>(state.range(0)));
  const auto plan = traffic::SignalPlan::uniform(sc->network, 60, 30, 30);
  traffic::Simulator warm(sc, plan, 1000, 1, false);
  warm.run_until(400);
  for (auto _ : state) {
    auto sim = warm;
    sim.step();
    benchmark::DoNotOptimize(sim.state().clock_s);
  }
}
BENCHMARK(BM_SimulatorStep)->Arg(100)->Arg(300)->Arg(500);

void BM_FullRun(benchmark::State& state) {
  const auto sc = reference_scenario(static_cast<double>(state.range(0)));
  const auto plan = traffic::SignalPlan::uniform(sc->network, 60, 30, 30);
  for (auto _ : state) benchmark::DoNotOptimize(traffic::run(*sc, plan, 1000, 1, {false, {}}).n);
}
BENCHMARK(BM_FullRun)->Arg(100)->Arg(220)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_OracleEvaluate(benchmark::State& state) {
  const auto sc = reference_scenario(220);
  const auto plan = traffic::SignalPlan::uniform(sc->network, 60, 30, 30);
  const DataProduct p{sc->accidents.front().link};
  long t = 200;
  agents::OracleEvaluator ev(sc, plan, 1000, 1, 3);
  for (auto _ : state) {
    // Fresh trade times defeat the memo.
    benchmark::DoNotOptimize(ev.evaluate(p, t).value.seconds_saved);
    t = t >= 995 ? 200 : t + 5;
  }
}
BENCHMARK(BM_OracleEvaluate)->Unit(benchmark::kMillisecond);

void BM_Negotiate(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(negotiation::negotiate(Currency::from_cents(101), Currency::from_cents(1000),
                                                    Currency::from_cents(1500), 5, Currency::from_cents(100)));
}
BENCHMARK(BM_Negotiate);

void BM_EquilibriumCheck(benchmark::State& state) {
  const auto t = negotiation::negotiate(Currency::from_cents(101), Currency::from_cents(1000),
                                        Currency::from_cents(1100), 5, Currency::from_cents(100));
  for (auto _ : state) benchmark::DoNotOptimize(negotiation::equilibrium_check(t));
}
BENCHMARK(BM_EquilibriumCheck);

void BM_RunOnce(benchmark::State& state) {
  harness::ScenarioConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_once(cfg).report.improvement_pct);
}
BENCHMARK(BM_RunOnce)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
