#include <benchmark/benchmark.h>

#include "gcsim/engine.hpp"
#include "gcsim/policy.hpp"

namespace {

gcsim::ValidatedScenario bench_scenario(gcsim::SchemeKind scheme, double duration) {
    gcsim::Scenario s;
    s.topology = gcsim::Topology::ring(6);
    s.traffic.new_call_rate = 6.0;
    s.traffic.mean_call_duration = 1.0;
    s.traffic.mean_cell_dwell = 1.0;
    s.traffic.mobility_mode = gcsim::MobilityMode::Endogenous;
    s.policy.total_channels = 10;
    s.policy.initial_guard = 2;
    s.policy.guard_min = 0;
    s.policy.guard_max = 5;
    s.policy.borrow_reserve = 1;
    s.policy.adjust_period = 50.0;
    s.scheme = scheme;
    s.sim_duration = duration;
    s.warmup = duration / 10;
    s.base_seed = 1;
    auto validated = gcsim::validate_scenario(std::move(s));
    return *validated.scenario;
}

void BM_admit(benchmark::State& state) {
    gcsim::PolicyParams params;
    params.total_channels = 10;
    params.guard_max = 5;
    params.borrow_reserve = 1;
    gcsim::CellChannelState cell{10, 2, 8, 0};
    for (auto _ : state) {
        for (gcsim::SchemeKind scheme : gcsim::kAllSchemes) {
            auto out = gcsim::admit(scheme, cell, gcsim::CallType::NewCall, params);
            benchmark::DoNotOptimize(out);
        }
    }
}
BENCHMARK(BM_admit);

void BM_run_replication(benchmark::State& state) {
    const double duration = static_cast<double>(state.range(0));
    auto scenario = bench_scenario(gcsim::SchemeKind::DgcaCbs, duration);
    std::int64_t events = 0;
    int rep = 0;
    for (auto _ : state) {
        auto result = gcsim::run_replication(scenario, rep++);
        auto t = result.totals();
        // Arrivals, lifecycle milestones and completions dominate the event count.
        events += t.new_attempts + t.handoff_attempts + t.completions;
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(events);
}
BENCHMARK(BM_run_replication)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

} // namespace
