#include <benchmark/benchmark.h>

#include "gcsim/oracle.hpp"

namespace {

void BM_erlang_b(benchmark::State& state) {
    const int channels = static_cast<int>(state.range(0));
    const double load = 0.8 * channels;
    for (auto _ : state) benchmark::DoNotOptimize(gcsim::erlang_b(channels, load));
}
BENCHMARK(BM_erlang_b)->Arg(10)->Arg(100)->Arg(1000)->Arg(10000);

void BM_cutoff_steady_state(benchmark::State& state) {
    const int channels = static_cast<int>(state.range(0));
    gcsim::ChainSpec spec{channels, channels / 5, 0.6 * channels, 0.2 * channels, 1.0};
    for (auto _ : state) {
        auto ss = gcsim::cutoff_steady_state(spec);
        benchmark::DoNotOptimize(ss.probabilities.data());
    }
}
BENCHMARK(BM_cutoff_steady_state)->Arg(10)->Arg(100)->Arg(1000)->Arg(10000);

} // namespace
