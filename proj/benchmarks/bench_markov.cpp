#include <benchmark/benchmark.h>
#include <fsmwt/markov.hpp>

using namespace fsmwt;

static markov::StateChain three_state() {
    Mat K(3, 3);
    K(0, 0) = 0.8;
    K(0, 1) = 0.15;
    K(0, 2) = 0.05;
    K(1, 0) = 0.1;
    K(1, 1) = 0.7;
    K(1, 2) = 0.2;
    K(2, 0) = 0.25;
    K(2, 1) = 0.25;
    K(2, 2) = 0.5;
    return markov::StateChain(K);
}

static void BM_TwoStatePower(benchmark::State &state) {
    auto chain = markov::two_state(0.9, 1.0);
    long long d = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(markov::power(chain, d));
}
BENCHMARK(BM_TwoStatePower)->Arg(1)->Arg(32)->Arg(1024)->Arg(1000000);

static void BM_ThreeStatePower(benchmark::State &state) {
    auto chain = three_state();
    long long d = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(markov::power(chain, d));
}
BENCHMARK(BM_ThreeStatePower)->Arg(32)->Arg(1024);

static void BM_Stationary(benchmark::State &state) {
    auto chain = three_state();
    for (auto _ : state) benchmark::DoNotOptimize(markov::stationary(chain));
}
BENCHMARK(BM_Stationary);

static void BM_DelayedJoint(benchmark::State &state) {
    auto chain = markov::two_state(0.5, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(markov::delayed_joint(chain, 16));
}
BENCHMARK(BM_DelayedJoint);

BENCHMARK_MAIN();
