#include <benchmark/benchmark.h>
#include <fsmwt/capacity.hpp>
#include <fsmwt/channels.hpp>
#include <fsmwt/markov.hpp>
#include <fsmwt/region.hpp>

using namespace fsmwt;

static channels::DiscreteWiretapChannel bsc_pair() {
    Mat main(4, 2), wt(2, 2);
    double ps[2] = {0.03, 0.08};
    for (int s = 0; s < 2; ++s)
        for (int x = 0; x < 2; ++x) {
            main(s * 2 + x, x) = 1.0 - ps[s];
            main(s * 2 + x, 1 - x) = ps[s];
        }
    wt(0, 0) = 0.8;
    wt(0, 1) = 0.2;
    wt(1, 0) = 0.2;
    wt(1, 1) = 0.8;
    return channels::degraded_from(2, 2, 2, 2, main.a, wt);
}

static void BM_GaussianCapacity(benchmark::State &state) {
    channels::GaussianSpec spec;
    spec.sigma2 = {1.0, 100.0};
    spec.sigma2_w = 2000.0;
    spec.p0 = 100.0;
    auto chain = markov::two_state(0.9, 1.0);
    bool fb = state.range(0) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(capacity::gaussian_capacity(spec, chain, 1, fb));
}
BENCHMARK(BM_GaussianCapacity)->Arg(0)->Arg(1);

static void BM_FadingCapacity(benchmark::State &state) {
    channels::FadingSpec fade;
    fade.base.sigma2 = {1.0, 100.0};
    fade.base.sigma2_w = 200.0;
    fade.base.p0 = 100.0;
    fade.g = {1.0, 0.5};
    fade.l = {0.8, 0.2};
    auto chain = markov::two_state(0.9, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(capacity::fading_capacity(fade, chain, 1, false));
}
BENCHMARK(BM_FadingCapacity);

static void BM_DiscreteCapacity(benchmark::State &state) {
    auto ch = bsc_pair();
    auto chain = markov::two_state(0.5, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(capacity::secrecy_capacity_discrete(ch, chain, 1));
}
BENCHMARK(BM_DiscreteCapacity);

static void BM_TraceRegion(benchmark::State &state) {
    auto ch = bsc_pair();
    auto chain = markov::two_state(0.5, 1.0);
    int points = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(region::trace_degraded_region(ch, chain, 1, false, points));
}
BENCHMARK(BM_TraceRegion)->Arg(9)->Arg(25);

BENCHMARK_MAIN();
