#include <benchmark/benchmark.h>
#include <fsmwt/capacity.hpp>
#include <fsmwt/channels.hpp>
#include <fsmwt/codec.hpp>
#include <fsmwt/markov.hpp>

#include <random>

using namespace fsmwt;

static channels::DiscreteWiretapChannel bsc_pair() {
    Mat main(4, 2), wt(2, 2);
    double ps[2] = {0.02, 0.05};
    for (int s = 0; s < 2; ++s)
        for (int x = 0; x < 2; ++x) {
            main(s * 2 + x, x) = 1.0 - ps[s];
            main(s * 2 + x, 1 - x) = ps[s];
        }
    wt(0, 0) = 0.85;
    wt(0, 1) = 0.15;
    wt(1, 0) = 0.15;
    wt(1, 1) = 0.85;
    return channels::degraded_from(2, 2, 2, 2, main.a, wt);
}

static capacity::InputLawFamily uniform_input() {
    capacity::InputLawFamily input;
    input.k = 2;
    input.nx = 2;
    input.rows.assign(4, 0.5);
    return input;
}

static void BM_BuildCode(benchmark::State &state) {
    auto ch = bsc_pair();
    auto chain = markov::two_state(0.5, 1.0);
    auto input = uniform_input();
    std::vector<codec::ComponentRates> rates(2, {0.2, 0.4, 0.2});
    for (auto _ : state)
        benchmark::DoNotOptimize(codec::build_code(ch, chain, 1, rates, input, 10, 42));
}
BENCHMARK(BM_BuildCode);

static void BM_EncodeDecode(benchmark::State &state) {
    auto ch = bsc_pair();
    auto chain = markov::two_state(0.5, 1.0);
    auto input = uniform_input();
    std::vector<codec::ComponentRates> rates(2, {0.2, 0.4, 0.2});
    auto code = codec::build_code(ch, chain, 1, rates, input, 10, 42);
    std::vector<int> sd_seq = {0, 1, 0, 0, 1, 1, 0, 1, 0, 1};
    std::vector<int> s_seq = {1, 0, 0, 1, 1, 0, 1, 0, 1, 0};
    codec::Message w{{1, 0}, {0, 1}};
    std::mt19937_64 rng(7);
    for (auto _ : state) {
        auto x = codec::encode(code, w, sd_seq, nullptr, rng);
        benchmark::DoNotOptimize(codec::decode(code, ch, x, s_seq, sd_seq));
    }
}
BENCHMARK(BM_EncodeDecode);

static void BM_ExactEquivocation(benchmark::State &state) {
    auto ch = bsc_pair();
    auto chain = markov::two_state(0.5, 1.0);
    auto input = uniform_input();
    std::vector<codec::ComponentRates> rates(2, {0.25, 0.25, 0.25});
    int N = static_cast<int>(state.range(0));
    auto code = codec::build_code(ch, chain, 1, rates, input, N, 42);
    for (auto _ : state)
        benchmark::DoNotOptimize(codec::exact_equivocation(code, ch, chain));
}
BENCHMARK(BM_ExactEquivocation)->Arg(8)->Arg(10)->Arg(12);

static void BM_RunExperiment(benchmark::State &state) {
    auto ch = bsc_pair();
    auto chain = markov::two_state(0.5, 1.0);
    auto input = uniform_input();
    codec::ExperimentSpec spec;
    spec.d = 1;
    spec.N = 10;
    spec.blocks = 100;
    spec.seed = 5;
    spec.rates.assign(2, {0.2, 0.4, 0.2});
    for (auto _ : state)
        benchmark::DoNotOptimize(codec::run_experiment(ch, chain, input, spec));
}
BENCHMARK(BM_RunExperiment);

BENCHMARK_MAIN();
