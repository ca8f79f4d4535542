#include <benchmark/benchmark.h>
#include <fsmwt/channels.hpp>
#include <fsmwt/infotheory.hpp>
#include <fsmwt/markov.hpp>

#include <random>
#include <vector>

using namespace fsmwt;

static std::vector<double> random_simplex(std::mt19937_64 &rng, size_t n) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto &v : p) sum += v = u(rng);
    for (auto &v : p) v /= sum;
    return p;
}

static infotheory::JointTable model_joint() {
    auto chain = markov::two_state(0.5, 1.0);
    std::mt19937_64 rng(11);
    Mat main(4, 2), wt(2, 2);
    main.a = random_simplex(rng, 8);
    for (int r = 0; r < 4; ++r) {
        double s = main(r, 0) + main(r, 1);
        main(r, 0) /= s;
        main(r, 1) /= s;
    }
    wt(0, 0) = 0.85;
    wt(0, 1) = 0.15;
    wt(1, 0) = 0.2;
    wt(1, 1) = 0.8;
    auto ch = channels::degraded_from(2, 2, 2, 2, main.a, wt);
    infotheory::AuxiliaryScheme aux;
    aux.nu = 2;
    aux.nv = 2;
    aux.k = 2;
    aux.nx = 2;
    aux.pu = {0.6, 0.4, 0.3, 0.7};
    aux.pv = random_simplex(rng, 8);
    for (int r = 0; r < 4; ++r) {
        double s = aux.pv[2 * r] + aux.pv[2 * r + 1];
        aux.pv[2 * r] /= s;
        aux.pv[2 * r + 1] /= s;
    }
    aux.px = random_simplex(rng, 16);
    for (int r = 0; r < 8; ++r) {
        double s = aux.px[2 * r] + aux.px[2 * r + 1];
        aux.px[2 * r] /= s;
        aux.px[2 * r + 1] /= s;
    }
    return infotheory::assemble_joint(chain, 2, aux, ch);
}

static void BM_AssembleJoint(benchmark::State &state) {
    auto chain = markov::two_state(0.5, 1.0);
    Mat main(4, 2), wt(2, 2);
    main(0, 0) = 0.95;
    main(0, 1) = 0.05;
    main(1, 0) = 0.05;
    main(1, 1) = 0.95;
    main(2, 0) = 0.85;
    main(2, 1) = 0.15;
    main(3, 0) = 0.15;
    main(3, 1) = 0.85;
    wt(0, 0) = 0.8;
    wt(0, 1) = 0.2;
    wt(1, 0) = 0.2;
    wt(1, 1) = 0.8;
    auto ch = channels::degraded_from(2, 2, 2, 2, main.a, wt);
    auto aux = infotheory::AuxiliaryScheme::deterministic(2, 2, {0.5, 0.5, 0.5, 0.5});
    for (auto _ : state) benchmark::DoNotOptimize(infotheory::assemble_joint(chain, 4, aux, ch));
}
BENCHMARK(BM_AssembleJoint);

static void BM_CondMutualInfo(benchmark::State &state) {
    auto t = model_joint();
    for (auto _ : state)
        benchmark::DoNotOptimize(infotheory::cond_mutual_info(t, {"X"}, {"Y"}, {"S", "Sd"}));
}
BENCHMARK(BM_CondMutualInfo);

static void BM_DegradedIdentity(benchmark::State &state) {
    auto t = model_joint();
    for (auto _ : state) benchmark::DoNotOptimize(infotheory::degraded_identity_check(t));
}
BENCHMARK(BM_DegradedIdentity);

static void BM_CsiszarSum(benchmark::State &state) {
    std::mt19937_64 rng(23);
    int n = static_cast<int>(state.range(0));
    size_t cells = n == 2 ? 64 : 256;
    std::vector<infotheory::Axis> axes{{"W", 2}};
    for (int i = 1; i <= n; ++i) axes.push_back({"Y" + std::to_string(i), 2});
    for (int i = 1; i <= n; ++i) axes.push_back({"Z" + std::to_string(i), 2});
    axes.push_back({"S", 2});
    infotheory::JointTable t(axes, random_simplex(rng, cells));
    for (auto _ : state) benchmark::DoNotOptimize(infotheory::csiszar_sum_check(t, n));
}
BENCHMARK(BM_CsiszarSum)->Arg(2)->Arg(3);

BENCHMARK_MAIN();
