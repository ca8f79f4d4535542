#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fsmwt/codec.hpp>
#include <fsmwt/io.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fsmwt;
using namespace fsmwt::codec;

namespace {

channels::DiscreteWiretapChannel bsc_pair(double p0, double p1, double q) {
    std::vector<double> main = {1 - p0, p0, p0, 1 - p0, 1 - p1, p1, p1, 1 - p1};
    Mat wiretap(2, 2);
    wiretap(0, 0) = 1 - q;
    wiretap(0, 1) = q;
    wiretap(1, 0) = q;
    wiretap(1, 1) = 1 - q;
    return channels::degraded_from(2, 2, 2, 2, main, wiretap);
}

channels::DiscreteWiretapChannel single_bsc(double p, double q) {
    std::vector<double> main = {1 - p, p, p, 1 - p};
    Mat wiretap(2, 2);
    wiretap(0, 0) = 1 - q;
    wiretap(0, 1) = q;
    wiretap(1, 0) = q;
    wiretap(1, 1) = 1 - q;
    return channels::degraded_from(1, 2, 2, 2, main, wiretap);
}

markov::StateChain one_state() {
    Mat K(1, 1);
    K(0, 0) = 1.0;
    return markov::StateChain(K);
}

capacity::InputLawFamily uniform_input(int k, int nx) {
    capacity::InputLawFamily in;
    in.k = k;
    in.nx = nx;
    in.rows.assign(static_cast<size_t>(k) * nx, 1.0 / nx);
    return in;
}

double h2(const std::vector<double> &p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

} // namespace

TEST_CASE("build_code splits lengths by the stationary law") {
    auto chain = markov::two_state(0.5, 3.0); // pi = (0.75, 0.25)
    auto ch = bsc_pair(0.05, 0.05, 0.2);
    std::vector<ComponentRates> rates(2);
    rates[0] = {0.25, 0.25, 0.25};
    rates[1] = {0.5, 0.5, 0.0};
    auto code = build_code(ch, chain, 1, rates, uniform_input(2, 2), 10, 11);

    REQUIRE(code.len.size() == 2);
    CHECK(code.len[0] + code.len[1] == 10);
    auto pi = markov::stationary(chain).pi;
    for (int c = 0; c < 2; ++c) CHECK(std::abs(code.len[c] - 10.0 * pi[c]) <= 1.0);

    // Component 0: 8 slots at rate triple (.25,.25,.25) -> 2 bits secret+noise.
    const auto &b0 = code.books[0];
    CHECK(b0.na == 4);
    CHECK(b0.nb == 4);
    CHECK(b0.nj == 4);
    const auto &b1 = code.books[1];
    CHECK(b1.na == 2);
    CHECK(b1.nb == 2);
    CHECK(b1.nj == 1);

    for (const auto &bk : code.books) {
        REQUIRE(static_cast<int>(bk.bin_lo.size()) == bk.nj);
        int covered = 0;
        for (int j = 0; j < bk.nj; ++j) {
            CHECK(bk.bin_lo[j] == covered);
            CHECK(bk.bin_sz[j] >= 1);
            covered += bk.bin_sz[j];
        }
        CHECK(covered == bk.nb);
        CHECK(bk.words.size() == static_cast<size_t>(bk.na) * bk.nb * bk.len);
        for (auto sym : bk.words) CHECK(sym < 2);
        for (int b = 0; b < bk.nb; ++b) {
            int j = bk.bin_of(b);
            CHECK(bk.bin_lo[j] <= b);
            CHECK(b < bk.bin_lo[j] + bk.bin_sz[j]);
        }
    }

    double want = (std::log2(4.0 * 4.0) + std::log2(2.0 * 1.0)) / 10.0;
    CHECK(code.message_rate() == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("build_code is reproducible per seed") {
    auto chain = markov::two_state(0.3, 1.0);
    auto ch = bsc_pair(0.05, 0.1, 0.2);
    std::vector<ComponentRates> rates(2, {0.2, 0.4, 0.2});
    auto in = uniform_input(2, 2);
    auto a = build_code(ch, chain, 1, rates, in, 10, 42);
    auto b = build_code(ch, chain, 1, rates, in, 10, 42);
    auto c = build_code(ch, chain, 1, rates, in, 10, 43);
    for (int i = 0; i < 2; ++i) CHECK(a.books[i].words == b.books[i].words);
    bool differs = false;
    for (int i = 0; i < 2; ++i)
        if (a.books[i].words != c.books[i].words) differs = true;
    CHECK(differs);
}

TEST_CASE("encode multiplexes components along the delayed-state sequence") {
    // Deterministic books: nb = nj = 1, so each message has a unique word.
    auto chain = markov::two_state(0.0, 1.0);
    auto ch = bsc_pair(0.05, 0.05, 0.2);
    std::vector<ComponentRates> rates(2, {1.0 / 3.0, 0.0, 0.0});
    auto code = build_code(ch, chain, 1, rates, uniform_input(2, 2), 6, 9);
    REQUIRE(code.len[0] == 3);
    REQUIRE(code.books[0].na == 2);
    REQUIRE(code.books[0].nb == 1);

    Message w = {{1, 0}, {0, 0}};
    std::mt19937_64 rng(1);

    std::vector<int> alt = {0, 1, 0, 1, 0, 1};
    auto x = encode(code, w, alt, nullptr, rng);
    REQUIRE(x.size() == 6);
    for (int i = 0; i < 3; ++i) {
        CHECK(x[2 * i] == code.books[0].symbol(1, 0, i));
        CHECK(x[2 * i + 1] == code.books[1].symbol(0, 0, i));
    }

    // All slots on one component: the word, then zero padding.
    std::vector<int> flat = {0, 0, 0, 0, 0, 0};
    auto xp = encode(code, w, flat, nullptr, rng);
    for (int i = 0; i < 3; ++i) CHECK(xp[i] == code.books[0].symbol(1, 0, i));
    for (int i = 3; i < 6; ++i) CHECK(xp[i] == 0);

    CHECK_THROWS_AS(encode(code, w, std::vector<int>{0, 1}, nullptr, rng), ValidationError);
    Message bad = {{2, 0}, {0, 0}};
    CHECK_THROWS_AS(encode(code, bad, alt, nullptr, rng), ValidationError);
}

TEST_CASE("keys shift the bin index modulo the bin count") {
    auto chain = one_state();
    auto ch = single_bsc(0.05, 0.2);
    std::vector<ComponentRates> rates = {{0.25, 0.5, 0.5}};
    auto code = build_code(ch, chain, 0, rates, uniform_input(1, 2), 4, 5);
    REQUIRE(code.books[0].nj == 4);

    std::vector<int> sd(4, 0);
    std::vector<int> keys = {3};
    for (int j = 0; j < 4; ++j) {
        std::mt19937_64 r1(7), r2(7);
        auto keyed = encode(code, {{1, j}}, sd, &keys, r1);
        auto plain = encode(code, {{1, (j + 3) % 4}}, sd, nullptr, r2);
        CHECK(keyed == plain);
    }
}

TEST_CASE("decode round-trips every message over a clean channel") {
    auto chain = markov::two_state(0.5, 1.0);
    auto ch = bsc_pair(0.0, 0.0, 0.2); // noiseless main, so y equals x
    std::vector<ComponentRates> rates(2, {0.2, 0.4, 0.2});
    // Seed chosen so every drawn word is distinct within its book; a clean
    // channel then pins the argmax uniquely.
    auto code = build_code(ch, chain, 0, rates, uniform_input(2, 2), 10, 2);
    REQUIRE(code.books[0].na == 2);
    REQUIRE(code.books[0].nb == 4);
    REQUIRE(code.books[0].nj == 2);

    std::vector<int> seq = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    std::mt19937_64 rng(3);
    int decoded = 0;
    for (int a0 = 0; a0 < 2; ++a0)
        for (int j0 = 0; j0 < 2; ++j0)
            for (int a1 = 0; a1 < 2; ++a1)
                for (int j1 = 0; j1 < 2; ++j1) {
                    Message w = {{a0, j0}, {a1, j1}};
                    auto x = encode(code, w, seq, nullptr, rng);
                    auto res = decode(code, ch, x, seq, seq);
                    CHECK(res.est[0].a == a0);
                    CHECK(res.est[0].j == j0);
                    CHECK(res.est[1].a == a1);
                    CHECK(res.est[1].j == j1);
                    CHECK(res.margin > 0.0);
                    ++decoded;
                }
    CHECK(decoded == 16);
}

TEST_CASE("exact_equivocation matches hand enumeration at N = 1") {
    auto chain = one_state();
    auto ch = single_bsc(0.1, 0.2);
    std::vector<ComponentRates> rates = {{1.0, 0.0, 0.0}};
    auto code = build_code(ch, chain, 0, rates, uniform_input(1, 2), 1, 4);
    REQUIRE(code.books[0].na == 2);
    REQUIRE(code.books[0].nb == 1);

    int w0 = code.books[0].symbol(0, 0, 0);
    int w1 = code.books[0].symbol(1, 0, 0);
    double h = 0.0;
    for (int z = 0; z < 2; ++z) {
        double p0 = 0.5 * ch.pz(0, w0, z);
        double p1 = 0.5 * ch.pz(0, w1, z);
        double pz = p0 + p1;
        if (pz > 0.0) h += pz * h2({p0 / pz, p1 / pz});
    }
    CHECK(exact_equivocation(code, ch, chain) == doctest::Approx(h).epsilon(1e-12));
    // Identical words would leave the eavesdropper with the full bit.
    if (w0 != w1) CHECK(exact_equivocation(code, ch, chain) < 1.0);
}

TEST_CASE("exact_equivocation matches hand enumeration at N = 2 with noise words") {
    auto chain = one_state();
    auto ch = single_bsc(0.05, 0.3);
    std::vector<ComponentRates> rates = {{0.5, 0.5, 0.0}};
    auto code = build_code(ch, chain, 0, rates, uniform_input(1, 2), 2, 21);
    const auto &bk = code.books[0];
    REQUIRE(bk.na == 2);
    REQUIRE(bk.nb == 2);
    REQUIRE(bk.nj == 1);

    // H(A | Z^2) with the in-bin index marginalized uniformly.
    double h = 0.0;
    for (int z0 = 0; z0 < 2; ++z0)
        for (int z1 = 0; z1 < 2; ++z1) {
            std::vector<double> pa(2, 0.0);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    pa[a] += 0.25 * ch.pz(0, bk.symbol(a, b, 0), z0) *
                             ch.pz(0, bk.symbol(a, b, 1), z1);
            double pz = pa[0] + pa[1];
            if (pz > 0.0) h += pz * h2({pa[0] / pz, pa[1] / pz});
        }
    CHECK(exact_equivocation(code, ch, chain) == doctest::Approx(h / 2.0).epsilon(1e-12));
}

TEST_CASE("feedback keys raise the exact equivocation") {
    auto chain = one_state();
    auto ch = single_bsc(0.05, 0.2);
    std::vector<ComponentRates> rates = {{1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0}};
    auto code = build_code(ch, chain, 0, rates, uniform_input(1, 2), 6, 31);
    REQUIRE(code.books[0].nj == 4);

    double plain = exact_equivocation(code, ch, chain);
    std::vector<int> cells = {4};
    double keyed = exact_equivocation(code, ch, chain, &cells);
    double rate = code.message_rate();
    CHECK(plain <= rate + 1e-9);
    CHECK(keyed <= rate + 1e-9);
    CHECK(keyed >= plain - 1e-12);
    // A full-cycle key makes the bin index invisible to the eavesdropper.
    CHECK(keyed > plain + 0.01);
}

TEST_CASE("a zero-information code has zero equivocation") {
    auto chain = one_state();
    auto ch = single_bsc(0.1, 0.2);
    std::vector<ComponentRates> rates = {{0.0, 0.5, 0.0}};
    auto code = build_code(ch, chain, 0, rates, uniform_input(1, 2), 4, 8);
    CHECK(code.message_rate() == 0.0);
    CHECK(exact_equivocation(code, ch, chain) == 0.0);
}

TEST_CASE("equivocation stays within [0, message rate] on a two-state instance") {
    auto chain = markov::two_state(0.5, 1.0);
    auto ch = bsc_pair(0.02, 0.02, 0.1);
    std::vector<ComponentRates> rates(2, {0.25, 0.25, 0.25});
    auto code = build_code(ch, chain, 1, rates, uniform_input(2, 2), 8, 17);
    double eq = exact_equivocation(code, ch, chain);
    CHECK(eq >= 0.0);
    CHECK(eq <= code.message_rate() + 1e-9);

    // Thread count must not change the enumerated value.
    CHECK(exact_equivocation(code, ch, chain, nullptr, 3) == eq);
}

TEST_CASE("generate_key is deterministic, ranged, and guarded") {
    std::vector<int> y = {0, 1, 1, 0, 1, 0, 0, 1};
    int k1 = generate_key(y, 0.5, 99);
    int k2 = generate_key(y, 0.5, 99);
    CHECK(k1 == k2);
    CHECK(k1 >= 0);
    CHECK(k1 < 16); // ceil(8 * 0.5) = 4 bits
    CHECK(generate_key(y, 0.0, 99) == 0);
    std::vector<int> y2 = y;
    y2[3] = 1;
    // Different blocks and different seeds both reseed the hash.
    CHECK((generate_key(y2, 0.5, 99) != k1 || generate_key(y, 0.5, 100) != k1));
    CHECK_THROWS_AS(generate_key(y, 4.0, 99), GuardrailError);
}

TEST_CASE("guardrails refuse oversized instances") {
    auto chain = markov::two_state(0.5, 1.0);
    auto ch = bsc_pair(0.05, 0.05, 0.2);
    auto in = uniform_input(2, 2);
    std::vector<ComponentRates> rates(2, {0.1, 0.1, 0.0});
    CHECK_THROWS_AS(build_code(ch, chain, 1, rates, in, 13, 1), GuardrailError);

    // Per-component word budget: 12 slots at full rate wants 2^24 words.
    std::vector<ComponentRates> fat = {{1.0, 1.0, 0.0}};
    CHECK_THROWS_AS(build_code(single_bsc(0.1, 0.2), one_state(), 0, fat, uniform_input(1, 2), 12,
                               1),
                    GuardrailError);

    // Four-letter alphabets are past the enumeration cap.
    std::vector<double> ident(16, 0.0);
    for (int i = 0; i < 4; ++i) ident[i * 4 + i] = 1.0;
    Mat wt(4, 4);
    for (int i = 0; i < 4; ++i) wt(i, i) = 1.0;
    auto wide = channels::degraded_from(1, 4, 4, 4, ident, wt);
    std::vector<ComponentRates> one = {{0.1, 0.1, 0.0}};
    CHECK_THROWS_AS(build_code(wide, one_state(), 0, one, uniform_input(1, 4), 4, 1),
                    GuardrailError);

    // Enumeration cap: 2^12 * 3^12 z-and-state paths is far past 2^24.
    Mat K3(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) K3(i, j) = 1.0 / 3.0;
    markov::StateChain chain3(K3);
    std::vector<double> main3 = {0.9, 0.1, 0.1, 0.9, 0.8, 0.2, 0.2, 0.8, 0.7, 0.3, 0.3, 0.7};
    Mat wt2(2, 2);
    wt2(0, 0) = 0.8;
    wt2(0, 1) = 0.2;
    wt2(1, 0) = 0.2;
    wt2(1, 1) = 0.8;
    auto ch3 = channels::degraded_from(3, 2, 2, 2, main3, wt2);
    std::vector<ComponentRates> r3(3, {0.0, 0.0, 0.0});
    auto code3 = build_code(ch3, chain3, 0, r3, uniform_input(3, 2), 12, 1);
    CHECK_THROWS_AS(exact_equivocation(code3, ch3, chain3), GuardrailError);

    std::vector<ComponentRates> swapped(2, {0.1, 0.1, 0.2});
    CHECK_THROWS_AS(build_code(ch, chain, 1, swapped, in, 8, 1), ValidationError);
    CHECK_THROWS_AS(build_code(ch, chain, 1, {rates[0]}, in, 8, 1), ValidationError);
}

TEST_CASE("run_experiment is deterministic and reports coherent fields") {
    auto chain = markov::two_state(0.5, 1.0);
    auto ch = bsc_pair(0.02, 0.02, 0.1);
    auto in = uniform_input(2, 2);

    ExperimentSpec spec;
    spec.d = 1;
    spec.N = 8;
    spec.blocks = 40;
    spec.seed = 5;
    spec.rates.assign(2, {0.25, 0.25, 0.0});

    auto a = run_experiment(ch, chain, in, spec);
    auto b = run_experiment(ch, chain, in, spec);
    CHECK(a.error_rate == b.error_rate);
    CHECK(a.equivocation == b.equivocation);
    CHECK(a.analytic_secrecy == b.analytic_secrecy);
    CHECK(a.blocks == 40);
    CHECK(a.error_rate >= 0.0);
    CHECK(a.error_rate <= 1.0);
    CHECK(a.message_rate == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(a.equivocation >= 0.0);
    CHECK(a.equivocation <= a.message_rate + 1e-9);
    CHECK(a.analytic_secrecy > 0.0);

    ExperimentSpec fb = spec;
    fb.feedback = true;
    fb.rates.assign(2, {0.25, 0.25, 0.25});
    fb.key_rate = {0.25, 0.25};
    auto f1 = run_experiment(ch, chain, in, fb);
    auto f2 = run_experiment(ch, chain, in, fb);
    CHECK(f1.equivocation == f2.equivocation);
    CHECK(f1.feedback);
    CHECK(f1.equivocation >= 0.0);
    CHECK(f1.equivocation <= f1.message_rate + 1e-9);

    ExperimentSpec bad = fb;
    bad.d = 0;
    CHECK_THROWS_AS(run_experiment(ch, chain, in, bad), ValidationError);
}

TEST_CASE("an encoded block matches the golden dump") {
#ifdef FSMWT_GOLDEN_DIR
    const char *dir = FSMWT_GOLDEN_DIR;
#else
    const char *dir = std::getenv("FSMWT_GOLDEN_DIR");
#endif
    REQUIRE(dir != nullptr);
    std::ifstream f(std::string(dir) + "/codec_block.hex");
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();

    auto chain = markov::two_state(0.5, 1.0);
    auto ch = bsc_pair(0.02, 0.02, 0.1);
    std::vector<ComponentRates> rates(2, {0.25, 0.25, 0.25});
    auto code = build_code(ch, chain, 1, rates, uniform_input(2, 2), 8, 17);
    std::vector<int> seq = {0, 1, 1, 0, 0, 1, 0, 1};
    std::mt19937_64 rng(derive_seed(17, "golden-block"));
    auto x = encode(code, {{1, 1}, {0, 1}}, seq, nullptr, rng);

    std::string dump = io::hex_dump(x, 17);
    CHECK(dump == ss.str());
    uint64_t seed = 0;
    CHECK(io::hex_parse(dump, &seed) == x);
    CHECK(seed == 17);
}
