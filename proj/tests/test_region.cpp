#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fsmwt/region.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

using namespace fsmwt;
using namespace fsmwt::region;

namespace {

channels::DiscreteWiretapChannel bsc_pair(double p0, double p1, double q) {
    std::vector<double> main = {1 - p0, p0, p0, 1 - p0, 1 - p1, p1, p1, 1 - p1};
    Mat wt(2, 2);
    wt(0, 0) = 1 - q;
    wt(0, 1) = q;
    wt(1, 0) = q;
    wt(1, 1) = 1 - q;
    return channels::degraded_from(2, 2, 2, 2, main, wt);
}

// V carries X directly (singleton U), uniform over nv = nx values.
infotheory::AuxiliaryScheme identity_scheme(int k, int nx) {
    infotheory::AuxiliaryScheme aux;
    aux.nu = 1;
    aux.nv = nx;
    aux.k = k;
    aux.nx = nx;
    aux.pu.assign(static_cast<size_t>(k), 1.0);
    aux.pv.assign(static_cast<size_t>(k) * nx, 1.0 / nx);
    aux.px.assign(static_cast<size_t>(nx) * k * nx, 0.0);
    for (int v = 0; v < nx; ++v)
        for (int sd = 0; sd < k; ++sd)
            aux.px[(static_cast<size_t>(v) * k + sd) * nx + v] = 1.0;
    return aux;
}

std::vector<double> random_simplex(std::mt19937_64 &rng, size_t n) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (auto &x : v) {
        x = -std::log((rng() >> 11) * 0x1.0p-53 + 1e-300);
        sum += x;
    }
    for (auto &x : v) x /= sum;
    return v;
}

// Random V law with U = v >> 1 a deterministic function of V and X = v & 1.
infotheory::AuxiliaryScheme function_scheme(std::mt19937_64 &rng, int k) {
    const int nv = 4, nu = 2, nx = 2;
    std::vector<std::vector<double>> pv_sd;
    for (int sd = 0; sd < k; ++sd) pv_sd.push_back(random_simplex(rng, nv));

    infotheory::AuxiliaryScheme aux;
    aux.nu = nu;
    aux.nv = nv;
    aux.k = k;
    aux.nx = nx;
    aux.pu.assign(static_cast<size_t>(k) * nu, 0.0);
    for (int sd = 0; sd < k; ++sd)
        for (int v = 0; v < nv; ++v) aux.pu[static_cast<size_t>(sd) * nu + (v >> 1)] += pv_sd[sd][v];
    aux.pv.assign(static_cast<size_t>(nu) * k * nv, 0.0);
    for (int u = 0; u < nu; ++u)
        for (int sd = 0; sd < k; ++sd)
            for (int v = 0; v < nv; ++v)
                if ((v >> 1) == u)
                    aux.pv[(static_cast<size_t>(u) * k + sd) * nv + v] =
                        pv_sd[sd][v] / aux.pu[static_cast<size_t>(sd) * nu + u];
    aux.px.assign(static_cast<size_t>(nu) * nv * k * nx, 0.0);
    for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nv; ++v)
            for (int sd = 0; sd < k; ++sd)
                aux.px[((static_cast<size_t>(u) * nv + v) * k + sd) * nx + (v & 1)] = 1.0;
    return aux;
}

} // namespace

TEST_CASE("outer feedback cap equals the cascade closed form") {
    // State-independent BSC(0.02) main stage, BSC(0.1) wiretap stage, uniform
    // X carried by V: H(Y|Z,U,S,Sd) = h(0.1), R cap = 1 - h(0.02). The clamp
    // stays inactive because h(0.1) < 1 - h(0.02).
    auto ch = bsc_pair(0.02, 0.02, 0.1);
    auto chain = markov::two_state(0.5, 1.0);
    auto joint = infotheory::assemble_joint(chain, 1, identity_scheme(2, 2), ch);

    auto pr = eval_outer_feedback(joint, ch);
    CHECK(pr.r == doctest::Approx(0.8585594574581793).epsilon(1e-10));
    CHECK(pr.re == doctest::Approx(0.4689955935892812).epsilon(1e-10));

    auto pi = eval_inner(joint);
    CHECK(pi.r == doctest::Approx(pr.r).epsilon(1e-12));
    CHECK(pi.re == doctest::Approx(0.3763120841834424).epsilon(1e-10));

    // Same joint, same formulas through the outer evaluator.
    auto po = eval_outer(joint, ch);
    CHECK(po.r == doctest::Approx(pi.r).epsilon(1e-12));
    CHECK(po.re == doctest::Approx(pi.re).epsilon(1e-12));

    // With V = X on a degraded cascade the entropy identity turns the inner
    // feedback cap I(X;Y|..) - I(X;Z|..) + H(Y|X,Z,..) into exactly
    // H(Y|Z,..): the two feedback bounds meet.
    auto pf = eval_inner_feedback(joint);
    CHECK(pf.re == doctest::Approx(pr.re).epsilon(1e-10));
}

TEST_CASE("rate pairs respect 0 <= re <= r") {
    std::mt19937_64 rng(57);
    auto chain = markov::two_state(0.4, 2.0);
    for (int trial = 0; trial < 12; ++trial) {
        auto ch = bsc_pair(0.05 + 0.02 * (trial % 3), 0.1, 0.2);
        auto joint = infotheory::assemble_joint(chain, trial % 3, function_scheme(rng, 2), ch);
        for (auto pr : {eval_inner(joint), eval_inner_feedback(joint),
                        eval_outer(joint, ch), eval_outer_feedback(joint, ch)}) {
            CHECK(pr.re >= 0.0);
            CHECK(pr.re <= pr.r + 1e-12);
        }
    }
}

TEST_CASE("bound ordering when U is a function of V") {
    std::mt19937_64 rng(91);
    auto chain = markov::two_state(0.6, 1.5);
    for (int trial = 0; trial < 12; ++trial) {
        auto ch = bsc_pair(0.02, 0.04, 0.08 + 0.02 * (trial % 4));
        auto joint = infotheory::assemble_joint(chain, 1 + trial % 3, function_scheme(rng, 2), ch);
        auto in = eval_inner(joint);
        auto inf = eval_inner_feedback(joint);
        auto outf = eval_outer_feedback(joint, ch);
        CHECK(in.re <= inf.re + 1e-10);
        CHECK(inf.re <= outf.re + 1e-10);
    }
}

TEST_CASE("evaluators reject joints that break their admissibility") {
    auto ch = bsc_pair(0.1, 0.2, 0.25);
    auto chain = markov::two_state(0.5, 1.0);

    // Hand-built joint where X copies the current state S: consistent with
    // the channel law, but not with the S -> Sd -> (U,V,X) chain.
    auto dj = markov::delayed_joint(chain, 1);
    std::vector<infotheory::Axis> axes = {{"U", 1}, {"V", 1}, {"Sd", 2}, {"S", 2},
                                          {"X", 2}, {"Y", 2}, {"Z", 2}};
    std::vector<double> probs;
    for (int sd = 0; sd < 2; ++sd)
        for (int s = 0; s < 2; ++s)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    for (int z = 0; z < 2; ++z)
                        probs.push_back(x == s ? dj.table(sd, s) * ch.p(s, x, y, z) : 0.0);
    // Reorder into (U,V,Sd,S,X,Y,Z) with singleton U,V leading: already so.
    infotheory::JointTable bad(axes, probs);
    CHECK_THROWS_AS(eval_inner(bad), ValidationError);
    CHECK_THROWS_AS(eval_inner_feedback(bad), ValidationError);
    auto pr = eval_outer(bad, ch); // channel-consistent, so admissible here
    CHECK(pr.r >= 0.0);

    // Wrong channel for the outer evaluators.
    auto other = bsc_pair(0.3, 0.4, 0.45);
    auto joint = infotheory::assemble_joint(chain, 1, identity_scheme(2, 2), ch);
    CHECK_THROWS_AS(eval_outer(joint, other), ValidationError);
    CHECK_THROWS_AS(eval_outer_feedback(joint, other), ValidationError);
}

TEST_CASE("degraded boundary is sane and corners at the capacity") {
    auto ch = bsc_pair(0.05, 0.15, 0.3);
    auto chain = markov::two_state(0.7, 1.0);
    const long long d = 1;

    auto plain = trace_degraded_region(ch, chain, d, false, 17);
    CHECK(plain.kind == "inner");
    REQUIRE(plain.points.size() >= 17);
    double prev = -1.0, best = 0.0;
    for (const auto &pt : plain.points) {
        CHECK(pt.r >= prev - 1e-12);
        CHECK(pt.re >= 0.0);
        CHECK(pt.re <= pt.r + 1e-12);
        prev = pt.r;
        best = std::max(best, pt.re);
    }
    auto cap = capacity::secrecy_capacity_discrete(ch, chain, d);
    CHECK(best == doctest::Approx(cap.value).epsilon(1e-6).scale(1.0));

    auto fb = trace_degraded_region(ch, chain, d, true, 17);
    CHECK(fb.kind == "inner-feedback");
    double best_fb = 0.0;
    for (const auto &pt : fb.points) best_fb = std::max(best_fb, pt.re);
    auto cap_fb = capacity::secrecy_capacity_discrete_feedback(ch, chain, d);
    CHECK(best_fb == doctest::Approx(cap_fb.value).epsilon(1e-6).scale(1.0));

    // Feedback dominates pointwise on the shared uniform grid.
    std::map<double, double> fb_re;
    for (const auto &pt : fb.points) fb_re[pt.r] = std::max(fb_re[pt.r], pt.re);
    int compared = 0;
    for (const auto &pt : plain.points) {
        auto it = fb_re.find(pt.r);
        if (it == fb_re.end()) continue;
        CHECK(it->second >= pt.re - 1e-9);
        ++compared;
    }
    CHECK(compared >= 17);
}

TEST_CASE("boundary tracing refuses bad inputs") {
    auto ch = bsc_pair(0.1, 0.2, 0.3);
    auto chain = markov::two_state(0.5, 1.0);
    CHECK_THROWS_AS(trace_degraded_region(ch, chain, 1, false, 1), ValidationError);

    std::vector<double> table(16, 0.0);
    for (int s = 0; s < 2; ++s)
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                table[((static_cast<size_t>(s) * 2 + x) * 2 + y) * 2 + x] = y == x ? 0.7 : 0.3;
    channels::DiscreteWiretapChannel leaky(2, 2, 2, 2, table);
    CHECK_THROWS_AS(trace_degraded_region(leaky, chain, 1, false, 8), ValidationError);
}
