#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fsmwt/markov.hpp>

#include <cmath>

using namespace fsmwt;
using namespace fsmwt::markov;

namespace {

Mat three_state() {
    Mat K(3, 3);
    double rows[9] = {0.70, 0.20, 0.10, 0.05, 0.90, 0.05, 0.30, 0.30, 0.40};
    K.a.assign(rows, rows + 9);
    return K;
}

// Closed form for the two-state chain: K^d = Pi + u^d (I - Pi), Pi the
// stationary-rows matrix. Expanded per entry to stay independent of Mat.
Mat two_state_power_closed(double u, double c, long long d) {
    double pi0 = c / (1.0 + c), pi1 = 1.0 / (1.0 + c);
    double ud = std::pow(u, static_cast<double>(d));
    Mat m(2, 2);
    m(0, 0) = pi0 + ud * (1.0 - pi0);
    m(0, 1) = pi1 - ud * pi1;
    m(1, 0) = pi0 - ud * pi0;
    m(1, 1) = pi1 + ud * (1.0 - pi1);
    return m;
}

} // namespace

TEST_CASE("stationary law matches the eigenvector solution") {
    StateChain chain(three_state());
    auto law = stationary(chain);
    // Left-eigenvector oracle, computed externally and frozen.
    CHECK(law.pi[0] == doctest::Approx(0.20930232558139522).epsilon(1e-12));
    CHECK(law.pi[1] == doctest::Approx(0.6976744186046512).epsilon(1e-12));
    CHECK(law.pi[2] == doctest::Approx(0.09302325581395351).epsilon(1e-12));
}

TEST_CASE("matrix power matches the external oracle") {
    StateChain chain(three_state());
    Mat K5 = power(chain, 5);
    CHECK(K5(0, 0) == doctest::Approx(0.30928249999999996).epsilon(1e-12));
    CHECK(K5(0, 1) == doctest::Approx(0.5834950000000001).epsilon(1e-12));
    CHECK(K5(0, 2) == doctest::Approx(0.1072225).epsilon(1e-12));
    CHECK(K5(2, 0) == doctest::Approx(0.2713425).epsilon(1e-12));
    CHECK(K5(2, 1) == doctest::Approx(0.6236175).epsilon(1e-12));
    CHECK(K5(2, 2) == doctest::Approx(0.10504000000000001).epsilon(1e-12));
}

TEST_CASE("power edge cases") {
    StateChain chain(three_state());
    Mat I = power(chain, 0);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(I(r, c) == (r == c ? 1.0 : 0.0));

    Mat lim = power_limit(chain);
    Mat deep = power(chain, 400);
    CHECK(lim.max_abs_diff(deep) < 1e-12);
    Mat beyond = power(chain, kMaxExactDelay + 5);
    CHECK(lim.max_abs_diff(beyond) == 0.0);
}

TEST_CASE("two-state chain follows the spectral closed form") {
    for (double u : {0.02, 0.5, 0.9}) {
        for (double c : {0.25, 1.0, 4.0}) {
            StateChain chain = two_state(u, c);
            for (long long d : {0LL, 1LL, 3LL, 10LL, 32LL}) {
                Mat got = power(chain, d);
                Mat want = two_state_power_closed(u, c, d);
                CHECK(got.max_abs_diff(want) < 1e-10);
            }
        }
    }
}

TEST_CASE("two-state parameters round-trip") {
    auto p = TwoStateParams::from_memory(0.6, 2.5);
    CHECK(p.u() == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(p.c() == doctest::Approx(2.5).epsilon(1e-12));
    StateChain chain = two_state(0.6, 2.5);
    CHECK(chain.K()(0, 1) == doctest::Approx(p.b).epsilon(1e-12));
    CHECK(chain.K()(1, 0) == doctest::Approx(p.g).epsilon(1e-12));
}

TEST_CASE("delayed joint marginals") {
    StateChain chain = two_state(0.7, 2.0);
    auto joint = delayed_joint(chain, 3);
    auto law = stationary(chain);
    // Row sums give the delayed-state marginal, column sums the current one;
    // both are stationary.
    for (int r = 0; r < 2; ++r) {
        double row = joint.table(r, 0) + joint.table(r, 1);
        double col = joint.table(0, r) + joint.table(1, r);
        CHECK(row == doctest::Approx(law.pi[r]).epsilon(1e-12));
        CHECK(col == doctest::Approx(law.pi[r]).epsilon(1e-12));
    }
    auto lim = delayed_joint_limit(chain);
    CHECK(lim.table(0, 0) == doctest::Approx(law.pi[0] * law.pi[0]).epsilon(1e-12));
    CHECK(lim.table(0, 1) == doctest::Approx(law.pi[0] * law.pi[1]).epsilon(1e-12));
}

TEST_CASE("construction rejects bad chains") {
    Mat notsquare(2, 3, 1.0 / 3.0);
    CHECK_THROWS_AS(StateChain{notsquare}, ValidationError);

    Mat notstoch(2, 2);
    notstoch(0, 0) = 0.6;
    notstoch(0, 1) = 0.5;
    notstoch(1, 0) = 0.5;
    notstoch(1, 1) = 0.5;
    CHECK_THROWS_AS(StateChain{notstoch}, ValidationError);

    // Reducible: state 1 absorbing, state 0 transient.
    Mat reducible(2, 2);
    reducible(0, 0) = 0.5;
    reducible(0, 1) = 0.5;
    reducible(1, 1) = 1.0;
    CHECK_THROWS_AS(StateChain{reducible}, ValidationError);

    // Periodic: deterministic 2-cycle.
    Mat periodic(2, 2);
    periodic(0, 1) = 1.0;
    periodic(1, 0) = 1.0;
    CHECK_THROWS_AS(StateChain{periodic}, ValidationError);

    CHECK_THROWS_AS(two_state(1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(power(two_state(0.5, 1.0), -2), ValidationError);
}

TEST_CASE("seed derivation separates labels, threads resolve") {
    CHECK(derive_seed(7, "a") != derive_seed(7, "b"));
    CHECK(derive_seed(7, "a") != derive_seed(8, "a"));
    CHECK(derive_seed(7, "a") == derive_seed(7, "a"));
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("pairwise sum is stable and exact on small inputs") {
    std::vector<double> v{0.1, 0.2, 0.3, 0.4};
    CHECK(pairwise_sum(v) == doctest::Approx(1.0).epsilon(1e-15));
    std::vector<double> big(1000, 1.0 / 1000);
    CHECK(pairwise_sum(big) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(pairwise_sum({}) == 0.0);
}
