#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fsmwt/capacity.hpp>
#include <fsmwt/simulate.hpp>

#include <cmath>
#include <vector>

using namespace fsmwt;
using namespace fsmwt::simulate;

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

capacity::InputLawFamily skewed_input() {
    capacity::InputLawFamily in;
    in.k = 2;
    in.nx = 2;
    in.rows = {0.7, 0.3, 0.4, 0.6};
    return in;
}

// Exact I(X;W|S,Sd) for the trajectory law, w the Y or Z marginal.
double exact_cmi(const channels::DiscreteWiretapChannel &ch, const markov::StateChain &chain,
                 const capacity::InputLawFamily &in, long long d, CmiKind which) {
    auto joint = markov::delayed_joint(chain, d);
    double total = 0.0;
    for (int sd = 0; sd < chain.k(); ++sd) {
        std::vector<double> q = {in.p(sd, 0), in.p(sd, 1)};
        for (int s = 0; s < chain.k(); ++s) {
            double mi = which == CmiKind::XY ? capacity::discrete_mi_y(ch, s, q)
                                             : capacity::discrete_mi_z(ch, s, q);
            total += joint.table(sd, s) * mi;
        }
    }
    return total;
}

} // namespace

TEST_CASE("sample_trajectory honors shapes and the sentinel convention") {
    auto chain = markov::two_state(0.5, 2.0);
    auto ch = bsc_pair(0.1, 0.2, 0.15);
    auto in = skewed_input();
    auto traj = sample_trajectory(chain, ch, in, 3, 500, 77);

    CHECK(traj.T == 500);
    CHECK(traj.d == 3);
    REQUIRE(traj.s.size() == 500);
    REQUIRE(traj.sd.size() == 500);
    REQUIRE(traj.x.size() == 500);
    REQUIRE(traj.y.size() == 500);
    REQUIRE(traj.z.size() == 500);
    for (long long i = 0; i < 500; ++i) {
        CHECK(traj.s[i] >= 0);
        CHECK(traj.s[i] < 2);
        CHECK(traj.x[i] < 2);
        CHECK(traj.y[i] < 2);
        CHECK(traj.z[i] < 2);
        if (i < 3)
            CHECK(traj.sd[i] == -1);
        else
            CHECK(traj.sd[i] == traj.s[i - 3]);
    }

    auto again = sample_trajectory(chain, ch, in, 3, 500, 77);
    CHECK(again.s == traj.s);
    CHECK(again.z == traj.z);
    auto other = sample_trajectory(chain, ch, in, 3, 500, 78);
    CHECK(other.s != traj.s);

    CHECK_THROWS_AS(sample_trajectory(chain, ch, in, -1, 500, 1), ValidationError);
    CHECK_THROWS_AS(sample_trajectory(chain, ch, in, 0, 0, 1), ValidationError);
}

TEST_CASE("empirical transitions converge to K") {
    auto chain = markov::two_state(0.5, 2.0);
    auto ch = bsc_pair(0.1, 0.2, 0.15);
    const long long T = 200000;
    auto traj = sample_trajectory(chain, ch, skewed_input(), 1, T, 5);
    auto Khat = empirical_transitions(traj, 2);
    double tol = 5.0 / std::sqrt(static_cast<double>(T));
    for (int i = 0; i < 2; ++i) {
        double row = 0.0;
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(Khat(i, j) - chain.K()(i, j)) < tol);
            row += Khat(i, j);
        }
        CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }

    Trajectory fake;
    fake.T = 3;
    fake.s = {0, 2, 1};
    CHECK_THROWS_AS(empirical_transitions(fake, 2), ValidationError);
}

TEST_CASE("empirical_cmi tracks the exact conditional informations") {
    auto chain = markov::two_state(0.5, 2.0);
    auto ch = bsc_pair(0.05, 0.25, 0.1);
    auto in = skewed_input();
    const long long T = 300000;
    auto traj = sample_trajectory(chain, ch, in, 1, T, 9);

    auto ey = empirical_cmi(traj, CmiKind::XY);
    auto ez = empirical_cmi(traj, CmiKind::XZ);
    CHECK_FALSE(ey.undersampled);
    CHECK_FALSE(ez.undersampled);
    CHECK(ey.stderr_ > 0.0);
    CHECK(std::abs(ey.value - exact_cmi(ch, chain, in, 1, CmiKind::XY)) < 0.02);
    CHECK(std::abs(ez.value - exact_cmi(ch, chain, in, 1, CmiKind::XZ)) < 0.02);
    // The wiretap output is a degraded view; its information ranks below Y's.
    CHECK(ez.value < ey.value);
}

TEST_CASE("short runs are flagged as undersampled") {
    auto chain = markov::two_state(0.5, 1.0);
    auto ch = bsc_pair(0.1, 0.1, 0.2);
    auto traj = sample_trajectory(chain, ch, skewed_input(), 1, 60, 3);
    auto est = empirical_cmi(traj, CmiKind::XY);
    CHECK(est.undersampled);
}

TEST_CASE("sweep evaluates the grid in order and captures failures") {
    std::vector<SweepPoint> grid = {
        {1, 0.5, 2000.0, false}, {1, 0.5, 2000.0, true},   {4, 0.5, 2000.0, false},
        {-1, 0.5, 2000.0, false}, {1, 1.5, 2000.0, false},
    };
    channels::GaussianSpec base;
    base.sigma2 = {1.0, 100.0};
    base.sigma2_w = 1000.0; // overridden per point
    base.p0 = 100.0;

    auto recs = sweep(grid, base, 1.0, 2);
    REQUIRE(recs.size() == 5);
    for (size_t i = 0; i < recs.size(); ++i) {
        CHECK(recs[i].pt.d == grid[i].d);
        CHECK(recs[i].pt.feedback == grid[i].feedback);
    }
    for (size_t i = 0; i < 4; ++i) {
        REQUIRE(recs[i].result.has_value());
        CHECK(recs[i].error.empty());
        CHECK(recs[i].result->value >= 0.0);
    }
    // u = 1.5 is outside the admissible memory range; the point fails alone.
    CHECK_FALSE(recs[4].result.has_value());
    CHECK_FALSE(recs[4].error.empty());

    // Feedback dominates, and the d -> infinity row matches a long delay.
    CHECK(recs[1].result->value >= recs[0].result->value - 1e-12);
    std::vector<SweepPoint> far = {{2000000, 0.5, 2000.0, false}};
    auto frec = sweep(far, base, 1.0, 1);
    REQUIRE(frec[0].result.has_value());
    CHECK(frec[0].result->value == doctest::Approx(recs[3].result->value).epsilon(1e-9));

    // Same grid, different thread count: identical values.
    auto recs1 = sweep(grid, base, 1.0, 1);
    for (size_t i = 0; i < 4; ++i) CHECK(recs1[i].result->value == recs[i].result->value);
}
