// Channel state process: transition matrix, stationary law, d-step powers,
// delayed-state joint law, and the two-state good/bad parametrization.
#pragma once

#include <fsmwt/common.hpp>

#include <cstdint>
#include <vector>

namespace fsmwt::markov {

// Delays above this use the stationary-rows limit directly; beyond it the
// d-step matrix is numerically indistinguishable from the limit for any
// chain this library accepts.
inline constexpr long long kMaxExactDelay = 1'000'000;

/**
 * @brief k-state Markov chain with row-stochastic transition matrix K.
 *
 * Construction validates shape, stochasticity (rows sum to 1 within 1e-12),
 * irreducibility (single strongly connected class on the support graph) and
 * aperiodicity (gcd of support-graph cycle lengths is 1). Chains with
 * transient states are rejected rather than silently reduced.
 *
 * Immutable after construction; safe to share across threads.
 */
class StateChain {
public:
    explicit StateChain(Mat K);

    int k() const { return K_.rows; }
    const Mat &K() const { return K_; }

private:
    Mat K_;
};

struct StationaryLaw {
    std::vector<double> pi;
};

// Joint law of (delayed state, current state): table(j,l) = pi(j) * K^d(j,l).
struct DelayedJoint {
    long long d = 0;
    Mat table;
};

/**
 * @brief Two-state chain parameters: b = P(B|G), g = P(G|B).
 *
 * Derived quantities: memory u = 1 - g - b (the second eigenvalue of K) and
 * steady-state ratio c = g/b. State 0 is G, state 1 is B.
 */
struct TwoStateParams {
    double b;
    double g;

    double u() const { return 1.0 - g - b; }
    double c() const { return g / b; }

    // Inverse map: g = c(1-u)/(1+c), b = (1-u)/(1+c). Requires u in (-1,1),
    // c > 0 and the resulting g, b in (0,1].
    static TwoStateParams from_memory(double u, double c);
};

// Stationary law via direct linear solve of (I - K^T) pi = 0 with the
// normalization row appended; exact for small k and deterministic.
StationaryLaw stationary(const StateChain &chain);

// K^d by binary exponentiation, rows re-normalized after every multiply to
// suppress drift. d = 0 gives the identity; d > kMaxExactDelay gives the
// stationary-rows limit.
Mat power(const StateChain &chain, long long d);

// d -> infinity limit: every row equals pi.
Mat power_limit(const StateChain &chain);

DelayedJoint delayed_joint(const StateChain &chain, long long d);
DelayedJoint delayed_joint_limit(const StateChain &chain);

// Chain built from the two-state shorthand; round-trips u and c within 1e-12.
StateChain two_state(double u, double c);

} // namespace fsmwt::markov
