// Secrecy capacity computations: closed-form Gaussian and fading terms with
// budgeted power allocation, and discrete degraded optimizations over
// per-delayed-state input laws.
#pragma once

#include <fsmwt/channels.hpp>
#include <fsmwt/common.hpp>
#include <fsmwt/markov.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fsmwt::capacity {

// Per-delayed-state powers P(sd) >= 0 with sum_sd pi(sd) P(sd) <= p0.
struct PowerAllocation {
    std::vector<double> p;
};

// Per-delayed-state input distributions P(x|sd), rows stochastic.
struct InputLawFamily {
    int k = 0;
    int nx = 0;
    std::vector<double> rows; // (sd, x)

    double p(int sd, int x) const { return rows[static_cast<size_t>(sd) * nx + x]; }
};

/**
 * @brief Capacity value with its maximizer and per-(sd,s) decomposition.
 *
 * per_state_terms(sd,s) holds the unweighted term value at the argmax;
 * value equals the pi(sd) K^d(sd,s) weighted sum of those terms.
 * `flagged` marks results produced by the non-concave fallback path;
 * `note` records modeling choices that were engaged (e.g. the zero floor
 * on a feedback min-term).
 */
struct CapacityResult {
    double value = 0.0; // bits per channel use
    std::optional<PowerAllocation> power;
    std::optional<InputLawFamily> input;
    Mat per_state_terms;
    bool flagged = false;
    std::string note;
};

// ============================================================================
// Closed-form per-state terms, all in bits. Each is evaluated at transmit
// power p with main-channel noise sigma2_s and eavesdropper extra noise
// sigma2_w.
// ============================================================================

// (1/2)log2(1+p/sigma2_s) - (1/2)log2(1+p/(sigma2_s+sigma2_w));
// nonnegative, increasing and concave in p.
double gaussian_secrecy_term(double p, double sigma2_s, double sigma2_w);

// max(0, min{(1/2)log2(1+p/sigma2_s),
//            (1/2)log2(2*pi*e sigma2_w (p+sigma2_s)/(p+sigma2_s+sigma2_w))}).
// The second argument is a differential-entropy bound and can go negative
// for small sigma2_w; rates are nonnegative, hence the floor.
double gaussian_feedback_term(double p, double sigma2_s, double sigma2_w);

// Fading variants with main gain g and eavesdropper gain l.
double fading_secrecy_term(double p, double g, double l, double sigma2_s, double sigma2_w);
double fading_feedback_term(double p, double g, double l, double sigma2_s, double sigma2_w);

// ============================================================================
// Power allocation
// ============================================================================

// term(sd, s, p): bits contributed by the (sd,s) cell at power p.
using TermFn = std::function<double(int sd, int s, double p)>;

/**
 * @brief Maximizes sum_{sd,s} pi(sd) K^d(sd,s) term(sd,s,P(sd)) subject to
 * sum_sd pi(sd) P(sd) <= p0, P(sd) >= 0.
 *
 * The budget couples states only through its weighted sum, so for concave
 * per-sd aggregates the KKT point is found exactly by bisection on the
 * budget multiplier with an inner ternary search per state. Concavity is
 * screened by midpoint chord checks on a mixed uniform/log grid; on
 * detection of non-concavity the solver falls back to projected coordinate
 * ascent with restarts and flags the result.
 *
 * d < 0 selects the stationary (d -> infinity) weighting.
 */
CapacityResult optimize_power(const TermFn &term, const markov::StateChain &chain, long long d,
                              double p0);

// Closed-form capacity drivers for the parametric families; feedback
// selects the min-form terms. These wrap optimize_power over the matching
// per-state term and stamp the clamp note when the floor was active.
CapacityResult gaussian_capacity(const channels::GaussianSpec &spec,
                                 const markov::StateChain &chain, long long d, bool feedback);
CapacityResult fading_capacity(const channels::FadingSpec &spec, const markov::StateChain &chain,
                               long long d, bool feedback);

// ============================================================================
// Discrete degraded optimization
// ============================================================================

/**
 * @brief max over P(x|sd) of sum_{sd,s} pi(sd) K^d(sd,s)
 * [I(X;Y|s,sd) - I(X;Z|s,sd)].
 *
 * Requires a degraded channel (witness present); the objective then splits
 * into k independent concave problems, each solved by a simplex grid scan
 * followed by Frank-Wolfe refinement. |X| <= 6.
 */
CapacityResult secrecy_capacity_discrete(const channels::DiscreteWiretapChannel &ch,
                                         const markov::StateChain &chain, long long d);

/**
 * @brief Feedback variant: per-cell term min{I(X;Y|s,sd), H(Y|Z,s,sd)}.
 *
 * The min of concave pieces need not be concave, so the per-sd search runs
 * the grid scan plus golden-section refinement along simplex edges and
 * keeps the better point.
 */
CapacityResult secrecy_capacity_discrete_feedback(const channels::DiscreteWiretapChannel &ch,
                                                  const markov::StateChain &chain, long long d);

// Per-(sd indifferent) single-cell quantities used by the discrete solvers
// and their tests: mutual informations and H(Y|Z) for input law q in state s.
double discrete_mi_y(const channels::DiscreteWiretapChannel &ch, int s,
                     const std::vector<double> &q);
double discrete_mi_z(const channels::DiscreteWiretapChannel &ch, int s,
                     const std::vector<double> &q);
double discrete_h_y_given_z(const channels::DiscreteWiretapChannel &ch, int s,
                            const std::vector<double> &q);

} // namespace fsmwt::capacity
