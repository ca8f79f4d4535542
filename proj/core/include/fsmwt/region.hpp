// Capacity-equivocation bounds evaluated at supplied joints, and boundary
// tracing for the degraded-case regions.
#pragma once

#include <fsmwt/capacity.hpp>
#include <fsmwt/channels.hpp>
#include <fsmwt/infotheory.hpp>
#include <fsmwt/markov.hpp>

#include <string>
#include <vector>

namespace fsmwt::region {

struct RatePair {
    double r = 0.0;  // transmission rate cap, bits/use
    double re = 0.0; // equivocation rate cap, bits/use
};

struct RegionBoundary {
    std::vector<RatePair> points; // r non-decreasing
    std::string kind;             // "inner", "inner-feedback"
};

// ============================================================================
// Bound evaluation at a supplied joint over (U,V,Sd,S,X,Y,Z).
// All four share R cap = I(V;Y|S,Sd); they differ in the Re cap and in which
// joints they admit. Every region carries the constraint 0 <= Re <= R, so
// the returned re is the effective cap, clamped into [0, r].
// ============================================================================

/**
 * @brief Inner bound caps. Requires the full product factorization
 * P(sd)P(u|sd)P(v|u,sd)P(x|u,v,sd)P(s|sd)P(y,z|x,s); the check reconstructs
 * the product from the joint's own conditionals (residual <= 1e-9) and a
 * refusal names the violated Markov chain.
 *
 * Re cap = max(0, I(V;Y|U,S,Sd) - I(V;Z|U,S,Sd)).
 */
RatePair eval_inner(const infotheory::JointTable &joint);

/**
 * @brief Outer bound caps: same expressions, admitting any joint consistent
 * with the channel law (max residual of P(y,z|x,s)-consistency <= 1e-9).
 */
RatePair eval_outer(const infotheory::JointTable &joint,
                    const channels::DiscreteWiretapChannel &ch);

// Feedback inner: Re cap = [I(V;Y|U,S,Sd) - I(V;Z|U,S,Sd)]^+ + H(Y|V,Z,S,Sd).
// Same admissibility as eval_inner.
RatePair eval_inner_feedback(const infotheory::JointTable &joint);

// Feedback outer: Re cap = H(Y|Z,U,S,Sd). Same admissibility as eval_outer.
RatePair eval_outer_feedback(const infotheory::JointTable &joint,
                             const channels::DiscreteWiretapChannel &ch);

/**
 * @brief Upper boundary of the degraded region, no-feedback or feedback.
 *
 * For each R on an n_points grid over [0, max I(X;Y|S,Sd)] the Re bound is
 * maximized over input families subject to I(X;Y|S,Sd) >= R; boundary
 * re = min(R, bound). Ties break toward larger Re. Refuses channels
 * without a degraded witness.
 */
RegionBoundary trace_degraded_region(const channels::DiscreteWiretapChannel &ch,
                                     const markov::StateChain &chain, long long d, bool feedback,
                                     int n_points = 64);

} // namespace fsmwt::region
