// Exact information measures on finite joint tables, joint-law assembly for
// the delayed-state wiretap model, and numeric verification of the identities
// the analysis relies on.
#pragma once

#include <fsmwt/channels.hpp>
#include <fsmwt/common.hpp>
#include <fsmwt/markov.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace fsmwt::infotheory {

// Dense-table guardrail; assemblies above this refuse with a size estimate.
inline constexpr size_t kMaxCells = 100'000'000;

struct Axis {
    std::string name;
    int size = 0;
};

/**
 * @brief Dense joint probability table over named axes.
 *
 * Entries are validated nonnegative with total mass 1 within 1e-12.
 * The delayed state S-tilde is consistently named "Sd" throughout.
 * Cell order is row-major in axis order; all reductions use fixed-shape
 * pairwise summation so results are bit-reproducible.
 */
class JointTable {
public:
    JointTable(std::vector<Axis> axes, std::vector<double> probs);

    const std::vector<Axis> &axes() const { return axes_; }
    const std::vector<double> &probs() const { return probs_; }
    size_t cells() const { return probs_.size(); }

    // Index of a named axis; ValidationError if absent.
    int axis_index(std::string_view name) const;
    bool has_axis(std::string_view name) const;

    // Marginal over the named axes, kept in this table's axis order.
    JointTable marginal(const std::vector<std::string> &keep) const;

private:
    std::vector<Axis> axes_;
    std::vector<double> probs_;
};

/**
 * @brief Auxiliary-channel factors P(u|sd), P(v|u,sd), P(x|u,v,sd).
 *
 * Flat row-major tables; every row stochastic within 1e-12.
 */
struct AuxiliaryScheme {
    int nu = 1;
    int nv = 1;
    int k = 1;
    int nx = 1;
    std::vector<double> pu; // (sd, u)
    std::vector<double> pv; // (u, sd, v)
    std::vector<double> px; // (u, v, sd, x)

    double p_u(int sd, int u) const { return pu[static_cast<size_t>(sd) * nu + u]; }
    double p_v(int u, int sd, int v) const {
        return pv[(static_cast<size_t>(u) * k + sd) * nv + v];
    }
    double p_x(int u, int v, int sd, int x) const {
        return px[((static_cast<size_t>(u) * nv + v) * k + sd) * nx + x];
    }

    void validate() const;

    // Singleton U and V driving the supplied per-state input law P(x|sd).
    static AuxiliaryScheme deterministic(int k, int nx, const std::vector<double> &px_given_sd);
};

/**
 * @brief Assembles the joint law over (U,V,Sd,S,X,Y,Z):
 * P(sd) P(u|sd) P(v|u,sd) P(x|u,v,sd) K^d(sd,s) P(y,z|x,s).
 *
 * The (Sd,S) marginal equals delayed_joint(chain,d) by construction.
 * d < 0 selects the stationary (d -> infinity) limit.
 */
JointTable assemble_joint(const markov::StateChain &chain, long long d, const AuxiliaryScheme &aux,
                          const channels::DiscreteWiretapChannel &ch);

// Shannon entropy (bits) of the marginal over `axes`. 0 log 0 = 0.
double entropy(const JointTable &t, const std::vector<std::string> &axes);

// H(A|C) in bits; C may be empty.
double cond_entropy(const JointTable &t, const std::vector<std::string> &a,
                    const std::vector<std::string> &c);

/**
 * @brief I(A;B|C) in bits, computed in KL form over the (A,B,C) marginal so
 * nonnegativity holds to within 1e-12. Axis sets must be disjoint.
 */
double cond_mutual_info(const JointTable &t, const std::vector<std::string> &a,
                        const std::vector<std::string> &b, const std::vector<std::string> &c);

struct IdentityCheck {
    double lhs = 0.0;      // H(Y|S,Sd,Z)
    double rhs = 0.0;      // I(X;Y|S,Sd) - I(X;Z|S,Sd) + H(Y|X,Z,S,Sd)
    bool degraded = false; // Z independent of (X,S,Sd) given Y within 1e-9
    double factor_residual = 0.0;
};

// Both sides of the degraded-channel entropy identity on a table with axes
// X,Y,Z,S,Sd. Equality within 1e-9 is guaranteed only when `degraded` holds;
// otherwise the caller gets the honest residual.
IdentityCheck degraded_identity_check(const JointTable &t);

struct CsiszarResidual {
    double plain = 0.0;  // unconditioned identity
    double with_w = 0.0; // identity with W in every conditioning set
};

/**
 * @brief Csiszar sum identity residuals |LHS - RHS| on a table with axes
 * W, Y1..Yn, Z1..Zn, S.
 *
 * Checks sum_i I(Y_i; Z_{i+1}..Z_n | Y_1..Y_{i-1}, S) =
 *        sum_i I(Z_i; Y_1..Y_{i-1} | Z_{i+1}..Z_n, S)
 * and the same with W adjoined to every conditioning set. Both vanish for
 * every distribution; n is capped at 3 to keep tables dense-friendly.
 */
CsiszarResidual csiszar_sum_check(const JointTable &t, int n);

} // namespace fsmwt::infotheory
