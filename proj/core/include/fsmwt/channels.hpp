// Channel models: discrete finite-state wiretap channels as dense tables,
// degraded constructions, and Gaussian / fading parametric families.
#pragma once

#include <fsmwt/common.hpp>

#include <optional>
#include <vector>

namespace fsmwt::channels {

/**
 * @brief Factorization certificate for a degraded channel.
 *
 * main holds P(y|x,s) as an ns*nx*ny table (index (s*nx+x)*ny+y), wiretap
 * holds a single ny*nz row-stochastic P(z|y) shared across every (x,s).
 * Composing the two reproduces the full table within 1e-12.
 */
struct DegradedWitness {
    int ns = 0;
    int nx = 0;
    int ny = 0;
    std::vector<double> main;
    Mat wiretap;

    double pmain(int s, int x, int y) const {
        return main[(static_cast<size_t>(s) * nx + x) * ny + y];
    }
};

/**
 * @brief Discrete wiretap channel P(y,z|x,s) over finite alphabets.
 *
 * Table is dense row-major over (s,x,y,z). Construction validates
 * nonnegativity and unit (y,z)-sums per (x,s) within 1e-12, and precomputes
 * the Y and Z marginal channels. Immutable afterwards.
 */
class DiscreteWiretapChannel {
public:
    DiscreteWiretapChannel(int ns, int nx, int ny, int nz, std::vector<double> table,
                           std::optional<DegradedWitness> witness = std::nullopt);

    int ns() const { return ns_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }

    // P(y,z|x,s)
    double p(int s, int x, int y, int z) const {
        return table_[((static_cast<size_t>(s) * nx_ + x) * ny_ + y) * nz_ + z];
    }
    // P(y|x,s)
    double py(int s, int x, int y) const {
        return py_[(static_cast<size_t>(s) * nx_ + x) * ny_ + y];
    }
    // P(z|x,s)
    double pz(int s, int x, int z) const {
        return pz_[(static_cast<size_t>(s) * nx_ + x) * nz_ + z];
    }

    const std::vector<double> &table() const { return table_; }
    const std::optional<DegradedWitness> &witness() const { return witness_; }

private:
    int ns_, nx_, ny_, nz_;
    std::vector<double> table_;
    std::vector<double> py_, pz_;
    std::optional<DegradedWitness> witness_;
};

/**
 * @brief Gaussian wiretap family: Y = X + N_s, Z = Y + W.
 *
 * sigma2[s] is the main-channel noise variance in state s, sigma2_w the
 * eavesdropper's extra noise variance, p0 the average power budget.
 */
struct GaussianSpec {
    std::vector<double> sigma2;
    double sigma2_w = 0.0;
    double p0 = 0.0;

    void validate() const;
};

/**
 * @brief Fading extension: Y = g(s) X + N_s, Z = l(s) Y + W.
 *
 * Gains are unitless amplitudes; g must be nonzero in at least one state.
 */
struct FadingSpec {
    GaussianSpec base;
    std::vector<double> g;
    std::vector<double> l;

    void validate() const;
};

struct AxisGrid {
    int n = 0;
    double lo = 0.0;
    double hi = 0.0;
};

// Quantization descriptor for gaussian_to_discrete. Each axis is split into
// n equal cells over [lo, hi]; tail mass beyond the bounds folds into the
// edge cells. Input levels are the x-cell midpoints.
struct QuantGrid {
    AxisGrid x, y, z;
};

/**
 * @brief Builds the full table P(y,z|x,s) = P(z|y) P(y|x,s).
 *
 * main is ns*nx*ny row-major, wiretap is ny*nz. The result carries the
 * DegradedWitness formed from the two factors.
 */
DiscreteWiretapChannel degraded_from(int ns, int nx, int ny, int nz,
                                     const std::vector<double> &main, const Mat &wiretap);

/**
 * @brief Looks for a single P(z|y) whose composition with the Y-marginal
 * reproduces the table within tol.
 *
 * Per y the least-squares system decouples over z; the optimum is taken and
 * accepted iff the max absolute residual over all (s,x,y,z) is <= tol.
 * Absence of a witness is a normal result, not an error.
 */
std::optional<DegradedWitness> check_degraded(const DiscreteWiretapChannel &ch, double tol = 1e-8);

// Quantized versions of the parametric families. Cell mass is midpoint
// density times width with exact tail mass folded into edge cells, rows
// normalized to unit sum afterwards. The two-factor construction makes the
// result degraded by construction; the witness attaches whenever P(z|y)
// does not depend on s (always for GaussianSpec, constant-l FadingSpec).
DiscreteWiretapChannel gaussian_to_discrete(const GaussianSpec &spec, const QuantGrid &grid);
DiscreteWiretapChannel gaussian_to_discrete(const FadingSpec &spec, const QuantGrid &grid);

// Midpoints of the n equal cells of [lo, hi].
std::vector<double> grid_midpoints(const AxisGrid &g);

} // namespace fsmwt::channels
