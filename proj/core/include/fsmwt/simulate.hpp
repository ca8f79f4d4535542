// Monte Carlo samplers for the state process and channel, plug-in empirical
// information estimates, and parameter sweep drivers.
#pragma once

#include <fsmwt/capacity.hpp>
#include <fsmwt/channels.hpp>
#include <fsmwt/common.hpp>
#include <fsmwt/markov.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fsmwt::simulate {

/**
 * @brief One sampled run of the chained state process and channel.
 *
 * sd[i] = s[i-d] once i >= d; earlier positions hold the sentinel -1 and
 * their inputs are drawn from the state-0 row of the input law. Estimators
 * skip sentinel positions.
 */
struct Trajectory {
    long long T = 0;
    long long d = 0;
    uint64_t seed = 0;
    std::vector<int> s, sd, x, y, z;
};

// States start at the stationary law (no burn-in); inputs follow
// P(x | sd = s_{i-d}); outputs follow the channel law.
Trajectory sample_trajectory(const markov::StateChain &chain,
                             const channels::DiscreteWiretapChannel &ch,
                             const capacity::InputLawFamily &input, long long d, long long T,
                             uint64_t seed);

enum class CmiKind { XY, XZ }; // I(X;Y|S,Sd) or I(X;Z|S,Sd)

struct EmpiricalCmi {
    double value = 0.0;  // bits
    double stderr_ = 0.0; // rough plug-in standard error
    bool undersampled = false; // some (s,sd) cell saw < 100 samples
};

// Plug-in conditional MI from empirical counts over non-sentinel positions.
EmpiricalCmi empirical_cmi(const Trajectory &traj, CmiKind which);

// Empirical transition matrix from consecutive state pairs.
Mat empirical_transitions(const Trajectory &traj, int k);

// ============================================================================
// Sweeps
// ============================================================================

struct SweepPoint {
    long long d = 0; // -1 = stationary limit
    double u = 0.0;
    double sigma2_w = 0.0;
    bool feedback = false;
};

struct SweepRecord {
    SweepPoint pt;
    std::optional<capacity::CapacityResult> result;
    std::string error; // nonempty when this point failed
};

/**
 * @brief Gaussian-family capacity at every grid point, in input order.
 *
 * Each point rebuilds the two-state chain at (u, c) and overrides sigma2_w.
 * Per-point failures are captured in the record; the sweep continues.
 * Parallel over points with deterministic output ordering.
 */
std::vector<SweepRecord> sweep(const std::vector<SweepPoint> &grid,
                               const channels::GaussianSpec &base, double c, int threads = 0);

} // namespace fsmwt::simulate
