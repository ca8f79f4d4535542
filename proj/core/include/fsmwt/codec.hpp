// Toy-scale multiplexed random-binning wiretap codec: per-delayed-state
// codebooks, stochastic bin encoding, feedback secret keys, exact MAP
// decoding, and exact equivocation by enumeration.
#pragma once

#include <fsmwt/capacity.hpp>
#include <fsmwt/channels.hpp>
#include <fsmwt/common.hpp>
#include <fsmwt/markov.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace fsmwt::codec {

// Enumeration-scale guardrails. These keep every exact computation at desk
// scale; exceeding any of them refuses with a size estimate.
inline constexpr int kMaxAlphabet = 3;
inline constexpr int kMaxStates = 3;
inline constexpr int kMaxBlockLen = 12;
inline constexpr long long kMaxCodebookWords = 1LL << 16;
inline constexpr double kMaxEnumPaths = 16777216.0; // |Z|^N * k^N

/**
 * @brief Per-component rate triple, all in bits per channel use.
 *
 * secret sizes the protected index set A, noise sizes the randomization
 * set B, bin sizes the partition of B whose class index carries the second
 * message part. Counts are 2^round(N_sd * rate); bin <= noise is required.
 */
struct ComponentRates {
    double secret = 0.0;
    double noise = 0.0;
    double bin = 0.0;
};

// One delayed-state component codebook: na*nb words of length len over the
// input alphabet, B partitioned into nj contiguous classes whose sizes
// differ by at most a factor of 2.
struct ComponentBook {
    int len = 0;
    int na = 1;
    int nb = 1;
    int nj = 1;
    std::vector<int> bin_lo;    // class start in b-index space
    std::vector<int> bin_sz;    // class size
    std::vector<uint8_t> words; // ((a * nb) + b) * len + pos

    int bin_of(int b) const;
    uint8_t symbol(int a, int b, int pos) const {
        return words[(static_cast<size_t>(a) * nb + b) * len + pos];
    }
};

struct MultiplexCode {
    int N = 0;
    long long d = 0;
    uint64_t seed = 0;
    int k = 0;
    int nx = 0;
    std::vector<int> len;             // component lengths, largest-remainder split of N*pi
    std::vector<ComponentBook> books; // one per sd

    // Total message bits carried per block, divided by N.
    double message_rate() const;
};

// Message part for one component: protected index and bin index.
struct ComponentMessage {
    int a = 0;
    int j = 0;
};
using Message = std::vector<ComponentMessage>;

struct DecodeResult {
    Message est;
    double margin = 0.0; // smallest log2-posterior gap across components
};

/**
 * @brief Draws the per-state codebooks i.i.d. from the supplied input law.
 *
 * Reproducible from seed; component lengths are the largest-remainder
 * rounding of N*pi(sd). Guardrails: alphabet sizes <= 3, k <= 3, N <= 12,
 * total words <= 2^16.
 */
MultiplexCode build_code(const channels::DiscreteWiretapChannel &ch,
                         const markov::StateChain &chain, long long d,
                         const std::vector<ComponentRates> &rates,
                         const capacity::InputLawFamily &input, int N, uint64_t seed);

/**
 * @brief State-multiplexed stochastic encoding.
 *
 * Walks the realized delayed-state sequence, emitting the next symbol of the
 * active component word; components whose slots run past len pad with
 * symbol 0. The within-bin index is drawn uniformly via rng. keys, when
 * present, shift each component's bin index modulo its bin count.
 */
std::vector<int> encode(const MultiplexCode &code, const Message &w,
                        const std::vector<int> &sd_seq, const std::vector<int> *keys,
                        std::mt19937_64 &rng);

// Exact per-component MAP decoding of (a, j), summing in-bin likelihoods.
// Always returns the best estimate; margin 0 on ties.
DecodeResult decode(const MultiplexCode &code, const channels::DiscreteWiretapChannel &ch,
                    const std::vector<int> &y, const std::vector<int> &s_seq,
                    const std::vector<int> &sd_seq);

/**
 * @brief Deterministic balanced coloring of a y-block into
 * 2^ceil(len * key_rate) cells via avalanche hashing, len = y.size().
 *
 * Identical blocks give identical keys; balance over typical blocks is
 * statistical, not constructed.
 */
int generate_key(const std::vector<int> &y, double key_rate, uint64_t seed);

/**
 * @brief Exact H(W|Z^N, S^N)/N in bits by full enumeration.
 *
 * Enumerates state paths under the chain law and z-blocks under the channel
 * law, marginalizing the in-bin randomization; key_cells, when present,
 * additionally marginalizes an independent uniform key per component
 * shifting its bin index. Guardrail: |Z|^N * k^N <= 2^24.
 */
double exact_equivocation(const MultiplexCode &code, const channels::DiscreteWiretapChannel &ch,
                          const markov::StateChain &chain,
                          const std::vector<int> *key_cells = nullptr, int threads = 0);

struct ExperimentSpec {
    long long d = 1;
    int N = 8;
    long long blocks = 100;
    uint64_t seed = 1;
    bool feedback = false;
    std::vector<ComponentRates> rates;
    std::vector<double> key_rate; // per sd, consulted when feedback is on
    int threads = 0;
};

struct RunReport {
    double error_rate = 0.0;
    double equivocation = 0.0;     // exact, bits per use
    double analytic_secrecy = 0.0; // degraded secrecy rate at the same input law
    double message_rate = 0.0;
    long long blocks = 0;
    bool feedback = false;
};

/**
 * @brief End-to-end experiment: builds the code, runs `blocks` chained
 * blocks (state process continuous across blocks), decodes, and attaches
 * the exact equivocation.
 *
 * Feedback mode keys block i from the y-block of block i-d once i > 2d;
 * earlier blocks run unkeyed. The receiver regenerates the key from its own
 * outputs, so decoding is unaffected. The reported equivocation is the
 * keyed-block value when feedback is on.
 */
RunReport run_experiment(const channels::DiscreteWiretapChannel &ch,
                         const markov::StateChain &chain, const capacity::InputLawFamily &input,
                         const ExperimentSpec &spec);

} // namespace fsmwt::codec
