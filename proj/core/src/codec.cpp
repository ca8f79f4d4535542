#include <fsmwt/codec.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace fsmwt::codec {
namespace {

// Sampling helpers on top of mt19937_64 only, so draws are identical across
// platforms and standard libraries.
uint64_t draw_below(std::mt19937_64 &rng, uint64_t n) {
    if (n <= 1) return 0;
    uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
    uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

double draw_unit(std::mt19937_64 &rng) { return (rng() >> 11) * 0x1.0p-53; }

int draw_categorical(std::mt19937_64 &rng, const double *p, int n) {
    double u = draw_unit(rng);
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
        cum += p[i];
        if (u < cum) return i;
    }
    return n - 1;
}

int pow2_bits(double rate, int len) {
    if (len <= 0 || rate <= 0.0) return 0;
    return static_cast<int>(std::llround(rate * len));
}

// Largest-remainder rounding of N*pi to integer lengths summing to N.
std::vector<int> split_lengths(int N, const std::vector<double> &pi) {
    const int k = static_cast<int>(pi.size());
    std::vector<int> len(k);
    std::vector<double> frac(k);
    int used = 0;
    for (int c = 0; c < k; ++c) {
        double exact = N * pi[c];
        len[c] = static_cast<int>(std::floor(exact));
        frac[c] = exact - len[c];
        used += len[c];
    }
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return frac[a] > frac[b]; });
    for (int i = 0; i < N - used; ++i) ++len[order[i]];
    return len;
}

// Effective in-bin law rho(j, b), key shift marginalized when cells > 0.
std::vector<double> effective_bin_law(const ComponentBook &bk, int cells) {
    std::vector<double> rho(static_cast<size_t>(bk.nj) * bk.nb, 0.0);
    if (cells <= 1) {
        for (int j = 0; j < bk.nj; ++j)
            for (int b = bk.bin_lo[j]; b < bk.bin_lo[j] + bk.bin_sz[j]; ++b)
                rho[static_cast<size_t>(j) * bk.nb + b] = 1.0 / bk.bin_sz[j];
        return rho;
    }
    for (int j = 0; j < bk.nj; ++j)
        for (int t = 0; t < bk.nj; ++t) {
            int hits = cells / bk.nj + (t < cells % bk.nj ? 1 : 0);
            if (hits == 0) continue;
            int je = (j + t) % bk.nj;
            double w = static_cast<double>(hits) / cells / bk.bin_sz[je];
            for (int b = bk.bin_lo[je]; b < bk.bin_lo[je] + bk.bin_sz[je]; ++b)
                rho[static_cast<size_t>(j) * bk.nb + b] += w;
        }
    return rho;
}

} // namespace

int ComponentBook::bin_of(int b) const {
    for (int j = 0; j < nj; ++j)
        if (b < bin_lo[j] + bin_sz[j]) return j;
    throw ValidationError("bin_of: index out of range");
}

double MultiplexCode::message_rate() const {
    double bits = 0.0;
    for (const auto &bk : books) bits += std::log2(static_cast<double>(bk.na) * bk.nj);
    return bits / N;
}

MultiplexCode build_code(const channels::DiscreteWiretapChannel &ch,
                         const markov::StateChain &chain, long long d,
                         const std::vector<ComponentRates> &rates,
                         const capacity::InputLawFamily &input, int N, uint64_t seed) {
    const int k = chain.k();
    if (ch.ns() != k || input.k != k)
        throw ValidationError("build_code: channel, chain and input must agree on the state count");
    if (input.nx != ch.nx())
        throw ValidationError("build_code: input alphabet does not match the channel");
    if (static_cast<int>(rates.size()) != k)
        throw ValidationError("build_code: need one rate triple per delayed state");
    if (d < 0) throw ValidationError("build_code: delay must be nonnegative");
    if (ch.nx() > kMaxAlphabet || ch.ny() > kMaxAlphabet || ch.nz() > kMaxAlphabet) {
        std::ostringstream os;
        os << "build_code: alphabet sizes (" << ch.nx() << "," << ch.ny() << "," << ch.nz()
           << ") exceed the cap of " << kMaxAlphabet;
        throw GuardrailError(os.str());
    }
    if (k > kMaxStates) {
        std::ostringstream os;
        os << "build_code: " << k << " states exceed the cap of " << kMaxStates;
        throw GuardrailError(os.str());
    }
    if (N < 1 || N > kMaxBlockLen) {
        std::ostringstream os;
        os << "build_code: block length " << N << " outside [1, " << kMaxBlockLen << "]";
        throw GuardrailError(os.str());
    }

    MultiplexCode code;
    code.N = N;
    code.d = d;
    code.seed = seed;
    code.k = k;
    code.nx = ch.nx();
    code.len = split_lengths(N, markov::stationary(chain).pi);

    long long total_words = 0;
    uint64_t s0 = derive_seed(seed, "book");
    for (int c = 0; c < k; ++c) {
        const auto &rt = rates[c];
        if (rt.secret < 0.0 || rt.noise < 0.0 || rt.bin < 0.0)
            throw ValidationError("build_code: rates must be nonnegative");
        if (rt.bin > rt.noise + 1e-12)
            throw ValidationError("build_code: bin rate must not exceed noise rate");
        ComponentBook bk;
        bk.len = code.len[c];
        int ba = pow2_bits(rt.secret, bk.len);
        int bb = pow2_bits(rt.noise, bk.len);
        int bj = pow2_bits(rt.bin, bk.len);
        if (bj > bb)
            throw ValidationError("build_code: bin rate rounds above the noise rate");
        if (ba + bb > 16) {
            std::ostringstream os;
            os << "build_code: component needs 2^" << ba + bb << " words, cap is 2^16";
            throw GuardrailError(os.str());
        }
        bk.na = 1 << ba;
        bk.nb = 1 << bb;
        bk.nj = 1 << bj;
        total_words += static_cast<long long>(bk.na) * bk.nb;
        if (total_words > kMaxCodebookWords) {
            std::ostringstream os;
            os << "build_code: codebook needs more than " << kMaxCodebookWords << " words";
            throw GuardrailError(os.str());
        }
        int base = bk.nb / bk.nj, rem = bk.nb % bk.nj, lo = 0;
        for (int j = 0; j < bk.nj; ++j) {
            int sz = base + (j < rem ? 1 : 0);
            bk.bin_lo.push_back(lo);
            bk.bin_sz.push_back(sz);
            lo += sz;
        }
        bk.words.resize(static_cast<size_t>(bk.na) * bk.nb * bk.len);
        std::mt19937_64 rng(mix64(s0 + static_cast<uint64_t>(c)));
        const double *row = input.rows.data() + static_cast<size_t>(c) * input.nx;
        for (auto &sym : bk.words)
            sym = static_cast<uint8_t>(draw_categorical(rng, row, input.nx));
        code.books.push_back(std::move(bk));
    }
    return code;
}

std::vector<int> encode(const MultiplexCode &code, const Message &w,
                        const std::vector<int> &sd_seq, const std::vector<int> *keys,
                        std::mt19937_64 &rng) {
    if (static_cast<int>(w.size()) != code.k)
        throw ValidationError("encode: need one message part per delayed state");
    if (static_cast<int>(sd_seq.size()) != code.N)
        throw ValidationError("encode: delayed-state sequence must have length N");
    if (keys && static_cast<int>(keys->size()) != code.k)
        throw ValidationError("encode: need one key per delayed state");

    std::vector<int> b(code.k);
    for (int c = 0; c < code.k; ++c) {
        const auto &bk = code.books[c];
        if (w[c].a < 0 || w[c].a >= bk.na || w[c].j < 0 || w[c].j >= bk.nj)
            throw ValidationError("encode: message part out of range");
        int je = keys ? (w[c].j + (*keys)[c] % bk.nj + bk.nj) % bk.nj : w[c].j;
        b[c] = bk.bin_lo[je] + static_cast<int>(draw_below(rng, bk.bin_sz[je]));
    }

    std::vector<int> x;
    x.reserve(code.N);
    std::vector<int> pos(code.k, 0);
    for (int i = 0; i < code.N; ++i) {
        int c = sd_seq[i];
        if (c < 0 || c >= code.k) throw ValidationError("encode: delayed state out of range");
        const auto &bk = code.books[c];
        x.push_back(pos[c] < bk.len ? bk.symbol(w[c].a, b[c], pos[c]) : 0);
        ++pos[c];
    }
    return x;
}

DecodeResult decode(const MultiplexCode &code, const channels::DiscreteWiretapChannel &ch,
                    const std::vector<int> &y, const std::vector<int> &s_seq,
                    const std::vector<int> &sd_seq) {
    if (static_cast<int>(y.size()) != code.N || static_cast<int>(s_seq.size()) != code.N ||
        static_cast<int>(sd_seq.size()) != code.N)
        throw ValidationError("decode: sequence lengths must equal N");

    DecodeResult out;
    out.est.resize(code.k);
    out.margin = std::numeric_limits<double>::infinity();
    for (int c = 0; c < code.k; ++c) {
        const auto &bk = code.books[c];
        std::vector<int> slot_s, slot_y;
        for (int i = 0; i < code.N && static_cast<int>(slot_s.size()) < bk.len; ++i)
            if (sd_seq[i] == c) {
                slot_s.push_back(s_seq[i]);
                slot_y.push_back(y[i]);
            }
        const int m = static_cast<int>(slot_s.size());

        // In-bin averaged likelihoods per (a, j).
        std::vector<double> like(static_cast<size_t>(bk.na) * bk.nb, 1.0);
        for (int a = 0; a < bk.na; ++a)
            for (int b = 0; b < bk.nb; ++b) {
                double &l = like[static_cast<size_t>(a) * bk.nb + b];
                for (int t = 0; t < m; ++t)
                    l *= ch.py(slot_s[t], bk.symbol(a, b, t), slot_y[t]);
            }
        int best_a = 0, best_j = 0;
        double best = -1.0, second = -1.0;
        for (int a = 0; a < bk.na; ++a)
            for (int j = 0; j < bk.nj; ++j) {
                double g = 0.0;
                for (int b = bk.bin_lo[j]; b < bk.bin_lo[j] + bk.bin_sz[j]; ++b)
                    g += like[static_cast<size_t>(a) * bk.nb + b];
                g /= bk.bin_sz[j];
                if (g > best) {
                    second = best;
                    best = g;
                    best_a = a;
                    best_j = j;
                } else if (g > second) {
                    second = g;
                }
            }
        out.est[c] = {best_a, best_j};
        if (bk.na * bk.nj > 1) {
            double gap = second <= 0.0 ? std::numeric_limits<double>::infinity()
                                       : std::log2(best) - std::log2(second);
            if (best <= 0.0) gap = 0.0;
            out.margin = std::min(out.margin, gap);
        }
    }
    return out;
}

int generate_key(const std::vector<int> &y, double key_rate, uint64_t seed) {
    if (key_rate <= 0.0 || y.empty()) return 0;
    int bits = static_cast<int>(std::ceil(key_rate * y.size()));
    if (bits > 30) {
        std::ostringstream os;
        os << "generate_key: 2^" << bits << " cells exceed the enumeration scale";
        throw GuardrailError(os.str());
    }
    uint64_t h = mix64(seed ^ 0x517cc1b727220a95ULL);
    for (int sym : y) h = mix64(h + 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(sym));
    return static_cast<int>(h & ((1u << bits) - 1));
}

namespace {

// H(w_c | z-slots) for one component on one state path, by DFS over z
// assignments with partial likelihood products over (a, b).
double component_entropy(const ComponentBook &bk, const channels::DiscreteWiretapChannel &ch,
                         const std::vector<int> &slot_s, const std::vector<double> &rho) {
    const int m = static_cast<int>(slot_s.size());
    const double prior = 1.0 / (static_cast<double>(bk.na) * bk.nj);
    if (bk.na * bk.nj == 1) return 0.0;
    if (m == 0) return std::log2(static_cast<double>(bk.na) * bk.nj);

    const int nz = ch.nz();
    const size_t nw = static_cast<size_t>(bk.na) * bk.nb;
    std::vector<std::vector<double>> part(m + 1, std::vector<double>(nw));
    std::fill(part[0].begin(), part[0].end(), 1.0);
    std::vector<int> zdig(m, 0);
    double h = 0.0;
    int depth = 0;
    while (true) {
        while (depth < m) {
            const auto &src = part[depth];
            auto &dst = part[depth + 1];
            const int s = slot_s[depth], z = zdig[depth];
            for (int a = 0; a < bk.na; ++a)
                for (int b = 0; b < bk.nb; ++b) {
                    size_t i = static_cast<size_t>(a) * bk.nb + b;
                    dst[i] = src[i] * ch.pz(s, bk.symbol(a, b, depth), z);
                }
            ++depth;
        }
        // Leaf: posterior over (a, j) via the effective bin law.
        const auto &lk = part[m];
        double total = 0.0;
        double acc = 0.0;
        std::vector<double> g(static_cast<size_t>(bk.na) * bk.nj);
        for (int a = 0; a < bk.na; ++a)
            for (int j = 0; j < bk.nj; ++j) {
                double v = 0.0;
                const double *r = rho.data() + static_cast<size_t>(j) * bk.nb;
                const double *l = lk.data() + static_cast<size_t>(a) * bk.nb;
                for (int b = 0; b < bk.nb; ++b) v += r[b] * l[b];
                g[static_cast<size_t>(a) * bk.nj + j] = v;
                total += v;
            }
        if (total > 0.0) {
            for (double v : g)
                if (v > 0.0) acc += v * std::log2(total / v);
            h += prior * acc;
        }
        // Advance the z odometer.
        int ax = m - 1;
        while (ax >= 0 && ++zdig[ax] == nz) zdig[ax--] = 0;
        if (ax < 0) break;
        depth = ax;
    }
    return h;
}

} // namespace

double exact_equivocation(const MultiplexCode &code, const channels::DiscreteWiretapChannel &ch,
                          const markov::StateChain &chain, const std::vector<int> *key_cells,
                          int threads) {
    const int k = code.k, N = code.N;
    if (ch.ns() != k) throw ValidationError("exact_equivocation: channel state count mismatch");
    if (key_cells && static_cast<int>(key_cells->size()) != k)
        throw ValidationError("exact_equivocation: need one key cell count per delayed state");
    // Single-state chains carry no state information; the delay is inert.
    const long long d = k == 1 ? 0 : code.d;
    const double zpaths = std::pow(static_cast<double>(ch.nz()), N) * std::pow(k, N);
    const double spaths = std::pow(static_cast<double>(k), static_cast<double>(N + d));
    if (zpaths > kMaxEnumPaths || spaths > kMaxEnumPaths) {
        std::ostringstream os;
        os << "exact_equivocation: enumeration needs " << std::max(zpaths, spaths)
           << " paths, cap is " << kMaxEnumPaths;
        throw GuardrailError(os.str());
    }

    std::vector<std::vector<double>> rho;
    for (int c = 0; c < k; ++c)
        rho.push_back(effective_bin_law(code.books[c], key_cells ? (*key_cells)[c] : 0));

    const auto pi = markov::stationary(chain).pi;
    const int L = static_cast<int>(N + d);
    size_t n_paths = 1;
    for (int t = 0; t < L; ++t) n_paths *= static_cast<size_t>(k);

    const size_t chunk = 1024;
    const size_t n_chunks = (n_paths + chunk - 1) / chunk;
    std::vector<double> chunk_sum(n_chunks, 0.0);

    parallel_for(n_chunks, threads, [&](size_t ci) {
        std::vector<int> st(L);
        std::vector<int> slot_s;
        double acc = 0.0;
        for (size_t p = ci * chunk; p < std::min(n_paths, (ci + 1) * chunk); ++p) {
            size_t rest = p;
            for (int t = L - 1; t >= 0; --t) {
                st[t] = static_cast<int>(rest % k);
                rest /= k;
            }
            double prob = pi[st[0]];
            for (int t = 0; t + 1 < L && prob > 0.0; ++t) prob *= chain.K()(st[t], st[t + 1]);
            if (prob <= 0.0) continue;
            // Times 1..N live at st[d..L); delayed states at st[0..N).
            double h = 0.0;
            for (int c = 0; c < k; ++c) {
                const auto &bk = code.books[c];
                slot_s.clear();
                for (int i = 0; i < N && static_cast<int>(slot_s.size()) < bk.len; ++i)
                    if (st[i] == c) slot_s.push_back(st[d + i]);
                h += component_entropy(bk, ch, slot_s, rho[c]);
            }
            acc += prob * h;
        }
        chunk_sum[ci] = acc;
    });
    return pairwise_sum(chunk_sum) / N;
}

RunReport run_experiment(const channels::DiscreteWiretapChannel &ch,
                         const markov::StateChain &chain, const capacity::InputLawFamily &input,
                         const ExperimentSpec &spec) {
    if (spec.blocks < 1) throw ValidationError("run_experiment: need at least one block");
    const int k = chain.k();
    if (spec.feedback) {
        if (spec.d < 1)
            throw ValidationError("run_experiment: feedback keying needs delay >= 1");
        if (static_cast<int>(spec.key_rate.size()) != k)
            throw ValidationError("run_experiment: need one key rate per delayed state");
    }

    MultiplexCode code = build_code(ch, chain, spec.d, spec.rates, input, spec.N, spec.seed);
    const int N = spec.N;
    const long long d = spec.d;

    std::vector<int> cells(k, 0);
    uint64_t key_seed = derive_seed(spec.seed, "feedback-key");
    if (spec.feedback)
        for (int c = 0; c < k; ++c) {
            int bits = spec.key_rate[c] <= 0.0
                           ? 0
                           : static_cast<int>(std::ceil(spec.key_rate[c] * N));
            cells[c] = 1 << bits;
        }

    std::mt19937_64 rng(derive_seed(spec.seed, "experiment"));
    const auto pi = markov::stationary(chain).pi;
    const auto &K = chain.K();

    // Stationary start: prehistory of d states feeding the first block's
    // delayed-state slots.
    std::vector<int> tail;
    int cur = -1;
    for (long long t = 0; t < d; ++t) {
        cur = t == 0 ? draw_categorical(rng, pi.data(), k)
                     : draw_categorical(rng, &K.a[static_cast<size_t>(cur) * k], k);
        tail.push_back(cur);
    }

    std::vector<std::vector<int>> y_hist;
    long long errors = 0;
    for (long long blk = 1; blk <= spec.blocks; ++blk) {
        std::vector<int> s_seq(N), sd_seq(N);
        for (int i = 0; i < N; ++i) {
            cur = cur < 0 ? draw_categorical(rng, pi.data(), k)
                          : draw_categorical(rng, &K.a[static_cast<size_t>(cur) * k], k);
            s_seq[i] = cur;
        }
        for (int i = 0; i < N; ++i)
            sd_seq[i] = i < d ? tail[tail.size() - static_cast<size_t>(d - i)]
                              : s_seq[i - d];
        for (int i = 0; i < N; ++i) tail.push_back(s_seq[i]);
        if (static_cast<long long>(tail.size()) > d)
            tail.erase(tail.begin(), tail.end() - static_cast<ptrdiff_t>(d));

        Message w(k);
        for (int c = 0; c < k; ++c) {
            const auto &bk = code.books[c];
            w[c].a = static_cast<int>(draw_below(rng, bk.na));
            w[c].j = static_cast<int>(draw_below(rng, bk.nj));
        }

        bool keyed = spec.feedback && blk > 2 * d;
        std::vector<int> keys(k, 0);
        if (keyed) {
            const auto &src = y_hist[static_cast<size_t>(blk - d - 1)];
            for (int c = 0; c < k; ++c)
                keys[c] = generate_key(src, spec.key_rate[c],
                                       mix64(key_seed + static_cast<uint64_t>(c)));
        }

        std::vector<int> x = encode(code, w, sd_seq, keyed ? &keys : nullptr, rng);
        std::vector<int> y(N), z(N);
        for (int i = 0; i < N; ++i) {
            const int nyz = ch.ny() * ch.nz();
            std::vector<double> cell(nyz);
            for (int yy = 0; yy < ch.ny(); ++yy)
                for (int zz = 0; zz < ch.nz(); ++zz)
                    cell[static_cast<size_t>(yy) * ch.nz() + zz] = ch.p(s_seq[i], x[i], yy, zz);
            int pick = draw_categorical(rng, cell.data(), nyz);
            y[i] = pick / ch.nz();
            z[i] = pick % ch.nz();
        }
        y_hist.push_back(y);

        DecodeResult dec = decode(code, ch, y, s_seq, sd_seq);
        bool bad = false;
        for (int c = 0; c < k; ++c) {
            int j_est = dec.est[c].j;
            if (keyed) {
                const auto &bk = code.books[c];
                j_est = (j_est - keys[c] % bk.nj + bk.nj) % bk.nj;
            }
            if (dec.est[c].a != w[c].a || j_est != w[c].j) bad = true;
        }
        if (bad) ++errors;
    }

    RunReport rep;
    rep.blocks = spec.blocks;
    rep.feedback = spec.feedback;
    rep.error_rate = static_cast<double>(errors) / spec.blocks;
    rep.message_rate = code.message_rate();
    rep.equivocation =
        exact_equivocation(code, ch, chain, spec.feedback ? &cells : nullptr, spec.threads);

    Mat wd = spec.d < 0 ? markov::power_limit(chain) : markov::power(chain, spec.d);
    std::vector<double> parts;
    for (int sd = 0; sd < k; ++sd) {
        std::vector<double> q(input.rows.begin() + static_cast<size_t>(sd) * input.nx,
                              input.rows.begin() + static_cast<size_t>(sd + 1) * input.nx);
        double acc = 0.0;
        for (int s = 0; s < k; ++s)
            if (wd(sd, s) > 0.0)
                acc += wd(sd, s) * (capacity::discrete_mi_y(ch, s, q) -
                                    capacity::discrete_mi_z(ch, s, q));
        parts.push_back(pi[sd] * acc);
    }
    rep.analytic_secrecy = pairwise_sum(parts);
    return rep;
}

} // namespace fsmwt::codec
