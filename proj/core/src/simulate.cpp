#include <fsmwt/simulate.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace fsmwt::simulate {
namespace {

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

} // namespace

Trajectory sample_trajectory(const markov::StateChain &chain,
                             const channels::DiscreteWiretapChannel &ch,
                             const capacity::InputLawFamily &input, long long d, long long T,
                             uint64_t seed) {
    const int k = chain.k();
    if (ch.ns() != k || input.k != k)
        throw ValidationError("sample_trajectory: channel, chain and input must agree on states");
    if (input.nx != ch.nx())
        throw ValidationError("sample_trajectory: input alphabet does not match the channel");
    if (T < 1) throw ValidationError("sample_trajectory: need T >= 1");
    if (d < 0) throw ValidationError("sample_trajectory: delay must be nonnegative");

    Trajectory traj;
    traj.T = T;
    traj.d = d;
    traj.seed = seed;
    traj.s.resize(T);
    traj.sd.resize(T);
    traj.x.resize(T);
    traj.y.resize(T);
    traj.z.resize(T);

    std::mt19937_64 rng(derive_seed(seed, "trajectory"));
    const auto pi = markov::stationary(chain).pi;
    const auto &K = chain.K();
    const int nyz = ch.ny() * ch.nz();
    std::vector<double> cell(nyz);
    for (long long i = 0; i < T; ++i) {
        traj.s[i] = i == 0 ? draw_categorical(rng, pi.data(), k)
                           : draw_categorical(rng, &K.a[static_cast<size_t>(traj.s[i - 1]) * k], k);
        traj.sd[i] = i >= d ? traj.s[i - d] : -1;
        int row = traj.sd[i] < 0 ? 0 : traj.sd[i];
        traj.x[i] =
            draw_categorical(rng, input.rows.data() + static_cast<size_t>(row) * input.nx, input.nx);
        for (int y = 0; y < ch.ny(); ++y)
            for (int z = 0; z < ch.nz(); ++z)
                cell[static_cast<size_t>(y) * ch.nz() + z] = ch.p(traj.s[i], traj.x[i], y, z);
        int pick = draw_categorical(rng, cell.data(), nyz);
        traj.y[i] = pick / ch.nz();
        traj.z[i] = pick % ch.nz();
    }
    return traj;
}

EmpiricalCmi empirical_cmi(const Trajectory &traj, CmiKind which) {
    const auto &w = which == CmiKind::XY ? traj.y : traj.z;
    int k = 0, nx = 0, nw = 0;
    long long n = 0;
    for (long long i = 0; i < traj.T; ++i) {
        if (traj.sd[i] < 0) continue;
        k = std::max({k, traj.s[i] + 1, traj.sd[i] + 1});
        nx = std::max(nx, traj.x[i] + 1);
        nw = std::max(nw, w[i] + 1);
        ++n;
    }
    EmpiricalCmi out;
    if (n == 0) {
        out.undersampled = true;
        return out;
    }

    std::vector<long long> c4(static_cast<size_t>(k) * k * nx * nw, 0);
    std::vector<long long> c2(static_cast<size_t>(k) * k, 0);
    std::vector<long long> c3x(static_cast<size_t>(k) * k * nx, 0);
    std::vector<long long> c3w(static_cast<size_t>(k) * k * nw, 0);
    for (long long i = 0; i < traj.T; ++i) {
        if (traj.sd[i] < 0) continue;
        size_t pair = static_cast<size_t>(traj.s[i]) * k + traj.sd[i];
        ++c4[(pair * nx + traj.x[i]) * nw + w[i]];
        ++c2[pair];
        ++c3x[pair * nx + traj.x[i]];
        ++c3w[pair * nw + w[i]];
    }

    double mean = 0.0, sq = 0.0;
    for (size_t pair = 0; pair < c2.size(); ++pair) {
        if (c2[pair] < 100) out.undersampled = true;
        for (int x = 0; x < nx; ++x)
            for (int v = 0; v < nw; ++v) {
                long long c = c4[(pair * nx + x) * nw + v];
                if (c == 0) continue;
                double f = std::log2(static_cast<double>(c) * c2[pair] /
                                     (static_cast<double>(c3x[pair * nx + x]) *
                                      c3w[pair * nw + v]));
                double p = static_cast<double>(c) / n;
                mean += p * f;
                sq += p * f * f;
            }
    }
    out.value = mean;
    out.stderr_ = std::sqrt(std::max(0.0, sq - mean * mean) / n);
    return out;
}

Mat empirical_transitions(const Trajectory &traj, int k) {
    if (k < 1) throw ValidationError("empirical_transitions: need k >= 1");
    Mat m(k, k);
    for (long long i = 0; i + 1 < traj.T; ++i) {
        if (traj.s[i] >= k || traj.s[i + 1] >= k)
            throw ValidationError("empirical_transitions: state exceeds k");
        m(traj.s[i], traj.s[i + 1]) += 1.0;
    }
    for (int r = 0; r < k; ++r) {
        double sum = 0.0;
        for (int c = 0; c < k; ++c) sum += m(r, c);
        if (sum > 0.0)
            for (int c = 0; c < k; ++c) m(r, c) /= sum;
    }
    return m;
}

std::vector<SweepRecord> sweep(const std::vector<SweepPoint> &grid,
                               const channels::GaussianSpec &base, double c, int threads) {
    std::vector<SweepRecord> out(grid.size());
    parallel_for(grid.size(), threads, [&](size_t i) {
        SweepRecord &rec = out[i];
        rec.pt = grid[i];
        try {
            markov::StateChain chain = markov::two_state(rec.pt.u, c);
            channels::GaussianSpec spec = base;
            spec.sigma2_w = rec.pt.sigma2_w;
            rec.result = capacity::gaussian_capacity(spec, chain, rec.pt.d, rec.pt.feedback);
        } catch (const std::exception &e) {
            rec.error = e.what();
        }
    });
    return out;
}

} // namespace fsmwt::simulate
