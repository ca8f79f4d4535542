#include <fsmwt/markov.hpp>

#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace fsmwt {

std::vector<double> solve_dense(Mat A, std::vector<double> b) {
    const int n = A.rows;
    if (A.cols != n || static_cast<int>(b.size()) != n)
        throw ValidationError("solve_dense: non-square system");
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
        if (std::abs(A(piv, col)) < 1e-300)
            throw ValidationError("solve_dense: singular system");
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A(piv, c), A(col, c));
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = A(r, col) / A(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A(r, c) -= f * A(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A(r, c) * x[c];
        x[r] = s / A(r, r);
    }
    return x;
}

double pairwise_sum(const double *x, size_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pairwise_sum(const std::vector<double> &x) { return pairwise_sum(x.data(), x.size()); }

uint64_t derive_seed(uint64_t root, std::string_view label) {
    uint64_t h = mix64(root ^ 0x8f1b7c92d4e5a6b3ULL);
    for (unsigned char ch : label) h = mix64(h ^ ch);
    return h;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char *env = std::getenv("FSMWT_THREADS")) {
        char *end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(size_t n, int threads, const std::function<void(size_t)> &fn) {
    if (n == 0) return;
    int t = threads;
    if (t <= 0) t = resolve_threads(0);
    if (static_cast<size_t>(t) > n) t = static_cast<int>(n);
    if (t <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    size_t chunk = (n + t - 1) / t;
    for (int w = 0; w < t; ++w) {
        size_t lo = w * chunk;
        size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto &th : pool) th.join();
}

} // namespace fsmwt

namespace fsmwt::markov {
namespace {

// Reachability on the support graph from `start`, forward or backward.
std::vector<char> reach(const Mat &K, int start, bool forward) {
    const int n = K.rows;
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    seen[start] = 1;
    q.push(start);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w = 0; w < n; ++w) {
            double p = forward ? K(v, w) : K(w, v);
            if (p > 0.0 && !seen[w]) {
                seen[w] = 1;
                q.push(w);
            }
        }
    }
    return seen;
}

// Period of a strongly connected support graph: gcd over edges (v,w) of
// level(v) + 1 - level(w) for BFS levels from state 0.
long long period(const Mat &K) {
    const int n = K.rows;
    std::vector<long long> level(n, -1);
    std::queue<int> q;
    level[0] = 0;
    q.push(0);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w = 0; w < n; ++w)
            if (K(v, w) > 0.0 && level[w] < 0) {
                level[w] = level[v] + 1;
                q.push(w);
            }
    }
    long long g = 0;
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            if (K(v, w) > 0.0) g = std::gcd(g, level[v] + 1 - level[w]);
    return g < 0 ? -g : g;
}

void renormalize_rows(Mat &m) {
    for (int r = 0; r < m.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < m.cols; ++c) s += m(r, c);
        if (s > 0.0)
            for (int c = 0; c < m.cols; ++c) m(r, c) /= s;
    }
}

} // namespace

StateChain::StateChain(Mat K) : K_(std::move(K)) {
    const int n = K_.rows;
    if (n < 1 || K_.cols != n) throw ValidationError("StateChain: K must be square with k >= 1");
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) {
            double p = K_(r, c);
            if (!(p >= 0.0) || p > 1.0 + 1e-12) {
                std::ostringstream os;
                os << "StateChain: K(" << r << "," << c << ") = " << p << " outside [0,1]";
                throw ValidationError(os.str());
            }
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-12) {
            std::ostringstream os;
            os << "StateChain: row " << r << " sums to " << s << ", not 1";
            throw ValidationError(os.str());
        }
    }
    auto fwd = reach(K_, 0, true);
    auto bwd = reach(K_, 0, false);
    for (int v = 0; v < n; ++v) {
        if (!fwd[v]) {
            std::ostringstream os;
            os << "StateChain: reducible, state " << v << " unreachable from state 0";
            throw ValidationError(os.str());
        }
        if (!bwd[v]) {
            std::ostringstream os;
            os << "StateChain: reducible, state " << v << " cannot return to state 0 (transient class)";
            throw ValidationError(os.str());
        }
    }
    long long per = period(K_);
    if (per != 1) {
        std::ostringstream os;
        os << "StateChain: periodic with period " << per;
        throw ValidationError(os.str());
    }
}

TwoStateParams TwoStateParams::from_memory(double u, double c) {
    if (!(u > -1.0 && u < 1.0)) throw ValidationError("two_state: memory u must lie in (-1,1)");
    if (!(c > 0.0)) throw ValidationError("two_state: ratio c must be positive");
    double g = c * (1.0 - u) / (1.0 + c);
    double b = (1.0 - u) / (1.0 + c);
    if (!(g > 0.0 && g <= 1.0) || !(b > 0.0 && b <= 1.0))
        throw ValidationError("two_state: derived g or b falls outside (0,1]");
    return TwoStateParams{b, g};
}

StationaryLaw stationary(const StateChain &chain) {
    const int n = chain.k();
    const Mat &K = chain.K();
    // (I - K^T) pi = 0 with the last equation replaced by sum(pi) = 1.
    Mat A(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) A(r, c) = (r == c ? 1.0 : 0.0) - K(c, r);
    std::vector<double> b(n, 0.0);
    for (int c = 0; c < n; ++c) A(n - 1, c) = 1.0;
    b[n - 1] = 1.0;
    StationaryLaw law{solve_dense(std::move(A), std::move(b))};
    double s = 0.0;
    for (double &p : law.pi) {
        if (p < 0.0 && p > -1e-13) p = 0.0;
        s += p;
    }
    for (double &p : law.pi) p /= s;
    return law;
}

Mat power_limit(const StateChain &chain) {
    auto pi = stationary(chain).pi;
    const int n = chain.k();
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = pi[c];
    return m;
}

Mat power(const StateChain &chain, long long d) {
    if (d < 0) throw ValidationError("power: d must be >= 0");
    if (d > kMaxExactDelay) return power_limit(chain);
    Mat result = Mat::identity(chain.k());
    Mat base = chain.K();
    long long e = d;
    while (e > 0) {
        if (e & 1) {
            result = result.mul(base);
            renormalize_rows(result);
        }
        e >>= 1;
        if (e > 0) {
            base = base.mul(base);
            renormalize_rows(base);
        }
    }
    return result;
}

DelayedJoint delayed_joint(const StateChain &chain, long long d) {
    auto pi = stationary(chain).pi;
    Mat kd = power(chain, d);
    for (int r = 0; r < kd.rows; ++r)
        for (int c = 0; c < kd.cols; ++c) kd(r, c) *= pi[r];
    return DelayedJoint{d, std::move(kd)};
}

DelayedJoint delayed_joint_limit(const StateChain &chain) {
    auto pi = stationary(chain).pi;
    const int n = chain.k();
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = pi[r] * pi[c];
    return DelayedJoint{-1, std::move(m)};
}

StateChain two_state(double u, double c) {
    auto p = TwoStateParams::from_memory(u, c);
    Mat K(2, 2);
    K(0, 0) = 1.0 - p.b;
    K(0, 1) = p.b;
    K(1, 0) = p.g;
    K(1, 1) = 1.0 - p.g;
    return StateChain(std::move(K));
}

} // namespace fsmwt::markov
