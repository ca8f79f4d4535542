// Shared plumbing: error taxonomy, small dense matrices, reproducible sums,
// seed derivation, thread-count resolution.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace fsmwt {

// Invalid inputs, shape mismatches, domain violations. The CLI maps this
// (and config parse failures) to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A desk-scale size guardrail refused the computation. CLI exit code 4.
class GuardrailError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kTwoPiE = 17.079468445347132; // 2*pi*e

// =============================================================================
// Dense row-major matrix, sized for state counts (k <= 8), not BLAS work.
// =============================================================================

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double &operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Mat mul(const Mat &o) const {
        if (cols != o.rows) throw ValidationError("Mat::mul: inner dimensions disagree");
        Mat r(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                double v = (*this)(i, j);
                if (v == 0.0) continue;
                for (int l = 0; l < o.cols; ++l) r(i, l) += v * o(j, l);
            }
        return r;
    }

    double max_abs_diff(const Mat &o) const {
        double m = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
            double dv = a[i] - o.a[i];
            if (dv < 0) dv = -dv;
            if (dv > m) m = dv;
        }
        return m;
    }
};

// Solve A x = b by Gaussian elimination with partial pivoting. A is consumed.
// Only used on k x k systems, k tiny.
std::vector<double> solve_dense(Mat A, std::vector<double> b);

// =============================================================================
// Reproducible reductions
// =============================================================================

// Fixed-shape pairwise tree sum: result depends only on element order, never
// on chunking or thread count, and carries less rounding drift than a naive
// accumulation.
double pairwise_sum(const double *x, size_t n);
double pairwise_sum(const std::vector<double> &x);

// =============================================================================
// Seeding
// =============================================================================

// splitmix64 finalizer; full avalanche.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent sub-stream seed for a labeled component. Adding a new label
// never perturbs draws made under existing labels.
uint64_t derive_seed(uint64_t root, std::string_view label);

// =============================================================================
// Threads
// =============================================================================

// requested <= 0 means "not set": fall back to FSMWT_THREADS, then to
// hardware_concurrency.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n) across at most `threads` workers. Static block
// partition; caller owns determinism of the per-index writes.
void parallel_for(size_t n, int threads, const std::function<void(size_t)> &fn);

} // namespace fsmwt
