#include <fsmwt/channels.hpp>

#include <cmath>
#include <sstream>

namespace fsmwt::channels {
namespace {

// Standard normal CDF.
double phi_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

double phi_pdf(double t) {
    static const double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * t * t);
}

void check_axis(const AxisGrid &g, const char *name) {
    if (g.n < 1) {
        std::ostringstream os;
        os << "gaussian_to_discrete: " << name << "-grid needs >= 1 cell, got " << g.n;
        throw ValidationError(os.str());
    }
    if (!(g.lo < g.hi) || !std::isfinite(g.lo) || !std::isfinite(g.hi)) {
        std::ostringstream os;
        os << "gaussian_to_discrete: " << name << "-grid bounds [" << g.lo << ", " << g.hi
           << "] are degenerate";
        throw ValidationError(os.str());
    }
}

// Cell masses of N(mean, sigma^2) on the grid: midpoint density times width,
// exact tail mass folded into the edge cells, then normalized to unit sum.
std::vector<double> quantize_row(double mean, double sigma, const AxisGrid &g) {
    const int n = g.n;
    const double w = (g.hi - g.lo) / n;
    std::vector<double> mass(n);
    for (int i = 0; i < n; ++i) {
        double m = g.lo + (i + 0.5) * w;
        mass[i] = phi_pdf((m - mean) / sigma) / sigma * w;
    }
    mass[0] += phi_cdf((g.lo - mean) / sigma);
    mass[n - 1] += 1.0 - phi_cdf((g.hi - mean) / sigma);
    double total = 0.0;
    for (double v : mass) total += v;
    for (double &v : mass) v /= total;
    return mass;
}

DiscreteWiretapChannel from_two_factor(int ns, int nx, int ny, int nz,
                                       const std::vector<double> &main,
                                       const std::vector<double> &wiretap_per_s,
                                       bool shared_wiretap) {
    std::vector<double> table(static_cast<size_t>(ns) * nx * ny * nz);
    for (int s = 0; s < ns; ++s)
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                double py = main[(static_cast<size_t>(s) * nx + x) * ny + y];
                const double *pz = shared_wiretap
                                       ? &wiretap_per_s[static_cast<size_t>(y) * nz]
                                       : &wiretap_per_s[(static_cast<size_t>(s) * ny + y) * nz];
                for (int z = 0; z < nz; ++z)
                    table[((static_cast<size_t>(s) * nx + x) * ny + y) * nz + z] = py * pz[z];
            }
    std::optional<DegradedWitness> wit;
    if (shared_wiretap) {
        Mat wz(ny, nz);
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) wz(y, z) = wiretap_per_s[static_cast<size_t>(y) * nz + z];
        wit = DegradedWitness{ns, nx, ny, main, std::move(wz)};
    }
    return DiscreteWiretapChannel(ns, nx, ny, nz, std::move(table), std::move(wit));
}

} // namespace

DiscreteWiretapChannel::DiscreteWiretapChannel(int ns, int nx, int ny, int nz,
                                               std::vector<double> table,
                                               std::optional<DegradedWitness> witness)
    : ns_(ns), nx_(nx), ny_(ny), nz_(nz), table_(std::move(table)), witness_(std::move(witness)) {
    if (ns_ < 1 || nx_ < 1 || ny_ < 1 || nz_ < 1)
        throw ValidationError("DiscreteWiretapChannel: alphabet sizes must be >= 1");
    size_t want = static_cast<size_t>(ns_) * nx_ * ny_ * nz_;
    if (table_.size() != want) {
        std::ostringstream os;
        os << "DiscreteWiretapChannel: table has " << table_.size() << " entries, expected "
           << want;
        throw ValidationError(os.str());
    }
    py_.assign(static_cast<size_t>(ns_) * nx_ * ny_, 0.0);
    pz_.assign(static_cast<size_t>(ns_) * nx_ * nz_, 0.0);
    for (int s = 0; s < ns_; ++s)
        for (int x = 0; x < nx_; ++x) {
            double sum = 0.0;
            for (int y = 0; y < ny_; ++y)
                for (int z = 0; z < nz_; ++z) {
                    double v = p(s, x, y, z);
                    if (!(v >= 0.0)) {
                        std::ostringstream os;
                        os << "DiscreteWiretapChannel: negative entry at (s=" << s << ",x=" << x
                           << ",y=" << y << ",z=" << z << ")";
                        throw ValidationError(os.str());
                    }
                    sum += v;
                    py_[(static_cast<size_t>(s) * nx_ + x) * ny_ + y] += v;
                    pz_[(static_cast<size_t>(s) * nx_ + x) * nz_ + z] += v;
                }
            if (std::abs(sum - 1.0) > 1e-12) {
                std::ostringstream os;
                os << "DiscreteWiretapChannel: P(.,.|x=" << x << ",s=" << s << ") sums to " << sum;
                throw ValidationError(os.str());
            }
        }
}

void GaussianSpec::validate() const {
    if (sigma2.empty()) throw ValidationError("GaussianSpec: needs at least one state variance");
    for (double v : sigma2)
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("GaussianSpec: state variances must be positive and finite");
    if (!(sigma2_w > 0.0) || !std::isfinite(sigma2_w))
        throw ValidationError("GaussianSpec: sigma2_w must be positive and finite");
    if (!(p0 >= 0.0) || !std::isfinite(p0))
        throw ValidationError("GaussianSpec: power budget must be >= 0 and finite");
}

void FadingSpec::validate() const {
    base.validate();
    if (g.size() != base.sigma2.size() || l.size() != base.sigma2.size())
        throw ValidationError("FadingSpec: gain vectors must match the state count");
    bool any = false;
    for (double v : g) {
        if (!std::isfinite(v)) throw ValidationError("FadingSpec: gains must be finite");
        if (v != 0.0) any = true;
    }
    for (double v : l)
        if (!std::isfinite(v)) throw ValidationError("FadingSpec: gains must be finite");
    if (!any) throw ValidationError("FadingSpec: g must be nonzero in at least one state");
}

std::vector<double> grid_midpoints(const AxisGrid &g) {
    check_axis(g, "midpoint");
    const double w = (g.hi - g.lo) / g.n;
    std::vector<double> m(g.n);
    for (int i = 0; i < g.n; ++i) m[i] = g.lo + (i + 0.5) * w;
    return m;
}

DiscreteWiretapChannel degraded_from(int ns, int nx, int ny, int nz,
                                     const std::vector<double> &main, const Mat &wiretap) {
    if (static_cast<size_t>(ns) * nx * ny != main.size())
        throw ValidationError("degraded_from: main factor has wrong size");
    if (wiretap.rows != ny || wiretap.cols != nz)
        throw ValidationError("degraded_from: wiretap y-axis does not match main y-axis");
    for (int s = 0; s < ns; ++s)
        for (int x = 0; x < nx; ++x) {
            double sum = 0.0;
            for (int y = 0; y < ny; ++y) {
                double v = main[(static_cast<size_t>(s) * nx + x) * ny + y];
                if (!(v >= 0.0)) throw ValidationError("degraded_from: negative main entry");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw ValidationError("degraded_from: main factor rows must be stochastic");
        }
    std::vector<double> wz(static_cast<size_t>(ny) * nz);
    for (int y = 0; y < ny; ++y) {
        double sum = 0.0;
        for (int z = 0; z < nz; ++z) {
            double v = wiretap(y, z);
            if (!(v >= 0.0)) throw ValidationError("degraded_from: negative wiretap entry");
            wz[static_cast<size_t>(y) * nz + z] = v;
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError("degraded_from: wiretap rows must be stochastic");
    }
    return from_two_factor(ns, nx, ny, nz, main, wz, true);
}

std::optional<DegradedWitness> check_degraded(const DiscreteWiretapChannel &ch, double tol) {
    const int ns = ch.ns(), nx = ch.nx(), ny = ch.ny(), nz = ch.nz();
    Mat q(ny, nz);
    for (int y = 0; y < ny; ++y) {
        // Least squares for q(z|y) over the stacked (x,s) rows decouples per
        // z; the optimum is automatically nonnegative with exact unit sum.
        double denom = 0.0;
        for (int s = 0; s < ns; ++s)
            for (int x = 0; x < nx; ++x) {
                double b = ch.py(s, x, y);
                denom += b * b;
            }
        if (denom < 1e-300) {
            for (int z = 0; z < nz; ++z) q(y, z) = 1.0 / nz;
            continue;
        }
        for (int z = 0; z < nz; ++z) {
            double num = 0.0;
            for (int s = 0; s < ns; ++s)
                for (int x = 0; x < nx; ++x) num += ch.py(s, x, y) * ch.p(s, x, y, z);
            q(y, z) = num / denom;
        }
    }
    double worst = 0.0;
    for (int s = 0; s < ns; ++s)
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                for (int z = 0; z < nz; ++z) {
                    double r = std::abs(ch.p(s, x, y, z) - ch.py(s, x, y) * q(y, z));
                    if (r > worst) worst = r;
                }
    if (worst > tol) return std::nullopt;
    std::vector<double> main(static_cast<size_t>(ns) * nx * ny);
    for (int s = 0; s < ns; ++s)
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                main[(static_cast<size_t>(s) * nx + x) * ny + y] = ch.py(s, x, y);
    return DegradedWitness{ns, nx, ny, std::move(main), std::move(q)};
}

DiscreteWiretapChannel gaussian_to_discrete(const GaussianSpec &spec, const QuantGrid &grid) {
    spec.validate();
    check_axis(grid.x, "x");
    check_axis(grid.y, "y");
    check_axis(grid.z, "z");
    const int ns = static_cast<int>(spec.sigma2.size());
    const int nx = grid.x.n, ny = grid.y.n, nz = grid.z.n;
    auto xm = grid_midpoints(grid.x);
    auto ym = grid_midpoints(grid.y);

    std::vector<double> main(static_cast<size_t>(ns) * nx * ny);
    for (int s = 0; s < ns; ++s) {
        double sig = std::sqrt(spec.sigma2[s]);
        for (int x = 0; x < nx; ++x) {
            auto row = quantize_row(xm[x], sig, grid.y);
            for (int y = 0; y < ny; ++y) main[(static_cast<size_t>(s) * nx + x) * ny + y] = row[y];
        }
    }
    std::vector<double> wz(static_cast<size_t>(ny) * nz);
    double sw = std::sqrt(spec.sigma2_w);
    for (int y = 0; y < ny; ++y) {
        auto row = quantize_row(ym[y], sw, grid.z);
        for (int z = 0; z < nz; ++z) wz[static_cast<size_t>(y) * nz + z] = row[z];
    }
    return from_two_factor(ns, nx, ny, nz, main, wz, true);
}

DiscreteWiretapChannel gaussian_to_discrete(const FadingSpec &spec, const QuantGrid &grid) {
    spec.validate();
    check_axis(grid.x, "x");
    check_axis(grid.y, "y");
    check_axis(grid.z, "z");
    const int ns = static_cast<int>(spec.base.sigma2.size());
    const int nx = grid.x.n, ny = grid.y.n, nz = grid.z.n;
    auto xm = grid_midpoints(grid.x);
    auto ym = grid_midpoints(grid.y);

    std::vector<double> main(static_cast<size_t>(ns) * nx * ny);
    for (int s = 0; s < ns; ++s) {
        double sig = std::sqrt(spec.base.sigma2[s]);
        for (int x = 0; x < nx; ++x) {
            auto row = quantize_row(spec.g[s] * xm[x], sig, grid.y);
            for (int y = 0; y < ny; ++y) main[(static_cast<size_t>(s) * nx + x) * ny + y] = row[y];
        }
    }
    bool shared = true;
    for (int s = 1; s < ns; ++s)
        if (spec.l[s] != spec.l[0]) shared = false;

    double sw = std::sqrt(spec.base.sigma2_w);
    if (shared) {
        std::vector<double> wz(static_cast<size_t>(ny) * nz);
        for (int y = 0; y < ny; ++y) {
            auto row = quantize_row(spec.l[0] * ym[y], sw, grid.z);
            for (int z = 0; z < nz; ++z) wz[static_cast<size_t>(y) * nz + z] = row[z];
        }
        return from_two_factor(ns, nx, ny, nz, main, wz, true);
    }
    std::vector<double> wz(static_cast<size_t>(ns) * ny * nz);
    for (int s = 0; s < ns; ++s)
        for (int y = 0; y < ny; ++y) {
            auto row = quantize_row(spec.l[s] * ym[y], sw, grid.z);
            for (int z = 0; z < nz; ++z) wz[(static_cast<size_t>(s) * ny + y) * nz + z] = row[z];
        }
    return from_two_factor(ns, nx, ny, nz, main, wz, false);
}

} // namespace fsmwt::channels
