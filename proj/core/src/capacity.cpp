#include <fsmwt/capacity.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fsmwt::capacity {
namespace {

constexpr double kLambdaTol = 1e-9;   // absolute width for budget-multiplier bisection
constexpr double kBudgetRel = 1e-7;   // relative budget closure target
constexpr double kChordSlack = 1e-9;  // midpoint chord tolerance in the concavity screen

// Concave 1-D maximization on [lo, hi]; evaluates both endpoints explicitly
// so boundary maxima are exact.
template <class F>
double ternary_max(const F &f, double lo, double hi, double tol) {
    double a = lo, b = hi;
    while (b - a > tol) {
        double m1 = a + (b - a) / 3.0;
        double m2 = b - (b - a) / 3.0;
        if (f(m1) < f(m2))
            a = m1;
        else
            b = m2;
    }
    double mid = 0.5 * (a + b);
    double best = mid, bv = f(mid);
    if (f(lo) > bv) {
        best = lo;
        bv = f(lo);
    }
    if (f(hi) > bv) best = hi;
    return best;
}

struct Weighting {
    std::vector<double> pi; // pi(sd)
    Mat w;                  // K^d(sd, s), stationary rows when d < 0
};

Weighting weighting_for(const markov::StateChain &chain, long long d) {
    Weighting wt;
    wt.pi = markov::stationary(chain).pi;
    wt.w = d < 0 ? markov::power_limit(chain) : markov::power(chain, d);
    return wt;
}

// Grid for the concavity screen: uniform coverage plus a geometric tail
// toward 0 where the log terms curve hardest.
std::vector<double> screen_points(double pmax) {
    std::vector<double> pts;
    for (int i = 0; i <= 32; ++i) pts.push_back(pmax * i / 32.0);
    double v = pmax;
    for (int i = 0; i < 25 && v > pmax * 1e-9; ++i) {
        v *= 0.5;
        pts.push_back(v);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

template <class F>
bool concave_on(const F &f, double pmax) {
    auto pts = screen_points(pmax);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double a = pts[i], b = pts[i + 1];
        if (f(0.5 * (a + b)) < 0.5 * (f(a) + f(b)) - kChordSlack) return false;
    }
    return true;
}

// ============================================================================
// Simplex utilities for the discrete solvers
// ============================================================================

void enumerate_simplex(int nx, int res, const std::function<void(const std::vector<double> &)> &fn) {
    std::vector<int> c(nx, 0);
    std::vector<double> q(nx);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == nx - 1) {
            c[pos] = left;
            for (int i = 0; i < nx; ++i) q[i] = static_cast<double>(c[i]) / res;
            fn(q);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, res);
}

} // namespace

double gaussian_secrecy_term(double p, double sigma2_s, double sigma2_w) {
    double v = 0.5 * std::log2(1.0 + p / sigma2_s) -
               0.5 * std::log2(1.0 + p / (sigma2_s + sigma2_w));
    return v > 0.0 ? v : 0.0;
}

double gaussian_feedback_term(double p, double sigma2_s, double sigma2_w) {
    double a = 0.5 * std::log2(1.0 + p / sigma2_s);
    double b = 0.5 * std::log2(kTwoPiE * sigma2_w * (p + sigma2_s) / (p + sigma2_s + sigma2_w));
    double v = std::min(a, b);
    return v > 0.0 ? v : 0.0;
}

double fading_secrecy_term(double p, double g, double l, double sigma2_s, double sigma2_w) {
    double g2 = g * g, l2 = l * l;
    double v = 0.5 * std::log2(1.0 + g2 * p / sigma2_s) -
               0.5 * std::log2(1.0 + g2 * l2 * p / (l2 * sigma2_s + sigma2_w));
    return v > 0.0 ? v : 0.0;
}

double fading_feedback_term(double p, double g, double l, double sigma2_s, double sigma2_w) {
    double g2 = g * g, l2 = l * l;
    double a = 0.5 * std::log2(1.0 + g2 * p / sigma2_s);
    double b = 0.5 * std::log2(kTwoPiE * sigma2_w * (g2 * p + sigma2_s) /
                               (g2 * l2 * p + l2 * sigma2_s + sigma2_w));
    double v = std::min(a, b);
    return v > 0.0 ? v : 0.0;
}

CapacityResult optimize_power(const TermFn &term, const markov::StateChain &chain, long long d,
                              double p0) {
    if (!(p0 >= 0.0)) throw ValidationError("optimize_power: budget must be >= 0");
    const int k = chain.k();
    Weighting wt = weighting_for(chain, d);

    // Per-sd aggregate F_sd(p) = sum_s K^d(sd,s) term(sd,s,p); the budget
    // couples states only through sum_sd pi(sd) p_sd.
    auto F = [&](int sd, double p) {
        double acc = 0.0;
        for (int s = 0; s < k; ++s) {
            double w = wt.w(sd, s);
            if (w > 0.0) acc += w * term(sd, s, p);
        }
        return acc;
    };
    std::vector<double> pmax(k);
    for (int sd = 0; sd < k; ++sd) pmax[sd] = wt.pi[sd] > 0.0 ? p0 / wt.pi[sd] : 0.0;

    bool concave = true;
    for (int sd = 0; sd < k && concave; ++sd)
        if (pmax[sd] > 0.0)
            concave = concave_on([&](double p) { return F(sd, p); }, pmax[sd]);

    const double ptol = 1e-10 * std::max(p0, 1.0);
    std::vector<double> alloc(k, 0.0);
    bool flagged = false;

    auto budget_of = [&](const std::vector<double> &p) {
        double b = 0.0;
        for (int sd = 0; sd < k; ++sd) b += wt.pi[sd] * p[sd];
        return b;
    };

    if (concave) {
        auto alloc_at = [&](double lambda) {
            std::vector<double> p(k, 0.0);
            for (int sd = 0; sd < k; ++sd) {
                if (pmax[sd] <= 0.0) continue;
                p[sd] = ternary_max([&](double v) { return F(sd, v) - lambda * v; }, 0.0,
                                    pmax[sd], ptol);
            }
            return p;
        };
        alloc = alloc_at(0.0);
        if (budget_of(alloc) > p0 * (1.0 + kBudgetRel) + 1e-15) {
            double lo = 0.0, hi = 1.0;
            while (budget_of(alloc_at(hi)) > p0 && hi < 1e12) hi *= 2.0;
            std::vector<double> feasible = alloc_at(hi);
            while (hi - lo > kLambdaTol &&
                   std::abs(budget_of(feasible) - p0) > kBudgetRel * std::max(p0, 1.0)) {
                double mid = 0.5 * (lo + hi);
                auto pm = alloc_at(mid);
                if (budget_of(pm) > p0) {
                    lo = mid;
                } else {
                    hi = mid;
                    feasible = std::move(pm);
                }
            }
            alloc = std::move(feasible);
        }
    } else {
        // Projected coordinate ascent with restarts; flagged so callers can
        // surface the weaker guarantee.
        flagged = true;
        auto objective = [&](const std::vector<double> &p) {
            double acc = 0.0;
            for (int sd = 0; sd < k; ++sd) acc += wt.pi[sd] * F(sd, p[sd]);
            return acc;
        };
        std::vector<std::vector<double>> starts;
        starts.emplace_back(k, 0.0);
        starts.emplace_back(k, p0); // equal split: sum pi * p0 = p0
        for (int sd = 0; sd < k; ++sd) {
            std::vector<double> corner(k, 0.0);
            corner[sd] = pmax[sd];
            starts.push_back(std::move(corner));
        }
        uint64_t rng = 0x6b79d0a3c15f2e41ULL;
        for (int r = 0; r < 4; ++r) {
            std::vector<double> p(k);
            double used = 0.0;
            for (int sd = 0; sd < k; ++sd) {
                rng = mix64(rng);
                double frac = static_cast<double>(rng >> 11) * 0x1.0p-53;
                double room = wt.pi[sd] > 0.0 ? (p0 - used) / wt.pi[sd] : 0.0;
                p[sd] = std::max(0.0, room * frac);
                used += wt.pi[sd] * p[sd];
            }
            starts.push_back(std::move(p));
        }
        double best_val = -1.0;
        std::vector<double> best;
        for (auto &start : starts) {
            std::vector<double> p = start;
            for (int pass = 0; pass < 200; ++pass) {
                double before = objective(p);
                for (int sd = 0; sd < k; ++sd) {
                    if (wt.pi[sd] <= 0.0) continue;
                    double others = budget_of(p) - wt.pi[sd] * p[sd];
                    double cap = std::max(0.0, (p0 - others) / wt.pi[sd]);
                    double bv = -1e300, bp = 0.0;
                    for (int i = 0; i <= 512; ++i) {
                        double v = cap * i / 512.0;
                        double fv = F(sd, v);
                        if (fv > bv) {
                            bv = fv;
                            bp = v;
                        }
                    }
                    double lo = std::max(0.0, bp - cap / 512.0);
                    double hi = std::min(cap, bp + cap / 512.0);
                    p[sd] = ternary_max([&](double v) { return F(sd, v); }, lo, hi, ptol);
                }
                if (objective(p) - before < 1e-12) break;
            }
            double val = objective(p);
            if (val > best_val) {
                best_val = val;
                best = p;
            }
        }
        alloc = std::move(best);
    }

    CapacityResult res;
    res.per_state_terms = Mat(k, k);
    std::vector<double> weighted;
    weighted.reserve(static_cast<size_t>(k) * k);
    for (int sd = 0; sd < k; ++sd)
        for (int s = 0; s < k; ++s) {
            double tv = term(sd, s, alloc[sd]);
            res.per_state_terms(sd, s) = tv;
            weighted.push_back(wt.pi[sd] * wt.w(sd, s) * tv);
        }
    res.value = pairwise_sum(weighted);
    res.power = PowerAllocation{std::move(alloc)};
    res.flagged = flagged;
    if (flagged) res.note = "non-concave objective: projected coordinate ascent fallback";
    return res;
}

namespace {

CapacityResult parametric_capacity(const markov::StateChain &chain, long long d, double p0,
                                   const TermFn &term, const TermFn &raw_min_or_null) {
    CapacityResult res = optimize_power(term, chain, d, p0);
    if (raw_min_or_null) {
        bool clamped = false;
        const auto &p = res.power->p;
        for (int sd = 0; sd < chain.k() && !clamped; ++sd)
            for (int s = 0; s < chain.k() && !clamped; ++s)
                if (raw_min_or_null(sd, s, p[sd]) < 0.0) clamped = true;
        if (clamped) {
            if (!res.note.empty()) res.note += "; ";
            res.note += "feedback min-term floored at 0 for some states";
        }
    }
    return res;
}

} // namespace

CapacityResult gaussian_capacity(const channels::GaussianSpec &spec,
                                 const markov::StateChain &chain, long long d, bool feedback) {
    spec.validate();
    if (static_cast<int>(spec.sigma2.size()) != chain.k())
        throw ValidationError("gaussian_capacity: variance count must match the state count");
    if (!feedback) {
        TermFn t = [&spec](int, int s, double p) {
            return gaussian_secrecy_term(p, spec.sigma2[s], spec.sigma2_w);
        };
        return parametric_capacity(chain, d, spec.p0, t, nullptr);
    }
    TermFn t = [&spec](int, int s, double p) {
        return gaussian_feedback_term(p, spec.sigma2[s], spec.sigma2_w);
    };
    TermFn raw = [&spec](int, int s, double p) {
        double a = 0.5 * std::log2(1.0 + p / spec.sigma2[s]);
        double b = 0.5 * std::log2(kTwoPiE * spec.sigma2_w * (p + spec.sigma2[s]) /
                                   (p + spec.sigma2[s] + spec.sigma2_w));
        return std::min(a, b);
    };
    return parametric_capacity(chain, d, spec.p0, t, raw);
}

CapacityResult fading_capacity(const channels::FadingSpec &spec, const markov::StateChain &chain,
                               long long d, bool feedback) {
    spec.validate();
    if (static_cast<int>(spec.base.sigma2.size()) != chain.k())
        throw ValidationError("fading_capacity: variance count must match the state count");
    if (!feedback) {
        TermFn t = [&spec](int, int s, double p) {
            return fading_secrecy_term(p, spec.g[s], spec.l[s], spec.base.sigma2[s],
                                       spec.base.sigma2_w);
        };
        return parametric_capacity(chain, d, spec.base.p0, t, nullptr);
    }
    TermFn t = [&spec](int, int s, double p) {
        return fading_feedback_term(p, spec.g[s], spec.l[s], spec.base.sigma2[s],
                                    spec.base.sigma2_w);
    };
    TermFn raw = [&spec](int, int s, double p) {
        double g2 = spec.g[s] * spec.g[s], l2 = spec.l[s] * spec.l[s];
        double s2 = spec.base.sigma2[s], w2 = spec.base.sigma2_w;
        double a = 0.5 * std::log2(1.0 + g2 * p / s2);
        double b = 0.5 * std::log2(kTwoPiE * w2 * (g2 * p + s2) / (g2 * l2 * p + l2 * s2 + w2));
        return std::min(a, b);
    };
    return parametric_capacity(chain, d, spec.base.p0, t, raw);
}

// ============================================================================
// Discrete degraded optimization
// ============================================================================

double discrete_mi_y(const channels::DiscreteWiretapChannel &ch, int s,
                     const std::vector<double> &q) {
    const int nx = ch.nx(), ny = ch.ny();
    std::vector<double> out(ny, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) out[y] += q[x] * ch.py(s, x, y);
    double acc = 0.0;
    for (int x = 0; x < nx; ++x) {
        if (q[x] <= 0.0) continue;
        for (int y = 0; y < ny; ++y) {
            double p = ch.py(s, x, y);
            if (p > 0.0) acc += q[x] * p * std::log(p / out[y]);
        }
    }
    return acc / std::log(2.0);
}

double discrete_mi_z(const channels::DiscreteWiretapChannel &ch, int s,
                     const std::vector<double> &q) {
    const int nx = ch.nx(), nz = ch.nz();
    std::vector<double> out(nz, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int z = 0; z < nz; ++z) out[z] += q[x] * ch.pz(s, x, z);
    double acc = 0.0;
    for (int x = 0; x < nx; ++x) {
        if (q[x] <= 0.0) continue;
        for (int z = 0; z < nz; ++z) {
            double p = ch.pz(s, x, z);
            if (p > 0.0) acc += q[x] * p * std::log(p / out[z]);
        }
    }
    return acc / std::log(2.0);
}

double discrete_h_y_given_z(const channels::DiscreteWiretapChannel &ch, int s,
                            const std::vector<double> &q) {
    const int nx = ch.nx(), ny = ch.ny(), nz = ch.nz();
    std::vector<double> joint(static_cast<size_t>(ny) * nz, 0.0);
    for (int x = 0; x < nx; ++x) {
        if (q[x] <= 0.0) continue;
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z)
                joint[static_cast<size_t>(y) * nz + z] += q[x] * ch.p(s, x, y, z);
    }
    double hyz = 0.0, hz = 0.0;
    std::vector<double> pz(nz, 0.0);
    for (int y = 0; y < ny; ++y)
        for (int z = 0; z < nz; ++z) {
            double v = joint[static_cast<size_t>(y) * nz + z];
            pz[z] += v;
            if (v > 0.0) hyz -= v * std::log(v);
        }
    for (int z = 0; z < nz; ++z)
        if (pz[z] > 0.0) hz -= pz[z] * std::log(pz[z]);
    return (hyz - hz) / std::log(2.0);
}

namespace {

struct DiscreteProblem {
    const channels::DiscreteWiretapChannel &ch;
    const Weighting &wt;
    int sd;
    bool feedback;

    double operator()(const std::vector<double> &q) const {
        double acc = 0.0;
        for (int s = 0; s < ch.ns(); ++s) {
            double w = wt.w(sd, s);
            if (w <= 0.0) continue;
            double term = feedback
                              ? std::min(discrete_mi_y(ch, s, q), discrete_h_y_given_z(ch, s, q))
                              : discrete_mi_y(ch, s, q) - discrete_mi_z(ch, s, q);
            acc += w * term;
        }
        return acc;
    }
};

// KL(P(.|x,s) || P_q(.)) pieces of the gradient; the common -1 shift is
// irrelevant for vertex selection.
std::vector<double> secrecy_gradient(const channels::DiscreteWiretapChannel &ch,
                                     const Weighting &wt, int sd,
                                     const std::vector<double> &q) {
    const int nx = ch.nx(), ny = ch.ny(), nz = ch.nz(), ns = ch.ns();
    std::vector<double> grad(nx, 0.0);
    for (int s = 0; s < ns; ++s) {
        double w = wt.w(sd, s);
        if (w <= 0.0) continue;
        std::vector<double> oy(ny, 0.0), oz(nz, 0.0);
        for (int x = 0; x < nx; ++x) {
            for (int y = 0; y < ny; ++y) oy[y] += q[x] * ch.py(s, x, y);
            for (int z = 0; z < nz; ++z) oz[z] += q[x] * ch.pz(s, x, z);
        }
        for (int x = 0; x < nx; ++x) {
            double dy = 0.0, dz = 0.0;
            for (int y = 0; y < ny; ++y) {
                double p = ch.py(s, x, y);
                if (p > 0.0) dy += p * std::log(p / oy[y]);
            }
            for (int z = 0; z < nz; ++z) {
                double p = ch.pz(s, x, z);
                if (p > 0.0) dz += p * std::log(p / oz[z]);
            }
            grad[x] += w * (dy - dz);
        }
    }
    return grad;
}

std::vector<double> solve_state_nofeedback(const channels::DiscreteWiretapChannel &ch,
                                           const Weighting &wt, int sd, int res) {
    DiscreteProblem prob{ch, wt, sd, false};
    const int nx = ch.nx();
    std::vector<double> best(nx, 0.0);
    double best_val = -1e300;
    enumerate_simplex(nx, res, [&](const std::vector<double> &q) {
        double v = prob(q);
        if (v > best_val) {
            best_val = v;
            best = q;
        }
    });
    // Frank-Wolfe refinement from the best grid point; concave objective, so
    // exact line search toward the gradient-max vertex converges.
    std::vector<double> q = best;
    for (int step = 0; step < 200; ++step) {
        auto grad = secrecy_gradient(ch, wt, sd, q);
        int vx = 0;
        for (int x = 1; x < nx; ++x)
            if (grad[x] > grad[vx]) vx = x;
        auto line = [&](double t) {
            std::vector<double> qt(nx);
            for (int x = 0; x < nx; ++x) qt[x] = (1.0 - t) * q[x] + (x == vx ? t : 0.0);
            return prob(qt);
        };
        double t = ternary_max(line, 0.0, 1.0, 1e-12);
        for (int x = 0; x < nx; ++x) q[x] = (1.0 - t) * q[x] + (x == vx ? t : 0.0);
    }
    if (prob(q) > best_val) best = q;
    return best;
}

std::vector<double> solve_state_feedback(const channels::DiscreteWiretapChannel &ch,
                                         const Weighting &wt, int sd, int res) {
    DiscreteProblem prob{ch, wt, sd, true};
    const int nx = ch.nx();
    std::vector<double> best(nx, 0.0);
    double best_val = -1e300;
    enumerate_simplex(nx, res, [&](const std::vector<double> &q) {
        double v = prob(q);
        if (v > best_val) {
            best_val = v;
            best = q;
        }
    });
    // The min of two concave pieces is treated as potentially non-concave:
    // refine along simplex edge directions and keep whatever wins.
    std::vector<double> q = best;
    for (int round = 0; round < 3; ++round) {
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j) {
                if (i == j) continue;
                // q + t (e_i - e_j) stays in the simplex for t in [-q_i, q_j].
                double t_lo = -q[i], t_hi = q[j];
                if (t_hi - t_lo < 1e-12) continue;
                auto line = [&](double t) {
                    std::vector<double> qt = q;
                    qt[i] += t;
                    qt[j] -= t;
                    return prob(qt);
                };
                double bt = 0.0, bv = line(0.0);
                for (int gi = 0; gi <= 64; ++gi) {
                    double t = t_lo + (t_hi - t_lo) * gi / 64.0;
                    double v = line(t);
                    if (v > bv) {
                        bv = v;
                        bt = t;
                    }
                }
                double w = (t_hi - t_lo) / 64.0;
                bt = ternary_max(line, std::max(t_lo, bt - w), std::min(t_hi, bt + w), 1e-12);
                q[i] += bt;
                q[j] -= bt;
            }
    }
    if (prob(q) > best_val) best = q;
    return best;
}

CapacityResult discrete_capacity_impl(const channels::DiscreteWiretapChannel &ch,
                                      const markov::StateChain &chain, long long d,
                                      bool feedback) {
    if (ch.ns() != chain.k())
        throw ValidationError("secrecy_capacity_discrete: channel state count must match chain");
    if (ch.nx() > 6) {
        std::ostringstream os;
        os << "secrecy_capacity_discrete: |X| = " << ch.nx() << " exceeds the cap of 6";
        throw GuardrailError(os.str());
    }
    if (!ch.witness() && !channels::check_degraded(ch))
        throw ValidationError(
            "secrecy_capacity_discrete: channel is not degraded (no P(z|y) witness; see "
            "check_degraded)");

    Weighting wt = weighting_for(chain, d);
    const int k = chain.k(), nx = ch.nx();
    const int res = nx <= 3 ? 200 : 20;

    InputLawFamily fam;
    fam.k = k;
    fam.nx = nx;
    fam.rows.assign(static_cast<size_t>(k) * nx, 0.0);
    for (int sd = 0; sd < k; ++sd) {
        auto q = feedback ? solve_state_feedback(ch, wt, sd, res)
                          : solve_state_nofeedback(ch, wt, sd, res);
        for (int x = 0; x < nx; ++x) fam.rows[static_cast<size_t>(sd) * nx + x] = q[x];
    }

    CapacityResult out;
    out.per_state_terms = Mat(k, k);
    std::vector<double> weighted;
    weighted.reserve(static_cast<size_t>(k) * k);
    for (int sd = 0; sd < k; ++sd) {
        std::vector<double> q(fam.rows.begin() + static_cast<size_t>(sd) * nx,
                              fam.rows.begin() + static_cast<size_t>(sd + 1) * nx);
        for (int s = 0; s < k; ++s) {
            double term = feedback
                              ? std::min(discrete_mi_y(ch, s, q), discrete_h_y_given_z(ch, s, q))
                              : discrete_mi_y(ch, s, q) - discrete_mi_z(ch, s, q);
            out.per_state_terms(sd, s) = term;
            weighted.push_back(wt.pi[sd] * wt.w(sd, s) * term);
        }
    }
    out.value = pairwise_sum(weighted);
    out.input = std::move(fam);
    return out;
}

} // namespace

CapacityResult secrecy_capacity_discrete(const channels::DiscreteWiretapChannel &ch,
                                         const markov::StateChain &chain, long long d) {
    return discrete_capacity_impl(ch, chain, d, false);
}

CapacityResult secrecy_capacity_discrete_feedback(const channels::DiscreteWiretapChannel &ch,
                                                  const markov::StateChain &chain, long long d) {
    return discrete_capacity_impl(ch, chain, d, true);
}

} // namespace fsmwt::capacity
