#include <fsmwt/region.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace fsmwt::region {
namespace {

using infotheory::JointTable;

const std::vector<std::string> kJointAxes = {"U", "V", "Sd", "S", "X", "Y", "Z"};

void require_joint_axes(const JointTable &t) {
    for (const auto &n : kJointAxes)
        if (!t.has_axis(n))
            throw ValidationError("region: joint is missing axis '" + n + "'");
}

std::vector<size_t> strides_of(const std::vector<infotheory::Axis> &axes) {
    std::vector<size_t> st(axes.size(), 1);
    for (int i = static_cast<int>(axes.size()) - 2; i >= 0; --i)
        st[i] = st[i + 1] * axes[i + 1].size;
    return st;
}

// Per full-table axis: its stride in the marginal over `names` (0 if absent).
std::vector<size_t> sub_contrib(const JointTable &t, const std::vector<std::string> &names) {
    auto in = [&](const std::string &n) {
        return std::find(names.begin(), names.end(), n) != names.end();
    };
    std::vector<infotheory::Axis> sub;
    for (const auto &ax : t.axes())
        if (in(ax.name)) sub.push_back(ax);
    auto st = strides_of(sub);
    std::vector<size_t> per(t.axes().size(), 0);
    for (size_t i = 0, o = 0; i < t.axes().size(); ++i)
        if (in(t.axes()[i].name)) per[i] = st[o++];
    return per;
}

// Odometer-tracked indices into a family of sub-marginals of t.
class SubIndexer {
public:
    SubIndexer(const JointTable &t, std::vector<std::vector<std::string>> name_sets) : t_(t) {
        for (auto &ns : name_sets) {
            contribs_.push_back(sub_contrib(t, ns));
            tables_.push_back(t.marginal(ns).probs());
            idx_.push_back(0);
        }
    }

    double value(size_t which) const { return tables_[which][idx_[which]]; }

    void bump(size_t ax) {
        for (size_t i = 0; i < idx_.size(); ++i) idx_[i] += contribs_[i][ax];
    }
    void unwrap(size_t ax) {
        size_t span = static_cast<size_t>(t_.axes()[ax].size);
        for (size_t i = 0; i < idx_.size(); ++i) idx_[i] -= contribs_[i][ax] * span;
    }

    // Walks every cell of t; fn(flat) is called with all sub-indices current.
    void walk(const std::function<void(size_t)> &fn) {
        const auto &axes = t_.axes();
        std::vector<int> digit(axes.size(), 0);
        std::fill(idx_.begin(), idx_.end(), 0);
        for (size_t flat = 0; flat < t_.probs().size(); ++flat) {
            fn(flat);
            for (size_t ax = axes.size(); ax-- > 0;) {
                bump(ax);
                if (++digit[ax] < axes[ax].size) break;
                digit[ax] = 0;
                unwrap(ax);
            }
        }
    }

private:
    const JointTable &t_;
    std::vector<std::vector<size_t>> contribs_;
    std::vector<std::vector<double>> tables_;
    std::vector<size_t> idx_;
};

// Residual of S -> Sd -> (U,V,X): joint(u,v,sd,s,x) vs
// P(u,v,sd,x) P(sd,s) / P(sd).
double chain_state_residual(const JointTable &t) {
    JointTable m = t.marginal({"U", "V", "Sd", "S", "X"});
    SubIndexer ix(m, {{"U", "V", "Sd", "X"}, {"Sd", "S"}, {"Sd"}});
    const auto &p = m.probs();
    double worst = 0.0;
    ix.walk([&](size_t flat) {
        double psd = ix.value(2);
        double recon = psd > 0.0 ? ix.value(0) * ix.value(1) / psd : 0.0;
        double r = std::abs(p[flat] - recon);
        if (r > worst) worst = r;
    });
    return worst;
}

// Residual of (U,V,Sd) -> (X,S) -> (Y,Z): joint vs
// P(u,v,sd,s,x) P(x,s,y,z) / P(x,s).
double chain_channel_residual(const JointTable &t) {
    JointTable m = t.marginal(kJointAxes);
    SubIndexer ix(m, {{"U", "V", "Sd", "S", "X"}, {"S", "X", "Y", "Z"}, {"S", "X"}});
    const auto &p = m.probs();
    double worst = 0.0;
    ix.walk([&](size_t flat) {
        double pxs = ix.value(2);
        double recon = pxs > 0.0 ? ix.value(0) * ix.value(1) / pxs : 0.0;
        double r = std::abs(p[flat] - recon);
        if (r > worst) worst = r;
    });
    return worst;
}

void require_inner_factorization(const JointTable &t) {
    require_joint_axes(t);
    double r1 = chain_state_residual(t);
    if (r1 > 1e-9) {
        std::ostringstream os;
        os << "region: joint violates the Markov chain S -> Sd -> (U,V,X), residual " << r1;
        throw ValidationError(os.str());
    }
    double r2 = chain_channel_residual(t);
    if (r2 > 1e-9) {
        std::ostringstream os;
        os << "region: joint violates the Markov chain (U,V,Sd) -> (X,S) -> (Y,Z), residual "
           << r2;
        throw ValidationError(os.str());
    }
}

void require_channel_consistency(const JointTable &t,
                                 const channels::DiscreteWiretapChannel &ch) {
    require_joint_axes(t);
    JointTable m = t.marginal(kJointAxes);
    if (m.axes()[m.axis_index("S")].size != ch.ns() ||
        m.axes()[m.axis_index("X")].size != ch.nx() ||
        m.axes()[m.axis_index("Y")].size != ch.ny() ||
        m.axes()[m.axis_index("Z")].size != ch.nz())
        throw ValidationError("region: joint axis sizes do not match the channel");
    SubIndexer ix(m, {{"U", "V", "Sd", "S", "X"}});
    const auto &axes = m.axes();
    const int is = m.axis_index("S"), ixx = m.axis_index("X");
    const int iy = m.axis_index("Y"), iz = m.axis_index("Z");
    const auto &p = m.probs();
    double worst = 0.0;
    std::vector<int> digit(axes.size(), 0);
    for (size_t flat = 0; flat < p.size(); ++flat) {
        double recon = ix.value(0) * ch.p(digit[is], digit[ixx], digit[iy], digit[iz]);
        double r = std::abs(p[flat] - recon);
        if (r > worst) worst = r;
        for (size_t ax = axes.size(); ax-- > 0;) {
            ix.bump(ax);
            if (++digit[ax] < axes[ax].size) break;
            digit[ax] = 0;
            ix.unwrap(ax);
        }
    }
    if (worst > 1e-9) {
        std::ostringstream os;
        os << "region: joint is inconsistent with the channel law, residual " << worst;
        throw ValidationError(os.str());
    }
}

RatePair clamp_caps(double r, double re) {
    RatePair out;
    out.r = std::max(0.0, r);
    out.re = std::min(std::max(0.0, re), out.r);
    return out;
}

double r_cap_of(const JointTable &t) {
    return infotheory::cond_mutual_info(t, {"V"}, {"Y"}, {"S", "Sd"});
}

double inner_re_raw(const JointTable &t) {
    double d = infotheory::cond_mutual_info(t, {"V"}, {"Y"}, {"U", "S", "Sd"}) -
               infotheory::cond_mutual_info(t, {"V"}, {"Z"}, {"U", "S", "Sd"});
    return d > 0.0 ? d : 0.0;
}

} // namespace

RatePair eval_inner(const JointTable &joint) {
    require_inner_factorization(joint);
    return clamp_caps(r_cap_of(joint), inner_re_raw(joint));
}

RatePair eval_outer(const JointTable &joint, const channels::DiscreteWiretapChannel &ch) {
    require_channel_consistency(joint, ch);
    return clamp_caps(r_cap_of(joint), inner_re_raw(joint));
}

RatePair eval_inner_feedback(const JointTable &joint) {
    require_inner_factorization(joint);
    double re = inner_re_raw(joint) +
                infotheory::cond_entropy(joint, {"Y"}, {"V", "Z", "S", "Sd"});
    return clamp_caps(r_cap_of(joint), re);
}

RatePair eval_outer_feedback(const JointTable &joint,
                             const channels::DiscreteWiretapChannel &ch) {
    require_channel_consistency(joint, ch);
    double re = infotheory::cond_entropy(joint, {"Y"}, {"Z", "U", "S", "Sd"});
    return clamp_caps(r_cap_of(joint), re);
}

// ============================================================================
// Degraded boundary tracing
// ============================================================================

namespace {

struct TraceContext {
    const channels::DiscreteWiretapChannel &ch;
    std::vector<double> pi;
    Mat w; // K^d rows
    bool feedback;

    // Rate aggregate per sd.
    double rate_sd(int sd, const std::vector<double> &q) const {
        double acc = 0.0;
        for (int s = 0; s < ch.ns(); ++s)
            if (w(sd, s) > 0.0) acc += w(sd, s) * capacity::discrete_mi_y(ch, s, q);
        return acc;
    }
    // Equivocation-bound aggregate per sd.
    double equiv_sd(int sd, const std::vector<double> &q) const {
        double acc = 0.0;
        for (int s = 0; s < ch.ns(); ++s) {
            double ws = w(sd, s);
            if (ws <= 0.0) continue;
            double term =
                feedback
                    ? std::min(capacity::discrete_mi_y(ch, s, q),
                               capacity::discrete_h_y_given_z(ch, s, q))
                    : capacity::discrete_mi_y(ch, s, q) - capacity::discrete_mi_z(ch, s, q);
            acc += ws * term;
        }
        return acc;
    }
};

// Concave simplex maximization: grid scan plus edge-direction refinement.
std::vector<double> solve_simplex(int nx, const std::function<double(const std::vector<double> &)> &obj) {
    const int res = nx <= 3 ? 100 : 20;
    std::vector<double> best(nx, 0.0);
    double best_val = -1e300;
    std::vector<int> c(nx, 0);
    std::vector<double> q(nx);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == nx - 1) {
            c[pos] = left;
            for (int i = 0; i < nx; ++i) q[i] = static_cast<double>(c[i]) / res;
            double v = obj(q);
            if (v > best_val) {
                best_val = v;
                best = q;
            }
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, res);

    std::vector<double> cur = best;
    for (int round = 0; round < 3; ++round)
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j) {
                if (i == j) continue;
                double t_lo = -cur[i], t_hi = cur[j];
                if (t_hi - t_lo < 1e-12) continue;
                auto line = [&](double t) {
                    std::vector<double> qt = cur;
                    qt[i] += t;
                    qt[j] -= t;
                    return obj(qt);
                };
                double a = t_lo, b = t_hi;
                while (b - a > 1e-12) {
                    double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
                    if (line(m1) < line(m2))
                        a = m1;
                    else
                        b = m2;
                }
                double t = 0.5 * (a + b);
                if (line(t) > line(0.0)) {
                    cur[i] += t;
                    cur[j] -= t;
                }
            }
    if (obj(cur) > best_val) return cur;
    return best;
}

struct TraceSolve {
    std::vector<std::vector<double>> q; // per sd
    double rate = 0.0;
    double equiv = 0.0;
};

// Per-sd maximize equiv + mu * rate; aggregates with pi afterwards.
TraceSolve solve_at(const TraceContext &cx, double mu) {
    const int k = static_cast<int>(cx.pi.size());
    TraceSolve out;
    out.q.resize(k);
    std::vector<double> rates, equivs;
    for (int sd = 0; sd < k; ++sd) {
        auto obj = [&](const std::vector<double> &qq) {
            return cx.equiv_sd(sd, qq) + mu * cx.rate_sd(sd, qq);
        };
        out.q[sd] = solve_simplex(cx.ch.nx(), obj);
        rates.push_back(cx.pi[sd] * cx.rate_sd(sd, out.q[sd]));
        equivs.push_back(cx.pi[sd] * cx.equiv_sd(sd, out.q[sd]));
    }
    out.rate = pairwise_sum(rates);
    out.equiv = pairwise_sum(equivs);
    return out;
}

} // namespace

RegionBoundary trace_degraded_region(const channels::DiscreteWiretapChannel &ch,
                                     const markov::StateChain &chain, long long d, bool feedback,
                                     int n_points) {
    if (n_points < 2) throw ValidationError("trace_degraded_region: need at least 2 points");
    if (ch.ns() != chain.k())
        throw ValidationError("trace_degraded_region: channel state count must match chain");
    if (ch.nx() > 6) {
        std::ostringstream os;
        os << "trace_degraded_region: |X| = " << ch.nx() << " exceeds the cap of 6";
        throw GuardrailError(os.str());
    }
    if (!ch.witness() && !channels::check_degraded(ch))
        throw ValidationError(
            "trace_degraded_region: channel is not degraded (no P(z|y) witness)");

    TraceContext cx{ch,
                    markov::stationary(chain).pi,
                    d < 0 ? markov::power_limit(chain) : markov::power(chain, d),
                    feedback};
    const int k = chain.k();

    // Rmax: maximize the rate aggregate alone.
    double rmax = 0.0;
    {
        std::vector<double> parts;
        for (int sd = 0; sd < k; ++sd) {
            auto obj = [&](const std::vector<double> &qq) { return cx.rate_sd(sd, qq); };
            auto q = solve_simplex(ch.nx(), obj);
            parts.push_back(cx.pi[sd] * cx.rate_sd(sd, q));
        }
        rmax = pairwise_sum(parts);
    }

    // Unconstrained equivocation max; its rate constraint is always slack, so
    // it is the exact region corner.
    TraceSolve corner = solve_at(cx, 0.0);

    std::vector<double> targets;
    targets.reserve(n_points + 1);
    for (int i = 0; i < n_points; ++i)
        targets.push_back(rmax * static_cast<double>(i) / (n_points - 1));
    targets.push_back(std::min(corner.equiv, rmax));
    std::sort(targets.begin(), targets.end());

    RegionBoundary out;
    out.kind = feedback ? "inner-feedback" : "inner";
    out.points.reserve(targets.size());
    for (double target : targets) {
        double m;
        if (corner.rate >= target - 1e-12) {
            m = corner.equiv;
        } else {
            // Smallest mu whose solution meets the rate target; equivocation
            // bound taken from the feasible side.
            double lo = 0.0, hi = 1.0;
            TraceSolve sol = solve_at(cx, hi);
            int guard = 0;
            while (sol.rate < target - 1e-9 && guard++ < 60) {
                hi *= 2.0;
                sol = solve_at(cx, hi);
            }
            TraceSolve feasible = sol;
            int iters = 0;
            while (hi - lo > 1e-10 * (1.0 + hi) && iters++ < 200) {
                double mid = 0.5 * (lo + hi);
                TraceSolve sm = solve_at(cx, mid);
                if (sm.rate >= target - 1e-9) {
                    hi = mid;
                    feasible = std::move(sm);
                } else {
                    lo = mid;
                }
            }
            m = feasible.equiv;
        }
        RatePair pt;
        pt.r = target;
        pt.re = std::max(0.0, std::min(target, m));
        out.points.push_back(pt);
    }
    return out;
}

} // namespace fsmwt::region
