#include <fsmwt/infotheory.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fsmwt::infotheory {
namespace {

const double kLn2 = std::log(2.0);

// Flat-index strides, last axis fastest.
std::vector<size_t> strides_of(const std::vector<Axis> &axes) {
    std::vector<size_t> st(axes.size(), 1);
    for (int i = static_cast<int>(axes.size()) - 2; i >= 0; --i)
        st[i] = st[i + 1] * axes[i + 1].size;
    return st;
}

size_t cells_of(const std::vector<Axis> &axes) {
    size_t n = 1;
    for (const auto &a : axes) n *= static_cast<size_t>(a.size);
    return n;
}

// Entropy in bits of a plain probability vector; 0 log 0 = 0.
double entropy_of(const std::vector<double> &p) {
    std::vector<double> contrib;
    contrib.reserve(p.size());
    for (double v : p) contrib.push_back(v > 0.0 ? -v * std::log(v) : 0.0);
    return pairwise_sum(contrib) / kLn2;
}

} // namespace

JointTable::JointTable(std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
    if (axes_.empty()) throw ValidationError("JointTable: needs at least one axis");
    size_t want = 1;
    for (const auto &a : axes_) {
        if (a.size < 1) throw ValidationError("JointTable: axis '" + a.name + "' has size < 1");
        if (a.name.empty()) throw ValidationError("JointTable: axis with empty name");
        if (want > kMaxCells / static_cast<size_t>(a.size)) {
            std::ostringstream os;
            os << "JointTable: table would exceed " << kMaxCells << " cells";
            throw GuardrailError(os.str());
        }
        want *= static_cast<size_t>(a.size);
    }
    for (size_t i = 0; i < axes_.size(); ++i)
        for (size_t j = i + 1; j < axes_.size(); ++j)
            if (axes_[i].name == axes_[j].name)
                throw ValidationError("JointTable: duplicate axis '" + axes_[i].name + "'");
    if (probs_.size() != want) {
        std::ostringstream os;
        os << "JointTable: " << probs_.size() << " entries for " << want << " cells";
        throw ValidationError(os.str());
    }
    for (double v : probs_)
        if (!(v >= 0.0)) throw ValidationError("JointTable: negative entry");
    double mass = pairwise_sum(probs_);
    if (std::abs(mass - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "JointTable: total mass " << mass << ", expected 1";
        throw ValidationError(os.str());
    }
}

int JointTable::axis_index(std::string_view name) const {
    for (size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name == name) return static_cast<int>(i);
    throw ValidationError("JointTable: unknown axis '" + std::string(name) + "'");
}

bool JointTable::has_axis(std::string_view name) const {
    for (const auto &a : axes_)
        if (a.name == name) return true;
    return false;
}

JointTable JointTable::marginal(const std::vector<std::string> &keep) const {
    if (keep.empty()) throw ValidationError("marginal: empty axis set");
    std::vector<char> mask(axes_.size(), 0);
    for (const auto &n : keep) {
        int i = axis_index(n);
        if (mask[i]) throw ValidationError("marginal: duplicate axis '" + n + "'");
        mask[i] = 1;
    }
    std::vector<Axis> out_axes;
    for (size_t i = 0; i < axes_.size(); ++i)
        if (mask[i]) out_axes.push_back(axes_[i]);
    auto out_strides = strides_of(out_axes);
    // Per input axis: its stride in the output (0 when marginalized out).
    std::vector<size_t> contrib(axes_.size(), 0);
    for (size_t i = 0, o = 0; i < axes_.size(); ++i)
        if (mask[i]) contrib[i] = out_strides[o++];

    std::vector<double> out(cells_of(out_axes), 0.0);
    const size_t n_ax = axes_.size();
    std::vector<int> digit(n_ax, 0);
    size_t out_idx = 0;
    for (size_t flat = 0; flat < probs_.size(); ++flat) {
        out[out_idx] += probs_[flat];
        // Odometer increment, last axis fastest.
        for (size_t i = n_ax; i-- > 0;) {
            if (++digit[i] < axes_[i].size) {
                out_idx += contrib[i];
                break;
            }
            digit[i] = 0;
            out_idx -= contrib[i] * static_cast<size_t>(axes_[i].size - 1);
        }
    }
    return JointTable(std::move(out_axes), std::move(out));
}

void AuxiliaryScheme::validate() const {
    if (nu < 1 || nv < 1 || k < 1 || nx < 1)
        throw ValidationError("AuxiliaryScheme: all cardinalities must be >= 1");
    auto check_rows = [](const std::vector<double> &t, size_t rows, int cols, const char *what) {
        if (t.size() != rows * static_cast<size_t>(cols))
            throw ValidationError(std::string("AuxiliaryScheme: ") + what + " has wrong size");
        for (size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            for (int c = 0; c < cols; ++c) {
                double v = t[r * cols + c];
                if (!(v >= 0.0))
                    throw ValidationError(std::string("AuxiliaryScheme: ") + what +
                                          " has a negative entry");
                s += v;
            }
            if (std::abs(s - 1.0) > 1e-12)
                throw ValidationError(std::string("AuxiliaryScheme: ") + what +
                                      " rows must be stochastic");
        }
    };
    check_rows(pu, static_cast<size_t>(k), nu, "pu");
    check_rows(pv, static_cast<size_t>(nu) * k, nv, "pv");
    check_rows(px, static_cast<size_t>(nu) * nv * k, nx, "px");
}

AuxiliaryScheme AuxiliaryScheme::deterministic(int k, int nx,
                                               const std::vector<double> &px_given_sd) {
    AuxiliaryScheme aux;
    aux.nu = 1;
    aux.nv = 1;
    aux.k = k;
    aux.nx = nx;
    aux.pu.assign(static_cast<size_t>(k), 1.0);
    aux.pv.assign(static_cast<size_t>(k), 1.0);
    aux.px = px_given_sd;
    aux.validate();
    return aux;
}

JointTable assemble_joint(const markov::StateChain &chain, long long d, const AuxiliaryScheme &aux,
                          const channels::DiscreteWiretapChannel &ch) {
    aux.validate();
    const int k = chain.k();
    if (aux.k != k) throw ValidationError("assemble_joint: axis Sd size mismatch with chain");
    if (ch.ns() != k) throw ValidationError("assemble_joint: axis S size mismatch with channel");
    if (aux.nx != ch.nx()) throw ValidationError("assemble_joint: axis X size mismatch");
    const int nu = aux.nu, nv = aux.nv, nx = ch.nx(), ny = ch.ny(), nz = ch.nz();

    double est = static_cast<double>(nu) * nv * k * k * nx * ny * nz;
    if (est > static_cast<double>(kMaxCells)) {
        std::ostringstream os;
        os << "assemble_joint: " << est << " cells exceeds the " << kMaxCells << " cell cap";
        throw GuardrailError(os.str());
    }

    Mat pd = (d < 0 ? markov::delayed_joint_limit(chain) : markov::delayed_joint(chain, d)).table;
    std::vector<Axis> axes = {{"U", nu}, {"V", nv}, {"Sd", k}, {"S", k},
                              {"X", nx}, {"Y", ny}, {"Z", nz}};
    std::vector<double> probs(cells_of(axes));
    size_t idx = 0;
    for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nv; ++v)
            for (int sd = 0; sd < k; ++sd)
                for (int s = 0; s < k; ++s) {
                    double head = pd(sd, s) * aux.p_u(sd, u) * aux.p_v(u, sd, v);
                    for (int x = 0; x < nx; ++x) {
                        double hx = head * aux.p_x(u, v, sd, x);
                        for (int y = 0; y < ny; ++y)
                            for (int z = 0; z < nz; ++z) probs[idx++] = hx * ch.p(s, x, y, z);
                    }
                }
    return JointTable(std::move(axes), std::move(probs));
}

double entropy(const JointTable &t, const std::vector<std::string> &axes) {
    if (axes.empty()) throw ValidationError("entropy: empty axis set");
    return entropy_of(t.marginal(axes).probs());
}

double cond_entropy(const JointTable &t, const std::vector<std::string> &a,
                    const std::vector<std::string> &c) {
    if (a.empty()) throw ValidationError("cond_entropy: empty target set");
    if (c.empty()) return entropy(t, a);
    std::vector<std::string> ac = a;
    ac.insert(ac.end(), c.begin(), c.end());
    return entropy(t, ac) - entropy(t, c);
}

double cond_mutual_info(const JointTable &t, const std::vector<std::string> &a,
                        const std::vector<std::string> &b, const std::vector<std::string> &c) {
    for (const auto &n : a)
        for (const auto &m : b)
            if (n == m) throw ValidationError("cond_mutual_info: axis '" + n + "' in both A and B");
    for (const auto &n : c) {
        for (const auto &m : a)
            if (n == m) throw ValidationError("cond_mutual_info: axis '" + n + "' in both A and C");
        for (const auto &m : b)
            if (n == m) throw ValidationError("cond_mutual_info: axis '" + n + "' in both B and C");
    }
    if (a.empty() || b.empty()) return 0.0;

    std::vector<std::string> abc = a;
    abc.insert(abc.end(), b.begin(), b.end());
    abc.insert(abc.end(), c.begin(), c.end());
    JointTable m_abc = t.marginal(abc);

    const auto &axes = m_abc.axes();
    // Classify each axis of the (A,B,C) marginal.
    auto in = [](const std::vector<std::string> &set, const std::string &n) {
        return std::find(set.begin(), set.end(), n) != set.end();
    };
    std::vector<std::string> ac_names, bc_names, c_names;
    for (const auto &ax : axes) {
        if (in(a, ax.name) || in(c, ax.name)) ac_names.push_back(ax.name);
        if (in(b, ax.name) || in(c, ax.name)) bc_names.push_back(ax.name);
        if (in(c, ax.name)) c_names.push_back(ax.name);
    }
    JointTable m_ac = m_abc.marginal(ac_names);
    JointTable m_bc = m_abc.marginal(bc_names);
    const bool has_c = !c_names.empty();
    std::vector<double> pc;
    if (has_c) pc = m_abc.marginal(c_names).probs();

    // Strides of each sub-marginal index as a function of the full digits.
    auto sub_strides = [&](const std::vector<std::string> &names) {
        std::vector<Axis> sub;
        for (const auto &ax : axes)
            if (in(names, ax.name)) sub.push_back(ax);
        auto st = strides_of(sub);
        std::vector<size_t> per_axis(axes.size(), 0);
        for (size_t i = 0, o = 0; i < axes.size(); ++i)
            if (in(names, axes[i].name)) per_axis[i] = st[o++];
        return per_axis;
    };
    auto st_ac = sub_strides(ac_names);
    auto st_bc = sub_strides(bc_names);
    auto st_c = sub_strides(c_names);

    const auto &p = m_abc.probs();
    const auto &pac = m_ac.probs();
    const auto &pbc = m_bc.probs();
    std::vector<double> contrib;
    contrib.reserve(p.size());
    std::vector<int> digit(axes.size(), 0);
    size_t i_ac = 0, i_bc = 0, i_c = 0;
    for (size_t flat = 0; flat < p.size(); ++flat) {
        double v = p[flat];
        if (v > 0.0) {
            double num = v * (has_c ? pc[i_c] : 1.0);
            double den = pac[i_ac] * pbc[i_bc];
            contrib.push_back(v * std::log(num / den));
        } else {
            contrib.push_back(0.0);
        }
        for (size_t ax = axes.size(); ax-- > 0;) {
            if (++digit[ax] < axes[ax].size) {
                i_ac += st_ac[ax];
                i_bc += st_bc[ax];
                i_c += st_c[ax];
                break;
            }
            digit[ax] = 0;
            i_ac -= st_ac[ax] * static_cast<size_t>(axes[ax].size - 1);
            i_bc -= st_bc[ax] * static_cast<size_t>(axes[ax].size - 1);
            i_c -= st_c[ax] * static_cast<size_t>(axes[ax].size - 1);
        }
    }
    return pairwise_sum(contrib) / kLn2;
}

IdentityCheck degraded_identity_check(const JointTable &t) {
    for (const char *n : {"X", "Y", "Z", "S", "Sd"})
        if (!t.has_axis(n))
            throw ValidationError(std::string("degraded_identity_check: missing axis '") + n +
                                  "'");
    JointTable m = t.marginal({"X", "Y", "Z", "S", "Sd"});

    IdentityCheck out;
    out.lhs = cond_entropy(m, {"Y"}, {"S", "Sd", "Z"});
    out.rhs = cond_mutual_info(m, {"X"}, {"Y"}, {"S", "Sd"}) -
              cond_mutual_info(m, {"X"}, {"Z"}, {"S", "Sd"}) +
              cond_entropy(m, {"Y"}, {"X", "Z", "S", "Sd"});

    // Degradedness: Z independent of (X,S,Sd) given Y. Reconstruct with
    // q(z|y) from the (Y,Z) marginal and measure the worst cell error.
    JointTable m_yz = m.marginal({"Y", "Z"});
    JointTable m_y = m.marginal({"Y"});
    JointTable m_xssd_y = m.marginal({"X", "Y", "S", "Sd"});
    const int iy = m.axis_index("Y"), iz = m.axis_index("Z");
    const auto &axes = m.axes();
    auto st = strides_of(axes);
    const int ny = axes[iy].size, nz = axes[iz].size;

    // Index of the (X,Y,S,Sd) marginal cell for given full digits.
    std::vector<Axis> sub_axes;
    for (const auto &ax : axes)
        if (ax.name != "Z") sub_axes.push_back(ax);
    auto sub_st = strides_of(sub_axes);
    std::vector<size_t> contrib_sub(axes.size(), 0);
    for (size_t i = 0, o = 0; i < axes.size(); ++i)
        if (axes[i].name != "Z") contrib_sub[i] = sub_st[o++];

    const auto &p = m.probs();
    const auto &pyz = m_yz.probs();
    const auto &py = m_y.probs();
    const auto &psub = m_xssd_y.probs();
    double worst = 0.0;
    std::vector<int> digit(axes.size(), 0);
    size_t i_sub = 0;
    for (size_t flat = 0; flat < p.size(); ++flat) {
        int y = digit[iy], z = digit[iz];
        double qy = py[y];
        double q_z_given_y = qy > 0.0 ? pyz[static_cast<size_t>(y) * nz + z] / qy : 0.0;
        double r = std::abs(p[flat] - psub[i_sub] * q_z_given_y);
        if (r > worst) worst = r;
        for (size_t ax = axes.size(); ax-- > 0;) {
            if (++digit[ax] < axes[ax].size) {
                i_sub += contrib_sub[ax];
                break;
            }
            digit[ax] = 0;
            i_sub -= contrib_sub[ax] * static_cast<size_t>(axes[ax].size - 1);
        }
    }
    (void)ny;
    out.factor_residual = worst;
    out.degraded = worst <= 1e-9;
    return out;
}

CsiszarResidual csiszar_sum_check(const JointTable &t, int n) {
    if (n < 2 || n > 3) {
        std::ostringstream os;
        os << "csiszar_sum_check: n = " << n << " unsupported; n in {2,3} keeps the table at or "
           << "below |W||S|(|Y||Z|)^3 cells";
        throw GuardrailError(os.str());
    }
    auto yname = [](int i) { return "Y" + std::to_string(i + 1); };
    auto zname = [](int i) { return "Z" + std::to_string(i + 1); };
    if (!t.has_axis("W")) throw ValidationError("csiszar_sum_check: missing axis 'W'");
    if (!t.has_axis("S")) throw ValidationError("csiszar_sum_check: missing axis 'S'");
    for (int i = 0; i < n; ++i) {
        if (!t.has_axis(yname(i)))
            throw ValidationError("csiszar_sum_check: missing axis '" + yname(i) + "'");
        if (!t.has_axis(zname(i)))
            throw ValidationError("csiszar_sum_check: missing axis '" + zname(i) + "'");
    }

    auto run = [&](bool with_w) {
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> z_hi; // Z_{i+2}..Z_n in 1-based speak
            for (int j = i + 1; j < n; ++j) z_hi.push_back(zname(j));
            std::vector<std::string> y_lo; // Y_1..Y_{i-1}
            for (int j = 0; j < i; ++j) y_lo.push_back(yname(j));

            std::vector<std::string> cond_l = y_lo;
            cond_l.push_back("S");
            if (with_w) cond_l.push_back("W");
            lhs += cond_mutual_info(t, {yname(i)}, z_hi, cond_l);

            std::vector<std::string> cond_r = z_hi;
            cond_r.push_back("S");
            if (with_w) cond_r.push_back("W");
            rhs += cond_mutual_info(t, {zname(i)}, y_lo, cond_r);
        }
        return std::abs(lhs - rhs);
    };
    CsiszarResidual r;
    r.plain = run(false);
    r.with_w = run(true);
    return r;
}

} // namespace fsmwt::infotheory
