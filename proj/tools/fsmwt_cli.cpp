// Command-line front end: one config file per experiment, --set overrides,
// capacity / region / codec / sweep dispatch, CSV + JSON + plot artifacts.
#include <fsmwt/capacity.hpp>
#include <fsmwt/channels.hpp>
#include <fsmwt/codec.hpp>
#include <fsmwt/config.hpp>
#include <fsmwt/io.hpp>
#include <fsmwt/markov.hpp>
#include <fsmwt/region.hpp>
#include <fsmwt/simulate.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using fsmwt::GuardrailError;
using fsmwt::ValidationError;
namespace cfgns = fsmwt::config;
namespace io = fsmwt::io;

fsmwt::markov::StateChain build_chain(const cfgns::Config &cfg) {
    const bool has_matrix = cfg.has("chain.matrix");
    const bool has_uc = cfg.has("chain.u");
    const bool has_gb = cfg.has("chain.g") || cfg.has("chain.b");
    if (has_matrix + has_uc + has_gb != 1)
        throw ValidationError(
            "chain spec must be exactly one of chain.matrix, chain.u/chain.c, chain.g/chain.b");
    if (has_matrix) {
        auto vals = cfg.get_double_list("chain.matrix");
        int k = static_cast<int>(cfg.get_int("chain.k"));
        if (k < 1 || vals.size() != static_cast<size_t>(k) * k)
            throw ValidationError("chain.matrix must hold chain.k^2 entries");
        fsmwt::Mat K(k, k);
        K.a = std::move(vals);
        return fsmwt::markov::StateChain(std::move(K));
    }
    if (has_uc)
        return fsmwt::markov::two_state(cfg.get_double("chain.u"), cfg.get_double("chain.c"));
    auto p = fsmwt::markov::TwoStateParams{cfg.get_double("chain.b"), cfg.get_double("chain.g")};
    return fsmwt::markov::two_state(p.u(), p.c());
}

enum class ChannelKind { Discrete, Gaussian, Fading };

ChannelKind channel_kind(const cfgns::Config &cfg) {
    const bool file = cfg.has("channel.file");
    const bool gauss = cfg.has("gaussian.sigma2");
    const bool fade = cfg.has("fading.sigma2");
    if (file + gauss + fade != 1)
        throw ValidationError(
            "channel spec must be exactly one of channel.file, gaussian.*, fading.*");
    return file ? ChannelKind::Discrete : gauss ? ChannelKind::Gaussian : ChannelKind::Fading;
}

fsmwt::channels::GaussianSpec gaussian_spec(const cfgns::Config &cfg, const std::string &prefix) {
    fsmwt::channels::GaussianSpec spec;
    spec.sigma2 = cfg.get_double_list(prefix + ".sigma2");
    spec.sigma2_w = cfg.get_double(prefix + ".sigma2_w");
    spec.p0 = cfg.get_double(prefix + ".p0");
    spec.validate();
    return spec;
}

fsmwt::channels::FadingSpec fading_spec(const cfgns::Config &cfg) {
    fsmwt::channels::FadingSpec spec;
    spec.base = gaussian_spec(cfg, "fading");
    spec.g = cfg.get_double_list("fading.g");
    spec.l = cfg.get_double_list("fading.l");
    spec.validate();
    return spec;
}

io::json params_json(const cfgns::Config &cfg) {
    io::json j;
    for (const auto &[k, v] : cfg.entries()) j[k] = v;
    return j;
}

std::string params_hash(const cfgns::Config &cfg) {
    std::string blob;
    for (const auto &[k, v] : cfg.entries()) {
        blob += k;
        blob += '=';
        blob += v;
        blob += '\n';
    }
    return io::hash_hex(io::fnv1a(blob));
}

long long get_delay(const cfgns::Config &cfg) {
    long long d = cfg.get_int("delay.d");
    if (d < 0) throw ValidationError("delay.d must be nonnegative");
    return d;
}

void maybe_write_json(const cfgns::Config &cfg, const io::json &j) {
    if (cfg.has("output.json")) io::write_json_file(cfg.get_string("output.json"), j);
}

int cmd_capacity(const cfgns::Config &cfg, bool feedback) {
    auto chain = build_chain(cfg);
    long long d = get_delay(cfg);
    fsmwt::capacity::CapacityResult res;
    switch (channel_kind(cfg)) {
    case ChannelKind::Gaussian:
        res = fsmwt::capacity::gaussian_capacity(gaussian_spec(cfg, "gaussian"), chain, d,
                                                 feedback);
        break;
    case ChannelKind::Fading:
        res = fsmwt::capacity::fading_capacity(fading_spec(cfg), chain, d, feedback);
        break;
    case ChannelKind::Discrete: {
        auto ch = io::channel_from_json_file(cfg.get_string("channel.file"));
        res = feedback ? fsmwt::capacity::secrecy_capacity_discrete_feedback(ch, chain, d)
                       : fsmwt::capacity::secrecy_capacity_discrete(ch, chain, d);
        break;
    }
    }
    maybe_write_json(cfg, io::capacity_result_to_json(res, params_json(cfg)));
    if (cfg.has("output.csv")) {
        std::string csv = "mode,d,value,flagged,params\n";
        csv += feedback ? "capacity-feedback" : "capacity";
        csv += ',' + std::to_string(d) + ',' + io::format_double(res.value) + ',';
        csv += res.flagged ? '1' : '0';
        csv += ',' + params_hash(cfg) + '\n';
        io::write_text_file(cfg.get_string("output.csv"), csv);
    }
    std::printf("%.6f\n", res.value);
    return res.flagged ? 3 : 0;
}

int cmd_region(const cfgns::Config &cfg) {
    if (channel_kind(cfg) != ChannelKind::Discrete)
        throw ValidationError("region mode needs a discrete channel (channel.file)");
    auto chain = build_chain(cfg);
    auto ch = io::channel_from_json_file(cfg.get_string("channel.file"));
    bool feedback = cfg.get_bool("region.feedback", false);
    int points = static_cast<int>(cfg.get_int("region.points", 64));
    auto boundary =
        fsmwt::region::trace_degraded_region(ch, chain, get_delay(cfg), feedback, points);

    std::string hash = params_hash(cfg);
    if (cfg.has("output.csv"))
        io::write_text_file(cfg.get_string("output.csv"), io::boundary_to_csv(boundary, hash));
    if (cfg.has("output.plot") && cfg.has("output.csv")) {
        const std::string csv = cfg.get_string("output.csv");
        const std::string png = cfg.get_string("output.png", csv + ".png");
        std::string script = "#!/usr/bin/env gnuplot\n";
        script += "# capacity-equivocation boundary\n";
        script += "set datafile separator ','\n";
        script += "set terminal pngcairo size 720,540\n";
        script += "set output '" + png + "'\n";
        script += "set xlabel 'R [bits/use]'\nset ylabel 'Re [bits/use]'\n";
        script += "plot '" + csv + "' skip 1 using 1:2 with linespoints title 'boundary'\n";
        io::write_text_file(cfg.get_string("output.plot"), script);
    }
    double corner = 0.0;
    for (const auto &pt : boundary.points) corner = std::max(corner, pt.re);
    std::printf("%.6f\n", corner);
    return 0;
}

int cmd_codec(const cfgns::Config &cfg, int threads) {
    if (channel_kind(cfg) != ChannelKind::Discrete)
        throw ValidationError("codec mode needs a discrete channel (channel.file)");
    auto chain = build_chain(cfg);
    auto ch = io::channel_from_json_file(cfg.get_string("channel.file"));
    const int k = chain.k();

    fsmwt::codec::ExperimentSpec spec;
    spec.d = get_delay(cfg);
    spec.N = static_cast<int>(cfg.get_int("codec.N"));
    spec.blocks = cfg.get_int("codec.blocks", 100);
    spec.seed = cfg.get_seed("seed", 1);
    spec.feedback = cfg.get_bool("codec.feedback", false);
    spec.threads = threads;
    auto secret = cfg.get_double_list("codec.secret_rates");
    auto noise = cfg.get_double_list("codec.noise_rates");
    auto bin = cfg.get_double_list("codec.bin_rates");
    if (secret.size() != static_cast<size_t>(k) || noise.size() != secret.size() ||
        bin.size() != secret.size())
        throw ValidationError("codec rate lists must each hold one entry per state");
    for (int c = 0; c < k; ++c) spec.rates.push_back({secret[c], noise[c], bin[c]});
    if (spec.feedback) spec.key_rate = cfg.get_double_list("codec.key_rates");

    fsmwt::capacity::InputLawFamily input;
    input.k = k;
    input.nx = ch.nx();
    if (cfg.has("codec.input")) {
        input.rows = cfg.get_double_list("codec.input");
        if (input.rows.size() != static_cast<size_t>(k) * ch.nx())
            throw ValidationError("codec.input must hold k*nx entries");
    } else {
        input.rows.assign(static_cast<size_t>(k) * ch.nx(), 1.0 / ch.nx());
    }

    auto report = fsmwt::codec::run_experiment(ch, chain, input, spec);
    auto j = io::run_report_to_json(report);
    j["params"] = params_json(cfg);
    maybe_write_json(cfg, j);
    std::printf("%.6f\n", report.equivocation);
    return 0;
}

int cmd_sweep(const cfgns::Config &cfg, int threads) {
    auto base = gaussian_spec(cfg, "gaussian");
    double c = cfg.get_double("chain.c");
    auto ds = cfg.get_int_list("sweep.d_list");
    auto us = cfg.get_double_list("sweep.u_list");
    auto ws = cfg.has("sweep.sigma2_w_list") ? cfg.get_double_list("sweep.sigma2_w_list")
                                             : std::vector<double>{base.sigma2_w};
    auto fbs = cfg.has("sweep.feedback_list") ? cfg.get_int_list("sweep.feedback_list")
                                              : std::vector<long long>{0};
    if (ds.empty() || us.empty())
        throw ValidationError("sweep needs nonempty sweep.d_list and sweep.u_list");
    for (long long d : ds)
        if (d < -1) throw ValidationError("sweep.d_list entries must be >= -1 (-1 = limit)");

    std::vector<fsmwt::simulate::SweepPoint> grid;
    for (long long d : ds)
        for (double u : us)
            for (double w : ws)
                for (long long f : fbs) grid.push_back({d, u, w, f != 0});
    auto records = fsmwt::simulate::sweep(grid, base, c, threads);

    if (cfg.has("output.csv"))
        io::write_text_file(cfg.get_string("output.csv"), io::sweep_to_csv(records));
    if (cfg.has("output.plot") && cfg.has("output.csv")) {
        const std::string csv = cfg.get_string("output.csv");
        io::write_text_file(cfg.get_string("output.plot"),
                            io::sweep_plot_script(csv, cfg.get_string("output.png", csv + ".png")));
    }
    bool flagged = false;
    for (const auto &rec : records)
        if (rec.result && rec.result->flagged) flagged = true;
    std::printf("%zu\n", records.size());
    return flagged ? 3 : 0;
}

int dispatch(const cfgns::Config &cfg, int threads) {
    const std::string mode = cfg.get_string("mode");
    if (mode == "capacity") return cmd_capacity(cfg, false);
    if (mode == "capacity-feedback") return cmd_capacity(cfg, true);
    if (mode == "region") return cmd_region(cfg);
    if (mode == "codec") return cmd_codec(cfg, threads);
    if (mode == "sweep") return cmd_sweep(cfg, threads);
    throw ValidationError("unknown mode '" + mode + "'");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"finite-state Markov wiretap channel toolkit"};
    std::string config_path;
    std::vector<std::string> overrides;
    int threads = 0;
    app.add_option("config", config_path, "experiment config file")->required();
    app.add_option("--set", overrides, "override a config key (key=value), repeatable");
    app.add_option("--threads", threads, "worker threads (default: FSMWT_THREADS or all cores)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        cfgns::Config cfg = cfgns::parse_file(config_path);
        for (const auto &kv : overrides) cfgns::apply_override(cfg, kv);
        return dispatch(cfg, threads);
    } catch (const GuardrailError &e) {
        std::cerr << "guardrail: " << e.what() << '\n';
        return 4;
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
