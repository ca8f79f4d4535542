#include <fsmwt/io.hpp>

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace fsmwt::io {
namespace {

std::vector<double> doubles_from(const json &j, std::string_view what) {
    if (!j.is_array()) throw ValidationError("expected an array for " + std::string(what));
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto &v : j) {
        if (!v.is_number()) throw ValidationError("non-numeric entry in " + std::string(what));
        out.push_back(v.get<double>());
    }
    return out;
}

json doubles_to(const std::vector<double> &v) {
    json arr = json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

// Error text goes into one quoted CSV field.
std::string csv_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c == '\n' ? ' ' : c;
    }
    out += '"';
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(uint64_t h) {
    static const char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

json channel_to_json(const channels::DiscreteWiretapChannel &ch) {
    json j;
    j["ns"] = ch.ns();
    j["nx"] = ch.nx();
    j["ny"] = ch.ny();
    j["nz"] = ch.nz();
    j["axes"] = "s,x,y,z";
    j["table"] = doubles_to(ch.table());
    if (ch.witness()) {
        const auto &w = *ch.witness();
        json jw;
        jw["main"] = doubles_to(w.main);
        jw["wiretap"] = doubles_to(w.wiretap.a);
        j["witness"] = std::move(jw);
    }
    return j;
}

channels::DiscreteWiretapChannel channel_from_json(const json &j) {
    for (const char *key : {"ns", "nx", "ny", "nz", "table"})
        if (!j.contains(key))
            throw ValidationError("channel JSON is missing '" + std::string(key) + "'");
    int ns = j["ns"].get<int>(), nx = j["nx"].get<int>();
    int ny = j["ny"].get<int>(), nz = j["nz"].get<int>();
    if (j.contains("axes") && j["axes"].get<std::string>() != "s,x,y,z")
        throw ValidationError("channel JSON axes must be 's,x,y,z'");
    std::optional<channels::DegradedWitness> wit;
    if (j.contains("witness")) {
        channels::DegradedWitness w;
        w.ns = ns;
        w.nx = nx;
        w.ny = ny;
        w.main = doubles_from(j["witness"]["main"], "witness main");
        w.wiretap = Mat(ny, nz);
        w.wiretap.a = doubles_from(j["witness"]["wiretap"], "witness wiretap");
        if (w.main.size() != static_cast<size_t>(ns) * nx * ny ||
            w.wiretap.a.size() != static_cast<size_t>(ny) * nz)
            throw ValidationError("channel JSON witness has the wrong shape");
        wit = std::move(w);
    }
    return channels::DiscreteWiretapChannel(ns, nx, ny, nz, doubles_from(j["table"], "table"),
                                            std::move(wit));
}

channels::DiscreteWiretapChannel channel_from_json_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open channel file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw ValidationError("channel file '" + path + "': " + e.what());
    }
    return channel_from_json(j);
}

json joint_to_json(const infotheory::JointTable &t) {
    json j;
    json axes = json::array();
    for (const auto &ax : t.axes()) {
        json a;
        a["name"] = ax.name;
        a["size"] = ax.size;
        axes.push_back(std::move(a));
    }
    j["axes"] = std::move(axes);
    j["probs"] = doubles_to(t.probs());
    return j;
}

json capacity_result_to_json(const capacity::CapacityResult &r, const json &params) {
    json j;
    j["params"] = params;
    j["value"] = r.value;
    j["flagged"] = r.flagged;
    if (!r.note.empty()) j["note"] = r.note;
    if (r.power) j["power"] = doubles_to(r.power->p);
    if (r.input) {
        json in;
        in["k"] = r.input->k;
        in["nx"] = r.input->nx;
        in["rows"] = doubles_to(r.input->rows);
        j["input"] = std::move(in);
    }
    if (r.per_state_terms.rows > 0) {
        json t;
        t["rows"] = r.per_state_terms.rows;
        t["cols"] = r.per_state_terms.cols;
        t["data"] = doubles_to(r.per_state_terms.a);
        j["per_state_terms"] = std::move(t);
    }
    return j;
}

json run_report_to_json(const codec::RunReport &r) {
    json j;
    j["blocks"] = r.blocks;
    j["feedback"] = r.feedback;
    j["message_rate"] = r.message_rate;
    j["error_rate"] = r.error_rate;
    j["equivocation"] = r.equivocation;
    j["analytic_secrecy"] = r.analytic_secrecy;
    return j;
}

void write_json_file(const std::string &path, const json &j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

void append_json_line(const std::string &path, const json &j) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << j.dump() << '\n';
}

std::string boundary_to_csv(const region::RegionBoundary &b, std::string_view params_hash) {
    std::string out = "r,re,kind,params\n";
    for (const auto &pt : b.points) {
        out += format_double(pt.r);
        out += ',';
        out += format_double(pt.re);
        out += ',';
        out += b.kind;
        out += ',';
        out += params_hash;
        out += '\n';
    }
    return out;
}

std::string sweep_to_csv(const std::vector<simulate::SweepRecord> &records) {
    std::string out = "d,u,sigma2_w,feedback,value,flagged,error\n";
    for (const auto &rec : records) {
        out += std::to_string(rec.pt.d);
        out += ',';
        out += format_double(rec.pt.u);
        out += ',';
        out += format_double(rec.pt.sigma2_w);
        out += ',';
        out += rec.pt.feedback ? '1' : '0';
        out += ',';
        if (rec.result) {
            out += format_double(rec.result->value);
            out += ',';
            out += rec.result->flagged ? '1' : '0';
            out += ",\"\"\n";
        } else {
            out += ",,";
            out += csv_quote(rec.error);
            out += '\n';
        }
    }
    return out;
}

void write_text_file(const std::string &path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string sweep_plot_script(const std::string &csv_path, const std::string &out_png) {
    std::ostringstream os;
    os << "#!/usr/bin/env gnuplot\n"
       << "# secrecy capacity vs delay, one curve per chain memory u\n"
       << "csv = '" << csv_path << "'\n"
       << "set datafile separator ','\n"
       << "set terminal pngcairo size 960,640\n"
       << "set output '" << out_png << "'\n"
       << "set xlabel 'delay d'\n"
       << "set ylabel 'secrecy capacity [bits/use]'\n"
       << "set key top right\n"
       << "us = system(\"awk -F, 'NR>1 && $1>=0 {print $2}' \".csv.\" | sort -u | tr '\\n' ' '\")\n"
       << "plot for [i=1:words(us)] csv using "
          "(strcol(2) eq word(us,i) && $1>=0 && $4==0 ? $1 : 1/0):5 "
          "with linespoints title 'u='.word(us,i), \\\n"
       << "     for [i=1:words(us)] csv using "
          "(strcol(2) eq word(us,i) && $1>=0 && $4==1 ? $1 : 1/0):5 "
          "with linespoints dashtype 2 title 'u='.word(us,i).' (feedback)'\n";
    return os.str();
}

std::string hex_dump(const std::vector<int> &symbols, uint64_t seed) {
    std::string out = "seed=" + std::to_string(seed) + "\n";
    static const char digits[] = "0123456789abcdef";
    for (size_t i = 0; i < symbols.size(); ++i) {
        int v = symbols[i];
        if (v < 0 || v > 255) throw ValidationError("hex_dump: symbol out of byte range");
        out += digits[(v >> 4) & 0xf];
        out += digits[v & 0xf];
        if (i % 32 == 31) out += '\n';
    }
    if (!symbols.empty() && symbols.size() % 32 != 0) out += '\n';
    return out;
}

std::vector<int> hex_parse(std::string_view dump, uint64_t *seed_out) {
    size_t pos = 0;
    if (dump.rfind("seed=", 0) == 0) {
        size_t nl = dump.find('\n');
        std::string_view num = dump.substr(5, (nl == std::string_view::npos ? dump.size() : nl) - 5);
        uint64_t seed = 0;
        auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), seed);
        if (ec != std::errc() || p != num.data() + num.size())
            throw ValidationError("hex_parse: malformed seed line");
        if (seed_out) *seed_out = seed;
        pos = nl == std::string_view::npos ? dump.size() : nl + 1;
    } else if (seed_out) {
        *seed_out = 0;
    }

    std::vector<int> out;
    int pending = -1;
    for (; pos < dump.size(); ++pos) {
        char c = dump[pos];
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        int v;
        if (c >= '0' && c <= '9')
            v = c - '0';
        else if (c >= 'a' && c <= 'f')
            v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
            v = c - 'A' + 10;
        else
            throw ValidationError("hex_parse: invalid character in dump");
        if (pending < 0) {
            pending = v;
        } else {
            out.push_back(pending * 16 + v);
            pending = -1;
        }
    }
    if (pending >= 0) throw ValidationError("hex_parse: odd number of hex digits");
    return out;
}

} // namespace fsmwt::io
