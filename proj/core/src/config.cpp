#include <fsmwt/config.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fsmwt::config {
namespace {

std::string trim(std::string_view sv) {
    size_t b = 0, e = sv.size();
    while (b < e && std::isspace(static_cast<unsigned char>(sv[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(sv[e - 1]))) --e;
    return std::string(sv.substr(b, e - b));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view want, std::string_view got) {
    std::ostringstream os;
    os << "config key '" << key << "': expected " << want << ", got '" << got << "'";
    throw ValidationError(os.str());
}

double parse_double(std::string_view key, const std::string &raw) {
    const std::string v = trim(raw);
    size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception &) {
        bad_value(key, "a number", raw);
    }
    if (pos != v.size()) bad_value(key, "a number", raw);
    return out;
}

long long parse_int(std::string_view key, const std::string &raw) {
    const std::string v = trim(raw);
    long long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, "an integer", raw);
    return out;
}

bool parse_bool(std::string_view key, const std::string &raw) {
    std::string v = trim(raw);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, "a boolean", raw);
}

std::vector<std::string> split_list(const std::string &raw) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (start <= raw.size()) {
        size_t comma = raw.find(',', start);
        if (comma == std::string::npos) comma = raw.size();
        parts.push_back(raw.substr(start, comma - start));
        start = comma + 1;
    }
    return parts;
}

} // namespace

void Config::set(std::string key, std::string value) { kv_[std::move(key)] = std::move(value); }

bool Config::has(std::string_view key) const { return kv_.count(std::string(key)) > 0; }

std::optional<std::string> Config::raw(std::string_view key) const {
    auto it = kv_.find(std::string(key));
    if (it == kv_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_string(std::string_view key) const {
    auto v = raw(key);
    if (!v) throw ValidationError("config key '" + std::string(key) + "' is required");
    return *v;
}

std::string Config::get_string(std::string_view key, std::string fallback) const {
    auto v = raw(key);
    return v ? *v : std::move(fallback);
}

double Config::get_double(std::string_view key) const { return parse_double(key, get_string(key)); }

double Config::get_double(std::string_view key, double fallback) const {
    auto v = raw(key);
    return v ? parse_double(key, *v) : fallback;
}

long long Config::get_int(std::string_view key) const { return parse_int(key, get_string(key)); }

long long Config::get_int(std::string_view key, long long fallback) const {
    auto v = raw(key);
    return v ? parse_int(key, *v) : fallback;
}

bool Config::get_bool(std::string_view key) const { return parse_bool(key, get_string(key)); }

bool Config::get_bool(std::string_view key, bool fallback) const {
    auto v = raw(key);
    return v ? parse_bool(key, *v) : fallback;
}

uint64_t Config::get_seed(std::string_view key, uint64_t fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    const std::string s = trim(*v);
    uint64_t out = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size())
        bad_value(key, "an unsigned seed", *v);
    return out;
}

std::vector<double> Config::get_double_list(std::string_view key) const {
    std::vector<double> out;
    for (const auto &part : split_list(get_string(key))) out.push_back(parse_double(key, part));
    return out;
}

std::vector<long long> Config::get_int_list(std::string_view key) const {
    std::vector<long long> out;
    for (const auto &part : split_list(get_string(key))) out.push_back(parse_int(key, part));
    return out;
}

Config parse_text(std::string_view text, std::string_view origin) {
    Config cfg;
    size_t lineno = 0, start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string line = trim(text.substr(start, nl - start));
        start = nl + 1;
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << origin << ":" << lineno << ": expected 'key = value', got '" << line << "'";
            throw ValidationError(os.str());
        }
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) {
            std::ostringstream os;
            os << origin << ":" << lineno << ": empty key";
            throw ValidationError(os.str());
        }
        cfg.set(std::move(key), std::move(value));
    }
    return cfg;
}

Config parse_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

void apply_override(Config &cfg, std::string_view keyval) {
    size_t eq = keyval.find('=');
    if (eq == std::string_view::npos)
        throw ValidationError("override must look like key=value, got '" + std::string(keyval) +
                              "'");
    std::string key = trim(keyval.substr(0, eq));
    std::string value = trim(keyval.substr(eq + 1));
    if (key.empty())
        throw ValidationError("override has an empty key: '" + std::string(keyval) + "'");
    cfg.set(std::move(key), std::move(value));
}

} // namespace fsmwt::config
