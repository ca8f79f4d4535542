// Flat key/value experiment configs: dotted sections, one file per
// experiment, command-line --set overrides.
#pragma once

#include <fsmwt/common.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fsmwt::config {

/**
 * @brief Parsed key/value config.
 *
 * Accepted lines: `key = value`, `# comment`, blank. Keys are dotted paths
 * (chain.u, gaussian.sigma2_w). Values keep their raw text; typed getters
 * parse on demand and throw ValidationError naming the key on bad syntax.
 * List values are comma-separated.
 */
class Config {
public:
    Config() = default;

    void set(std::string key, std::string value);
    bool has(std::string_view key) const;

    std::string get_string(std::string_view key) const;
    std::string get_string(std::string_view key, std::string fallback) const;
    double get_double(std::string_view key) const;
    double get_double(std::string_view key, double fallback) const;
    long long get_int(std::string_view key) const;
    long long get_int(std::string_view key, long long fallback) const;
    bool get_bool(std::string_view key) const;
    bool get_bool(std::string_view key, bool fallback) const;
    uint64_t get_seed(std::string_view key, uint64_t fallback) const;
    std::vector<double> get_double_list(std::string_view key) const;
    std::vector<long long> get_int_list(std::string_view key) const;

    const std::map<std::string, std::string> &entries() const { return kv_; }

private:
    std::optional<std::string> raw(std::string_view key) const;
    std::map<std::string, std::string> kv_;
};

Config parse_text(std::string_view text, std::string_view origin = "<inline>");
Config parse_file(const std::string &path);

// Applies one "key=value" override; malformed input throws ValidationError.
void apply_override(Config &cfg, std::string_view keyval);

} // namespace fsmwt::config
