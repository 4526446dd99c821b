#pragma once
// Flat toml-like config files: one `key = value` per line, values are quoted
// strings, numbers, or booleans. '#' starts a comment. Section headers are
// not supported. Settings resolve as: CLI flag > PONOS_<KEY> environment
// variable > config file > built-in default.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ponos/errors.hpp"
#include "ponos/util.hpp"

namespace ponos::config {

class ConfigMap {
public:
    void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

    bool contains(const std::string& key) const { return values_.count(key) != 0; }

    std::optional<std::string> get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<long long> get_int(const std::string& key) const {
        auto raw = get_string(key);
        if (!raw) return std::nullopt;
        try {
            std::size_t used = 0;
            long long value = std::stoll(*raw, &used);
            if (used != raw->size()) throw std::invalid_argument("trailing characters");
            return value;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' expects an integer, got '" + *raw + "'");
        }
    }

    std::optional<double> get_double(const std::string& key) const {
        auto raw = get_string(key);
        if (!raw) return std::nullopt;
        try {
            std::size_t used = 0;
            double value = std::stod(*raw, &used);
            if (used != raw->size()) throw std::invalid_argument("trailing characters");
            return value;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' expects a number, got '" + *raw + "'");
        }
    }

    std::optional<bool> get_bool(const std::string& key) const {
        auto raw = get_string(key);
        if (!raw) return std::nullopt;
        if (*raw == "true") return true;
        if (*raw == "false") return false;
        throw ConfigError("key '" + key + "' expects true or false, got '" + *raw + "'");
    }

    // Catches typos: every key must be one of the names the consumer knows.
    void require_known_keys(const std::vector<std::string>& known) const {
        for (const auto& [key, value] : values_) {
            bool found = false;
            for (const std::string& k : known) {
                if (k == key) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                std::string allowed;
                for (const std::string& k : known) {
                    if (!allowed.empty()) allowed += ", ";
                    allowed += k;
                }
                throw ConfigError("unknown config key '" + key + "' (known keys: " + allowed + ")");
            }
        }
    }

    const std::unordered_map<std::string, std::string>& raw() const { return values_; }

private:
    std::unordered_map<std::string, std::string> values_;
};

inline std::string parse_value(std::string_view raw, int line_no) {
    raw = util::trim(raw);
    if (raw.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": empty value");
    }
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') {
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
        }
        std::string out;
        for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
            char c = raw[i];
            if (c == '\\' && i + 2 < raw.size()) {
                char next = raw[i + 1];
                if (next == '"' || next == '\\') {
                    out.push_back(next);
                    ++i;
                    continue;
                }
                if (next == 'n') {
                    out.push_back('\n');
                    ++i;
                    continue;
                }
            }
            out.push_back(c);
        }
        return out;
    }
    return std::string(raw);
}

inline ConfigMap parse_config(const std::string& content) {
    ConfigMap map;
    int line_no = 0;
    for (const std::string& raw_line : util::split_lines(content)) {
        ++line_no;
        std::string_view line = util::trim(raw_line);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            throw ConfigError("line " + std::to_string(line_no) +
                              ": sections are not supported, keys are flat");
        }
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key(util::trim(line.substr(0, eq)));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        // Value may carry a trailing comment only outside quotes.
        std::string_view value_part = line.substr(eq + 1);
        std::string_view trimmed = util::trim(value_part);
        if (!trimmed.empty() && trimmed.front() != '"') {
            std::size_t hash = value_part.find('#');
            if (hash != std::string_view::npos) value_part = value_part.substr(0, hash);
        }
        map.set(std::move(key), parse_value(value_part, line_no));
    }
    return map;
}

inline ConfigMap parse_config_file(const std::string& path) {
    return parse_config(util::read_file(path));
}

// PONOS_<KEY> environment override, e.g. endpoint_url -> PONOS_ENDPOINT_URL.
inline std::optional<std::string> env_override(std::string_view key) {
    std::string name = "PONOS_";
    for (unsigned char c : key) name.push_back(static_cast<char>(std::toupper(c)));
    return util::env_var(name);
}

inline std::optional<std::string> resolve_string(const ConfigMap& map, const std::string& key) {
    if (auto env = env_override(key)) return env;
    return map.get_string(key);
}

inline std::optional<long long> resolve_int(const ConfigMap& map, const std::string& key) {
    if (auto env = env_override(key)) {
        try {
            return std::stoll(*env);
        } catch (const std::exception&) {
            throw ConfigError("environment override for '" + key + "' is not an integer: " + *env);
        }
    }
    return map.get_int(key);
}

inline std::uint64_t seed_from_env_or_random() {
    if (auto env = util::env_var("PONOS_SEED")) {
        try {
            return static_cast<std::uint64_t>(std::stoull(*env));
        } catch (const std::exception&) {
            throw ConfigError("PONOS_SEED is not an unsigned integer: " + *env);
        }
    }
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace ponos::config
