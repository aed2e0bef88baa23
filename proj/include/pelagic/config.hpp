#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "pelagic/errors.hpp"

// TOML-subset reader for the experiment/scenario config files: [dotted.sections],
// key = value with numbers, booleans, "strings" and flat arrays, # comments.
// Keys are flattened to "section.sub.key". Every consumer validates against its
// known-key set so typos and unit mistakes fail loudly instead of being ignored.

namespace pelagic::config {

using Value = std::variant<double, bool, std::string, std::vector<double>,
                           std::vector<std::string>>;

struct Table {
    std::map<std::string, Value> entries;

    bool contains(const std::string& key) const { return entries.count(key) > 0; }

    double get_double(const std::string& key, double fallback) const {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (const double* d = std::get_if<double>(&it->second)) return *d;
        throw ConfigError("config key '" + key + "' is not a number");
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
        throw ConfigError("config key '" + key + "' is not a string");
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (const bool* b = std::get_if<bool>(&it->second)) return *b;
        throw ConfigError("config key '" + key + "' is not a boolean");
    }

    std::vector<double> get_double_list(const std::string& key,
                                        std::vector<double> fallback) const {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
        if (const double* d = std::get_if<double>(&it->second)) return {*d};
        throw ConfigError("config key '" + key + "' is not a numeric array");
    }

    // [x, y, z] shorthand used for positions.
    std::optional<std::array<double, 3>> get_vec3(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        const auto* v = std::get_if<std::vector<double>>(&it->second);
        if (v == nullptr || v->size() != 3)
            throw ConfigError("config key '" + key + "' must be a 3-element array");
        return std::array<double, 3>{(*v)[0], (*v)[1], (*v)[2]};
    }

    // Rejects keys outside the accepted set. `prefix` limits the check to one
    // subtree so independent consumers can validate their own sections.
    void reject_unknown(const std::string& prefix, const std::set<std::string>& known) const {
        for (const auto& [key, value] : entries) {
            if (!prefix.empty() && key.compare(0, prefix.size(), prefix) != 0) continue;
            if (known.count(key) == 0)
                throw ConfigError("unknown config key '" + key + "'");
        }
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Removes a trailing comment, honoring string literals.
inline std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

inline bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.')
            return false;
    }
    return true;
}

inline Value parse_scalar(const std::string& raw, int line_no) {
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value");
    if (s == "true") return true;
    if (s == "false") return false;
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
        return s.substr(1, s.size() - 2);
    }
    try {
        std::size_t used = 0;
        const double d = std::stod(s, &used);
        if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("line " + std::to_string(line_no) + ": cannot parse value '" + s + "'");
}

inline Value parse_array(const std::string& raw, int line_no) {
    std::string body = trim(raw);
    body = body.substr(1, body.size() - 2); // strip [ ]
    std::vector<std::string> parts;
    std::string cur;
    bool in_string = false;
    for (char c : body) {
        if (c == '"') in_string = !in_string;
        if (c == ',' && !in_string) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty()) parts.push_back(cur);

    std::vector<double> nums;
    std::vector<std::string> strs;
    for (const std::string& p : parts) {
        Value v = parse_scalar(p, line_no);
        if (const double* d = std::get_if<double>(&v)) {
            nums.push_back(*d);
        } else if (const std::string* s = std::get_if<std::string>(&v)) {
            strs.push_back(*s);
        } else {
            throw ConfigError("line " + std::to_string(line_no) +
                              ": arrays may hold numbers or strings only");
        }
    }
    if (!strs.empty() && !nums.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": mixed array types");
    if (!strs.empty()) return strs;
    return nums;
}

} // namespace detail

inline Table parse(std::istream& in) {
    Table table;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = detail::trim(detail::strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (!detail::valid_key(section))
                throw ConfigError("line " + std::to_string(line_no) + ": bad section name '" +
                                  section + "'");
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(s.substr(0, eq));
        if (!detail::valid_key(key) || key.find('.') != std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": bad key '" + key + "'");
        const std::string full = section.empty() ? key : section + "." + key;
        if (table.entries.count(full) > 0)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + full + "'");
        const std::string raw = detail::trim(s.substr(eq + 1));
        if (!raw.empty() && raw.front() == '[') {
            if (raw.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
            table.entries.emplace(full, detail::parse_array(raw, line_no));
        } else {
            table.entries.emplace(full, detail::parse_scalar(raw, line_no));
        }
    }
    return table;
}

inline Table parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

inline Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
}

} // namespace pelagic::config
