#pragma once

// Flat key=value configuration files with [section] headers and # comments.
// Keys are addressed as "section.key"; unknown keys are rejected with their
// line number so typos surface immediately.

#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace esrisk_cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigFile {
public:
    static ConfigFile parse(const std::string& path, const std::set<std::string>& known_keys) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path);
        ConfigFile cfg;
        std::string line;
        std::string section;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']') {
                    throw ConfigError(path + ":" + std::to_string(line_no) +
                                      ": malformed section header");
                }
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": expected key = value");
            }
            std::string key = trim(trimmed.substr(0, eq));
            if (!section.empty()) key = section + "." + key;
            if (!known_keys.contains(key)) {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" +
                                  key + "'");
            }
            if (cfg.values_.contains(key)) {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": duplicate key '" +
                                  key + "'");
            }
            cfg.values_[key] = trim(trimmed.substr(eq + 1));
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.contains(key); }

    std::string get_string(const std::string& key, const std::string& fallback = "") const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key) const {
        return parse_double(key, require(key));
    }

    std::uint64_t get_uint(const std::string& key) const {
        const std::string& v = require(key);
        try {
            return std::stoull(v);
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': cannot parse '" + v +
                              "' as an integer");
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "on" || it->second == "true" || it->second == "1") return true;
        if (it->second == "off" || it->second == "false" || it->second == "0") return false;
        throw ConfigError("config key '" + key + "': expected on/off, got '" + it->second +
                          "'");
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        for (const std::string& tok : split_list(require(key))) {
            out.push_back(parse_double(key, tok));
        }
        return out;
    }

    std::vector<std::size_t> get_uint_list(const std::string& key) const {
        std::vector<std::size_t> out;
        for (const std::string& tok : split_list(require(key))) {
            try {
                out.push_back(std::stoull(tok));
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "': cannot parse '" + tok +
                                  "' as an integer");
            }
        }
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split_list(const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        std::stringstream ss(s);
        while (std::getline(ss, cur, ',')) {
            const std::string t = trim(cur);
            if (!t.empty()) out.push_back(t);
        }
        return out;
    }

    static double parse_double(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': cannot parse '" + v +
                              "' as a number");
        }
    }

    const std::string& require(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("config key '" + key + "' is required");
        return it->second;
    }

    std::map<std::string, std::string> values_;
};

}  // namespace esrisk_cli
