#pragma once

// Experiment configuration files.
//
//     # comment
//     experiment = thm22-scan
//     alpha = 0.6, 0.75, 0.9
//
//     [grid]
//     half_width = 64
//     n = 16384
//
// Keys inside a section are addressed as "section.key".  Values are raw text;
// lists are comma separated.  A key may appear only once.

#include "fracmul/error.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fracmul {

/// Malformed or incomplete configuration (CLI exit status 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

class Config {
public:
    Config() = default;

    /// Throws ConfigError("<source>:<line>: ...") on malformed input.
    static Config parse(std::string_view text, const std::string& source = "<config>");
    static Config load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    /// Adds or replaces a key (used for command-line overrides).
    void set(const std::string& key, const std::string& value);
    /// Copies keys of `defaults` that are not present here.
    void merge_defaults(const Config& defaults);

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

    /// Keys in canonical order (top level first, then by section).
    std::vector<std::pair<std::string, std::string>> entries() const;
    /// Text that parses back to an equal Config.
    std::string serialize() const;

    bool operator==(const Config& other) const { return values_ == other.values_; }

private:
    struct Entry {
        std::string value;
        std::string origin;  // "file:line" or "override"
        bool operator==(const Entry& o) const { return value == o.value; }
    };
    const Entry& require(const std::string& key) const;
    [[noreturn]] void bad_value(const std::string& key, const std::string& expected) const;

    std::map<std::string, Entry> values_;
};

}  // namespace fracmul
