#include "fracmul/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fracmul {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

bool valid_name(std::string_view name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    if (!text.empty() && text.back() == ',') out.push_back({});
    return out;
}

template <class T>
std::optional<T> parse_number(const std::string& s) {
    T v{};
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& source) {
    Config cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail("unterminated section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (!valid_name(section)) fail("invalid section name '" + section + "'");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string name = trim(std::string_view(t).substr(0, eq));
        if (!valid_name(name)) fail("invalid key '" + name + "'");
        const std::string key = section.empty() ? name : section + "." + name;
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (value.empty()) fail("key '" + key + "' has no value");
        if (cfg.has(key)) fail("duplicate key '" + key + "' (first at " + cfg.values_.at(key).origin + ")");
        cfg.values_[key] = {value, source + ":" + std::to_string(lineno)};
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value) {
    const auto dot = key.find('.');
    const bool ok = dot == std::string::npos
                        ? valid_name(key)
                        : valid_name(key.substr(0, dot)) && valid_name(key.substr(dot + 1));
    if (!ok) throw ConfigError("invalid key '" + key + "'");
    if (trim(value).empty()) throw ConfigError("key '" + key + "' has no value");
    values_[key] = {trim(value), "override"};
}

void Config::merge_defaults(const Config& defaults) {
    for (const auto& [k, e] : defaults.values_)
        if (!has(k)) values_[k] = e;
}

const Config::Entry& Config::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

void Config::bad_value(const std::string& key, const std::string& expected) const {
    const auto& e = values_.at(key);
    throw ConfigError(e.origin + ": key '" + key + "': expected " + expected + ", got '" + e.value + "'");
}

std::string Config::get_string(const std::string& key) const { return require(key).value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
    const auto v = parse_number<double>(require(key).value);
    if (!v) bad_value(key, "a number");
    return *v;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key) const {
    const auto v = parse_number<std::uint64_t>(require(key).value);
    if (!v) bad_value(key, "a nonnegative integer");
    return *v;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = require(key).value;
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    bad_value(key, "true or false");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(require(key).value)) {
        const auto v = parse_number<double>(item);
        if (!v) bad_value(key, "a comma-separated list of numbers");
        out.push_back(*v);
    }
    return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    return has(key) ? get_doubles(key) : fallback;
}

std::vector<std::string> Config::get_strings(const std::string& key) const {
    auto items = split_list(require(key).value);
    for (const auto& s : items)
        if (s.empty()) bad_value(key, "a comma-separated list without empty items");
    return items;
}

std::vector<std::string> Config::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
    return has(key) ? get_strings(key) : fallback;
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
    std::vector<std::pair<std::string, std::string>> top, nested;
    for (const auto& [k, e] : values_) (k.find('.') == std::string::npos ? top : nested).emplace_back(k, e.value);
    top.insert(top.end(), nested.begin(), nested.end());
    return top;
}

std::string Config::serialize() const {
    std::string out;
    std::string section;
    for (const auto& [k, v] : entries()) {
        const auto dot = k.find('.');
        if (dot == std::string::npos) {
            out += k + " = " + v + "\n";
            continue;
        }
        const std::string s = k.substr(0, dot);
        if (s != section) {
            out += "\n[" + s + "]\n";
            section = s;
        }
        out += k.substr(dot + 1) + " = " + v + "\n";
    }
    return out;
}

}  // namespace fracmul
