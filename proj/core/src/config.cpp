#include "steklov/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace steklov {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

RunConfig RunConfig::parse(std::istream& is) {
    RunConfig cfg;
    std::string line;
    std::string current = "run";
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
            current = trim(t.substr(1, t.size() - 2));
            if (current.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.set(current, key, value);
    }
    return cfg;
}

RunConfig RunConfig::parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return parse(is);
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    for (const auto& [name, section] : sections_) {
        os << '[' << name << "]\n";
        for (const auto& [key, value] : section) os << key << " = " << value << '\n';
    }
    return os.str();
}

std::uint64_t RunConfig::hash() const {
    const std::string s = serialize();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

const std::string* RunConfig::find(const std::string& section, const std::string& key) const {
    for (const auto& [name, sec] : sections_) {
        if (name != section) continue;
        for (const auto& [k, v] : sec)
            if (k == key) return &v;
    }
    return nullptr;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string RunConfig::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    const std::string* v = find(section, key);
    return v ? *v : fallback;
}

std::string RunConfig::require(const std::string& section, const std::string& key) const {
    const std::string* v = find(section, key);
    if (!v) throw ConfigError("missing required key [" + section + "] " + key);
    return *v;
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        const double x = std::stod(*v, &pos);
        if (trim(v->substr(pos)).empty()) return x;
    } catch (...) {
    }
    throw ConfigError("key [" + section + "] " + key + ": cannot parse '" + *v + "' as number");
}

int RunConfig::get_int(const std::string& section, const std::string& key, int fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        const int x = std::stoi(*v, &pos);
        if (trim(v->substr(pos)).empty()) return x;
    } catch (...) {
    }
    throw ConfigError("key [" + section + "] " + key + ": cannot parse '" + *v + "' as integer");
}

bool RunConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("key [" + section + "] " + key + ": cannot parse '" + *v + "' as boolean");
}

std::vector<double> RunConfig::get_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    std::vector<double> out;
    std::string token;
    std::istringstream is(*v);
    while (std::getline(is, token, ',')) {
        token = trim(token);
        if (token.empty()) continue;
        try {
            out.push_back(std::stod(token));
        } catch (...) {
            throw ConfigError("key [" + section + "] " + key + ": bad list element '" + token + "'");
        }
    }
    if (out.empty()) throw ConfigError("key [" + section + "] " + key + ": empty list");
    return out;
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    for (auto& [name, sec] : sections_) {
        if (name != section) continue;
        for (auto& [k, v] : sec) {
            if (k == key) {
                v = value;
                return;
            }
        }
        sec.emplace_back(key, value);
        return;
    }
    sections_.push_back({section, Section{{key, value}}});
}

std::string format_double_17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace steklov
