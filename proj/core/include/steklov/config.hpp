#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "steklov/errors.hpp"

namespace steklov {

// Flat key-value configuration with INI-like sections. Keys keep their file
// order so parse -> serialize -> parse is a fixed point.
class RunConfig {
public:
    using Section = std::vector<std::pair<std::string, std::string>>;

    static RunConfig parse(std::istream& is);
    static RunConfig parse_string(const std::string& text);
    static RunConfig parse_file(const std::string& path);

    std::string serialize() const;
    std::uint64_t hash() const;  // FNV-1a over the canonical serialization

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    std::string require(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    const std::vector<std::pair<std::string, Section>>& sections() const { return sections_; }

private:
    const std::string* find(const std::string& section, const std::string& key) const;
    std::vector<std::pair<std::string, Section>> sections_;
};

std::string format_double_17(double x);

}  // namespace steklov
