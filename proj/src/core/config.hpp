#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hop {

/// Flat `section.key = value` configuration. Unset keys fall back to the
/// built-in defaults table; reading a key that exists in neither is a
/// usage error, which catches typos early.
class Config {
public:
    Config() = default;

    static Config load_file(const std::string& path);
    void parse_line(const std::string& line, const std::string& where);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    int64_t get_int(const std::string& key) const;
    uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    /// "lo,hi" pair.
    std::pair<double, double> get_range(const std::string& key) const;
    /// "x,y; x,y; ..." list.
    std::vector<std::pair<double, double>> get_points(const std::string& key) const;

    /// All keys with explicit values (not defaults), sorted.
    std::vector<std::pair<std::string, std::string>> entries() const;

    static const std::map<std::string, std::string>& defaults();

private:
    std::string raw(const std::string& key) const;
    std::map<std::string, std::string> values_;
};

}  // namespace hop
