#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rcukf {

/// Flat key-value configuration with dotted section keys, e.g.
/// `reservoir.size 300`. One `key value` pair per line, `#` starts a
/// comment. The same format backs config files and the machine-readable
/// benchmark report.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text,
                                      const std::string& context = "<string>");

    bool has(const std::string& key) const;
    void set(const std::string& key, std::string value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Comma-separated unsigned list, e.g. `seeds 1,2,3,4,5`.
    std::vector<std::uint64_t> get_uint64_list(const std::string& key,
                                               std::vector<std::uint64_t> fallback) const;

    /// Overlays every entry of `other` on top of this config.
    void merge(const KeyValueConfig& other);

    const std::map<std::string, std::string>& entries() const { return entries_; }

    /// Sorted `key value` lines; parseable by from_string.
    std::string serialize() const;

private:
    std::map<std::string, std::string> entries_;
};

} // namespace rcukf
