#include "rcukf/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rcukf/csv_io.hpp"
#include "rcukf/errors.hpp"

namespace rcukf {

namespace {

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str(), path);
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text,
                                           const std::string& context) {
    KeyValueConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int row = 0;
    while (std::getline(ss, line)) {
        ++row;
        const auto comment = line.find('#');
        if (comment != std::string::npos)
            line = line.substr(0, comment);
        line = trimmed(line);
        if (line.empty())
            continue;
        const auto sep = line.find_first_of(" \t=");
        if (sep == std::string::npos)
            throw IoError(context + " line " + std::to_string(row) +
                          ": expected 'key value'");
        const std::string key = trimmed(line.substr(0, sep));
        std::string value = trimmed(line.substr(sep + 1));
        if (!value.empty() && value.front() == '=')
            value = trimmed(value.substr(1));
        if (key.empty() || value.empty())
            throw IoError(context + " line " + std::to_string(row) +
                          ": expected 'key value'");
        cfg.entries_[key] = value;
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
    return entries_.count(key) != 0;
}

void KeyValueConfig::set(const std::string& key, std::string value) {
    entries_[key] = std::move(value);
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return fallback;
    return parse_double(it->second, "config key '" + key + "'");
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return fallback;
    int value = 0;
    const char* begin = it->second.data();
    const char* end = begin + it->second.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw IoError("config key '" + key + "': invalid integer '" + it->second + "'");
    return value;
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key,
                                         std::uint64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return fallback;
    std::uint64_t value = 0;
    const char* begin = it->second.data();
    const char* end = begin + it->second.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw IoError("config key '" + key + "': invalid unsigned '" + it->second + "'");
    return value;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return fallback;
    if (it->second == "1" || it->second == "true" || it->second == "yes")
        return true;
    if (it->second == "0" || it->second == "false" || it->second == "no")
        return false;
    throw IoError("config key '" + key + "': invalid boolean '" + it->second + "'");
}

std::vector<std::uint64_t> KeyValueConfig::get_uint64_list(
    const std::string& key, std::vector<std::uint64_t> fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return fallback;
    std::vector<std::uint64_t> values;
    std::stringstream ss(it->second);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trimmed(cell);
        std::uint64_t value = 0;
        const char* begin = cell.data();
        const char* end = begin + cell.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end || cell.empty())
            throw IoError("config key '" + key + "': invalid list entry '" + cell + "'");
        values.push_back(value);
    }
    if (values.empty())
        throw IoError("config key '" + key + "': empty list");
    return values;
}

void KeyValueConfig::merge(const KeyValueConfig& other) {
    for (const auto& [key, value] : other.entries_)
        entries_[key] = value;
}

std::string KeyValueConfig::serialize() const {
    std::string out;
    for (const auto& [key, value] : entries_) {
        out += key;
        out += ' ';
        out += value;
        out += '\n';
    }
    return out;
}

} // namespace rcukf
