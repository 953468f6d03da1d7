#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "poisonmt/error.hpp"

namespace poisonmt::cli {

// Flat key=value run settings: config file values overlaid by flags. The
// resolved map doubles as the hashed run configuration.
class Settings {
public:
    static Settings load_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback = {}) const;
    std::string require(const std::string& key) const;
    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const;
    std::uint64_t require_u64(const std::string& key) const;
    double dbl(const std::string& key, double fallback) const;
    std::size_t size(const std::string& key, std::size_t fallback) const;
    bool flag(const std::string& key, bool fallback = false) const;

    // Keys like "corpus.ms-jv" -> {"ms-jv": path}.
    std::map<std::string, std::string> group(const std::string& prefix) const;

    // Sorted key=value dump; `skip` keys excluded (used for the config hash).
    std::string canonical(const std::vector<std::string>& skip = {}) const;

    const std::map<std::string, std::string>& raw() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

std::vector<std::string> split_csv(const std::string& value);

} // namespace poisonmt::cli
