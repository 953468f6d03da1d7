#include "settings.hpp"

#include <fstream>

#include "poisonmt/text.hpp"

namespace poisonmt::cli {

Settings Settings::load_file(const std::string& path) {
    Settings settings;
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open config " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = text::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            raise(Errc::malformed_line,
                  path + " line " + std::to_string(line_no) + ": expected key = value",
                  static_cast<std::int64_t>(line_no));
        const std::string key = text::trim(stripped.substr(0, eq));
        const std::string value = text::trim(stripped.substr(eq + 1));
        if (key.empty())
            raise(Errc::malformed_line, path + " line " + std::to_string(line_no) + ": empty key",
                  static_cast<std::int64_t>(line_no));
        settings.kv_[key] = value;
    }
    return settings;
}

std::string Settings::str(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

std::string Settings::require(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end() || it->second.empty())
        raise(Errc::invalid_argument, "missing required setting '" + key + "'");
    return it->second;
}

std::uint64_t Settings::u64(const std::string& key, std::uint64_t fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        raise(Errc::invalid_argument, "setting '" + key + "' is not an integer: " + it->second);
    }
}

std::uint64_t Settings::require_u64(const std::string& key) const {
    if (!has(key)) raise(Errc::invalid_argument, "missing required setting '" + key + "'");
    return u64(key, 0);
}

double Settings::dbl(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        raise(Errc::invalid_argument, "setting '" + key + "' is not a number: " + it->second);
    }
}

std::size_t Settings::size(const std::string& key, std::size_t fallback) const {
    return static_cast<std::size_t>(u64(key, fallback));
}

bool Settings::flag(const std::string& key, bool fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    raise(Errc::invalid_argument, "setting '" + key + "' is not a boolean: " + v);
}

std::map<std::string, std::string> Settings::group(const std::string& prefix) const {
    std::map<std::string, std::string> out;
    const std::string want = prefix + ".";
    for (const auto& [key, value] : kv_) {
        if (key.rfind(want, 0) == 0 && key.size() > want.size())
            out[key.substr(want.size())] = value;
    }
    return out;
}

std::string Settings::canonical(const std::vector<std::string>& skip) const {
    std::string out;
    for (const auto& [key, value] : kv_) {
        bool skipped = false;
        for (const auto& s : skip) {
            if (key == s) {
                skipped = true;
                break;
            }
        }
        if (skipped) continue;
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& value) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const auto comma = value.find(',', pos);
        const std::string item = text::trim(
            comma == std::string::npos ? value.substr(pos) : value.substr(pos, comma - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace poisonmt::cli
