#include "sheetlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sheetlab {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ConfigError("config: cannot open " + filename);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not 'key = value': " + trimmed);
        }
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(line_no));
        config.kv_[key] = value;
    }
    return config;
}

void ExperimentConfig::set_real(const std::string& key, double value) {
    kv_[key] = format_real(value);
}

void ExperimentConfig::set_int(const std::string& key, long long value) {
    kv_[key] = std::to_string(value);
}

std::string ExperimentConfig::get_str(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

std::string ExperimentConfig::require_str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
}

double ExperimentConfig::get_real(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a real number: " + it->second);
    }
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not an integer: " + it->second);
    }
}

std::string ExperimentConfig::serialize() const {
    std::string out;
    for (const auto& [key, value] : kv_) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    return out;
}

std::uint64_t ExperimentConfig::hash() const {
    const std::string text = serialize();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace sheetlab
