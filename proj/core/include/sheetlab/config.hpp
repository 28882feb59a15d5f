#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace sheetlab {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// One experiment = one human-readable key-value file ("key = value" lines,
/// '#' comments). Values are kept verbatim so the config round-trips through
/// serialization losslessly; the canonical serialization (sorted keys) feeds
/// the config hash embedded in every report.
class ExperimentConfig {
  public:
    ExperimentConfig() = default;

    static ExperimentConfig from_file(const std::string& filename);
    static ExperimentConfig from_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set_real(const std::string& key, double value);
    void set_int(const std::string& key, long long value);

    std::string get_str(const std::string& key, const std::string& fallback) const;
    std::string require_str(const std::string& key) const;
    double get_real(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;

    /// Canonical "key = value" lines, sorted by key.
    std::string serialize() const;
    /// FNV-1a 64 over the canonical serialization.
    std::uint64_t hash() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }
    bool operator==(const ExperimentConfig& o) const { return kv_ == o.kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace sheetlab
