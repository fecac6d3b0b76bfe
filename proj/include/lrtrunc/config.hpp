#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrtrunc {

/// Invalid or unknown configuration content (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::set<std::string> kExperimentKinds = {
    "truncation-curve", "dispersion-suite", "tree-suite",       "overlap-curve",
    "intersection-probe", "potts-report",   "counterexample-scan"};

/// INI-style experiment description: [experiment] holds kind, seed, workers
/// and output; model and parameter sections depend on the kind.
struct ExperimentConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;

  std::string kind() const;
  std::uint64_t seed() const;
  unsigned workers() const;
  std::string output() const;

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::optional<std::uint64_t> fallback = std::nullopt) const;
  std::int64_t get_i64(const std::string& section, const std::string& key,
                       std::optional<std::int64_t> fallback = std::nullopt) const;
  double get_double(const std::string& section, const std::string& key,
                    std::optional<double> fallback = std::nullopt) const;
  bool get_bool(const std::string& section, const std::string& key,
                std::optional<bool> fallback = std::nullopt) const;
  std::vector<std::int64_t> get_int_list(const std::string& section, const std::string& key,
                                         std::optional<std::vector<std::int64_t>> fallback =
                                             std::nullopt) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      std::optional<std::vector<double>> fallback =
                                          std::nullopt) const;

  bool operator==(const ExperimentConfig& other) const = default;
};

/// Parses INI text. Duplicate keys and malformed lines are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical INI text (sections and keys sorted).
std::string serialize_config(const ExperimentConfig& config);

/// Rejects sections and keys the experiment kind does not use.
void validate_keys(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace lrtrunc
