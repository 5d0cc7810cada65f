#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prlc/mcmc.hpp"
#include "prlc/ym.hpp"

namespace prlc {

// Unknown scenario names or malformed invocations; CLI maps this to exit 2.
struct UsageError : std::invalid_argument {
    explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

inline constexpr int kSchemaVersion = 1;

extern const std::vector<std::string> kScenarioNames;

// Flat sections of key = value pairs; comments start with '#'. Serialization
// is canonical (sorted sections and keys), so parse -> serialize -> parse is
// the identity on the key-value content.
class KeyValueDoc {
  public:
    static KeyValueDoc parse(const std::string& text);
    static KeyValueDoc from_file(const std::string& path);
    std::string serialize() const;

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_num(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set_num(const std::string& key, double v);
    void set_int(const std::string& key, long v);

    const std::map<std::string, std::string>& items() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;  // "section.key" or bare "key"
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string scenario;
    uint64_t seed = 12345;
    std::string out_dir = "out";

    ModelParams model;
    SamplerConfig sampler;

    // scenario knobs
    std::vector<double> eps_list = {0.5, 0.25, 0.125};
    double gaussian_width = 0.3;
    double bump_radius = 1.0;

    static ExperimentConfig from_doc(const KeyValueDoc& doc);
    static ExperimentConfig from_file(const std::string& path);
    KeyValueDoc to_doc() const;

    void require_known_scenario() const;
};

}  // namespace prlc
