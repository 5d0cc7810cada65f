#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prlc/config.hpp"

namespace prlc {

struct ScalarResult {
    std::string name;
    double value = 0.0;
    double se = 0.0;  // 0 when exact
};

struct CriterionFlag {
    std::string name;    // names the invariant it tests
    bool pass = false;
    std::string detail;
};

struct ResultRecord {
    int schema_version = kSchemaVersion;
    std::string scenario;
    uint64_t seed = 0;
    std::string inputs_echo;  // canonical serialized config
    std::vector<ScalarResult> results;
    std::vector<CriterionFlag> criteria;
    double wall_clock_s = 0.0;

    bool all_pass() const {
        for (const auto& c : criteria)
            if (!c.pass) return false;
        return true;
    }
    std::string to_json() const;
};

// Runs one scenario, writes CSV series and a JSON summary under cfg.out_dir.
// Throws UsageError for unknown scenarios and NumericalError on numerical
// failure (CLI exit codes 2 and 3).
ResultRecord run_scenario(const ExperimentConfig& cfg);

// worker-count helper honoring the PRLC_THREADS environment variable
int worker_count();

}  // namespace prlc
