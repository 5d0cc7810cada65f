#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <vector>

#include "prlc/scenarios.hpp"

namespace prlc::detail {

inline double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// CSV sink; every row carries schema version and seed
class Csv {
  public:
    Csv(const std::string& dir, const std::string& name, int schema, uint64_t seed,
        const std::vector<std::string>& columns)
        : schema_(schema), seed_(seed) {
        std::filesystem::create_directories(dir);
        out_.open(dir + "/" + name);
        out_ << "schema_version,seed";
        for (const auto& c : columns) out_ << "," << c;
        out_ << "\n";
        out_.precision(17);
    }
    template <class... T>
    void row(T... vals) {
        out_ << schema_ << "," << seed_;
        ((out_ << "," << vals), ...);
        out_ << "\n";
    }

  private:
    std::ofstream out_;
    int schema_;
    uint64_t seed_;
};

inline void add_result(ResultRecord& rec, const std::string& name, double value, double se = 0.0) {
    rec.results.push_back({name, value, se});
}

inline void add_flag(ResultRecord& rec, const std::string& name, bool pass,
                     const std::string& detail) {
    rec.criteria.push_back({name, pass, detail});
}

inline std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return out;
}

inline std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

// run n independent jobs over worker_count() threads; job i writes its own slot
inline void run_parallel(int n, const std::function<void(int)>& job) {
    const int workers = std::min(n, worker_count());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) job(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) job(i);
        });
    for (auto& t : pool) t.join();
}

// scenario entry points
void scenario_verify_kernel(const ExperimentConfig&, ResultRecord&);
void scenario_verify_stereo(const ExperimentConfig&, ResultRecord&);
void scenario_proca_cov(const ExperimentConfig&, ResultRecord&);
void scenario_proca_conditional(const ExperimentConfig&, ResultRecord&);
void scenario_proca_converge(const ExperimentConfig&, ResultRecord&);
void scenario_scaling_identity(const ExperimentConfig&, ResultRecord&);
void scenario_mass_fit(const ExperimentConfig&, ResultRecord&);
void scenario_masslmm_prefactor(const ExperimentConfig&, ResultRecord&);
void scenario_ym_sample(const ExperimentConfig&, ResultRecord&);
void scenario_gaugefix_consistency(const ExperimentConfig&, ResultRecord&);
void scenario_key_estimate(const ExperimentConfig&, ResultRecord&);
void scenario_ym_vs_proca(const ExperimentConfig&, ResultRecord&);

}  // namespace prlc::detail
