#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>

#include "prlc/scenarios.hpp"

// Exit codes: 0 all criteria pass, 1 criteria failed, 2 usage error,
// 3 numerical failure.
int main(int argc, char** argv) {
    CLI::App app{"lattice Yang-Mills-Higgs and Proca field experiment runner"};
    app.require_subcommand(1);

    std::string config_path, scenario_override, out_override;
    long seed_override = -1;

    CLI::App* run = app.add_subcommand("run", "run a scenario from a config file");
    run->add_option("config", config_path, "path to the key-value config document")->required();
    run->add_option("--scenario", scenario_override, "override the scenario in the config");
    run->add_option("--seed", seed_override, "override the seed in the config");
    run->add_option("--out", out_override, "override the output directory");

    CLI::App* list = app.add_subcommand("list", "list available scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (const auto& name : prlc::kScenarioNames) std::cout << name << "\n";
        return 0;
    }

    try {
        prlc::ExperimentConfig cfg = prlc::ExperimentConfig::from_file(config_path);
        if (!scenario_override.empty()) cfg.scenario = scenario_override;
        if (seed_override >= 0) {
            cfg.seed = static_cast<uint64_t>(seed_override);
            cfg.sampler.seed = cfg.seed;
        }
        if (!out_override.empty()) cfg.out_dir = out_override;

        const prlc::ResultRecord rec = prlc::run_scenario(cfg);
        for (const auto& r : rec.results)
            std::printf("  %-32s %.10g%s\n", r.name.c_str(), r.value,
                        r.se > 0 ? (" +- " + std::to_string(r.se)).c_str() : "");
        for (const auto& c : rec.criteria)
            std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        std::printf("%s: %s (%.1f s, artifacts in %s)\n", rec.scenario.c_str(),
                    rec.all_pass() ? "all criteria pass" : "CRITERIA FAILED", rec.wall_clock_s,
                    cfg.out_dir.c_str());
        return rec.all_pass() ? 0 : 1;
    } catch (const prlc::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const prlc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
