#include <doctest.h>

#include <filesystem>

#include "prlc/checkpoint.hpp"
#include "prlc/scenarios.hpp"

using namespace prlc;

TEST_CASE("config parse / serialize round trip is the identity") {
    const std::string text = R"(
# experiment configuration
schema_version = 1
scenario = verify-kernel
seed = 777
out_dir = /tmp/prlc-test

[model]
group = u1
d = 2
half_width = 3
g = 0.25
alpha = 4.0

[sampler]
sweeps = 5000
burnin = 500

[lattice]
eps_list = 0.5,0.25
)";
    const KeyValueDoc doc = KeyValueDoc::parse(text);
    const KeyValueDoc again = KeyValueDoc::parse(doc.serialize());
    CHECK(doc.items() == again.items());
    CHECK(doc.get("model.group", "") == "u1");
    CHECK(doc.get_num("model.g", 0.0) == doctest::Approx(0.25));
    CHECK(doc.get_int("sampler.sweeps", 0) == 5000);
    const auto eps = doc.get_list("lattice.eps_list", {});
    REQUIRE(eps.size() == 2);
    CHECK(eps[1] == doctest::Approx(0.25));

    // full ExperimentConfig round trip through its canonical document
    const ExperimentConfig cfg = ExperimentConfig::from_doc(doc);
    const KeyValueDoc canon = cfg.to_doc();
    const ExperimentConfig cfg2 = ExperimentConfig::from_doc(canon);
    CHECK(cfg2.to_doc().serialize() == canon.serialize());
    CHECK(cfg2.seed == 777);
    CHECK(cfg2.model.group == GroupTag::u1);
    CHECK(cfg2.model.half_width == 3);

    CHECK_THROWS_AS(KeyValueDoc::parse("not a key value line"), UsageError);
    CHECK_THROWS_AS(ExperimentConfig::from_doc(KeyValueDoc::parse("schema_version = 9")), UsageError);
}

TEST_CASE("unknown scenario raises a usage error") {
    ExperimentConfig cfg;
    cfg.scenario = "foo";
    CHECK_THROWS_AS(run_scenario(cfg), UsageError);
}

TEST_CASE("checkpoint round trip is bit exact and resumable") {
    ModelParams par;
    par.d = 2;
    par.half_width = 2;
    par.mode = BoundaryMode::torus;
    par.group = GroupTag::su2;
    par.g = 0.5;
    par.alpha = 1.5;
    SamplerConfig scfg;
    scfg.sweeps = 100;
    scfg.burnin = 10;
    scfg.seed = 31337;
    auto lat = par.make_lattice();

    const std::string path = (std::filesystem::temp_directory_path() / "prlc_test.ckpt").string();

    // run 100 sweeps straight through
    auto full = make_joint_chain<SU2Model>(lat, par, scfg, 5);
    for (int s = 0; s < 100; ++s) metropolis_sweep(full, par, scfg);

    // run 50, checkpoint, reload, run 50 more
    auto half = make_joint_chain<SU2Model>(lat, par, scfg, 5);
    for (int s = 0; s < 50; ++s) metropolis_sweep(half, par, scfg);
    save_checkpoint(path, half);

    const CheckpointInfo info = peek_checkpoint(path);
    CHECK(info.group == GroupTag::su2);
    CHECK(info.mode == BoundaryMode::torus);
    CHECK(info.joint);
    CHECK(info.d == 2);
    CHECK(info.half_width == 2);
    CHECK(info.sweep == 50);

    JointChain<SU2Model> resumed;
    load_checkpoint(path, resumed);
    resumed.energy = -action_eval(resumed.u, resumed.phi, par);
    for (int s = 0; s < 50; ++s) metropolis_sweep(resumed, par, scfg);

    CHECK(resumed.sweep == full.sweep);
    for (size_t e = 0; e < full.u.e.size(); ++e) {
        CHECK(resumed.u.e[e].x == full.u.e[e].x);
        CHECK(resumed.u.e[e].y == full.u.e[e].y);
        CHECK(resumed.u.e[e].w == full.u.e[e].w);
        CHECK(resumed.u.e[e].z == full.u.e[e].z);
    }
    for (size_t v = 0; v < full.phi.s.size(); ++v) {
        CHECK(resumed.phi.s[v].x == full.phi.s[v].x);
        CHECK(resumed.phi.s[v].z == full.phi.s[v].z);
    }

    // kind mismatch is rejected
    FixedChain<SU2Model> wrong;
    CHECK_THROWS_AS(load_checkpoint(path, wrong), NumericalError);
    std::filesystem::remove(path);
}

TEST_CASE("fixed-chain checkpoints round trip for both groups") {
    ModelParams par;
    par.group = GroupTag::u1;
    par.half_width = 1;
    SamplerConfig scfg;
    scfg.sweeps = 40;
    scfg.burnin = 5;
    scfg.seed = 9;
    auto chain = make_fixed_chain<U1Model>(par.make_lattice(), par, scfg, 2);
    for (int s = 0; s < 30; ++s) metropolis_sweep(chain, par, scfg);
    const std::string path = (std::filesystem::temp_directory_path() / "prlc_fixed.ckpt").string();
    save_checkpoint(path, chain);
    FixedChain<U1Model> back;
    load_checkpoint(path, back);
    CHECK(back.sweep == 30);
    for (size_t e = 0; e < chain.v.e.size(); ++e) {
        CHECK(back.v.e[e].re == chain.v.e[e].re);
        CHECK(back.v.e[e].im == chain.v.e[e].im);
    }
    std::filesystem::remove(path);
}

TEST_CASE("run_scenario smoke: verify-kernel passes and is deterministic") {
    ExperimentConfig cfg;
    cfg.scenario = "verify-kernel";
    cfg.out_dir = (std::filesystem::temp_directory_path() / "prlc_out").string();
    const ResultRecord a = run_scenario(cfg);
    CHECK(a.all_pass());
    CHECK(a.scenario == "verify-kernel");
    CHECK(!a.results.empty());
    const ResultRecord b = run_scenario(cfg);
    REQUIRE(a.results.size() == b.results.size());
    for (size_t i = 0; i < a.results.size(); ++i) CHECK(a.results[i].value == b.results[i].value);
    // artifacts exist: one CSV per series plus a JSON summary, rows carry
    // schema version and seed
    CHECK(std::filesystem::exists(cfg.out_dir + "/verify-kernel.csv"));
    CHECK(std::filesystem::exists(cfg.out_dir + "/verify-kernel.json"));
    const std::string json = a.to_json();
    CHECK(json.find("\"criteria\"") != std::string::npos);
    std::filesystem::remove_all(cfg.out_dir);
}
