#include "prlc/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace prlc {

const std::vector<std::string> kScenarioNames = {
    "verify-kernel",    "verify-stereo",     "proca-cov",       "proca-converge",
    "proca-conditional", "ym-sample",        "ym-vs-proca",     "gaugefix-consistency",
    "key-estimate",     "mass-fit",          "scaling-identity", "masslmm-prefactor"};

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(const std::string& text) {
    KeyValueDoc doc;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config: expected 'key = value', got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw UsageError("config: empty key in line: " + line);
        doc.kv_[section.empty() ? key : section + "." + key] = value;
    }
    return doc;
}

KeyValueDoc KeyValueDoc::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string KeyValueDoc::serialize() const {
    // bare keys first, then sections in sorted order
    std::ostringstream os;
    for (const auto& [key, value] : kv_)
        if (key.find('.') == std::string::npos) os << key << " = " << value << "\n";
    std::string current;
    for (const auto& [key, value] : kv_) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) continue;
        const std::string section = key.substr(0, dot);
        if (section != current) {
            os << "\n[" << section << "]\n";
            current = section;
        }
        os << key.substr(dot + 1) << " = " << value << "\n";
    }
    return os.str();
}

std::string KeyValueDoc::get(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double KeyValueDoc::get_num(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw UsageError("config: key '" + key + "' is not a number: " + it->second);
    }
}

long KeyValueDoc::get_int(const std::string& key, long fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        return std::stol(it->second);
    } catch (const std::exception&) {
        throw UsageError("config: key '" + key + "' is not an integer: " + it->second);
    }
}

std::vector<double> KeyValueDoc::get_list(const std::string& key,
                                          const std::vector<double>& fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

void KeyValueDoc::set_num(const std::string& key, double v) { kv_[key] = fmt_num(v); }
void KeyValueDoc::set_int(const std::string& key, long v) { kv_[key] = std::to_string(v); }

ExperimentConfig ExperimentConfig::from_doc(const KeyValueDoc& doc) {
    ExperimentConfig cfg;
    cfg.schema_version = static_cast<int>(doc.get_int("schema_version", kSchemaVersion));
    if (cfg.schema_version != kSchemaVersion)
        throw UsageError("config: unsupported schema_version " + std::to_string(cfg.schema_version));
    cfg.scenario = doc.get("scenario", "");
    cfg.seed = static_cast<uint64_t>(doc.get_int("seed", 12345));
    cfg.out_dir = doc.get("out_dir", "out");

    ModelParams& m = cfg.model;
    const std::string group = doc.get("model.group", "su2");
    if (group == "su2")
        m.group = GroupTag::su2;
    else if (group == "u1")
        m.group = GroupTag::u1;
    else
        throw UsageError("config: model.group must be u1 or su2");
    m.d = static_cast<int>(doc.get_int("model.d", 2));
    m.half_width = static_cast<int>(doc.get_int("model.half_width", 4));
    const std::string mode = doc.get("model.mode", "torus");
    if (mode == "torus")
        m.mode = BoundaryMode::torus;
    else if (mode == "free")
        m.mode = BoundaryMode::free;
    else
        throw UsageError("config: model.mode must be torus or free");
    m.g = doc.get_num("model.g", m.g);
    m.alpha = doc.get_num("model.alpha", m.alpha);
    m.c = doc.get_num("model.c", m.c);
    m.eps = doc.get_num("model.eps", m.eps);
    m.kappa = doc.get_num("model.kappa", m.kappa);
    m.delta = doc.get_num("model.delta", m.delta);
    m.delta0 = doc.get_num("model.delta0", m.delta0);
    m.window_m = static_cast<int>(doc.get_int("model.window_m", m.window_m));

    SamplerConfig& s = cfg.sampler;
    s.step = doc.get_num("sampler.step", s.step);
    s.higgs_step = doc.get_num("sampler.higgs_step", s.higgs_step);
    s.sweeps = doc.get_int("sampler.sweeps", s.sweeps);
    s.burnin = doc.get_int("sampler.burnin", s.burnin);
    s.thin = doc.get_int("sampler.thin", s.thin);
    s.checkpoint_every = doc.get_int("sampler.checkpoint_every", s.checkpoint_every);
    s.seed = cfg.seed;

    cfg.eps_list = doc.get_list("lattice.eps_list", cfg.eps_list);
    cfg.gaussian_width = doc.get_num("forms.gaussian_width", cfg.gaussian_width);
    cfg.bump_radius = doc.get_num("forms.bump_radius", cfg.bump_radius);
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_doc(KeyValueDoc::from_file(path));
}

KeyValueDoc ExperimentConfig::to_doc() const {
    KeyValueDoc doc;
    doc.set_int("schema_version", schema_version);
    doc.set("scenario", scenario);
    doc.set_int("seed", static_cast<long>(seed));
    doc.set("out_dir", out_dir);

    doc.set("model.group", model.group == GroupTag::su2 ? "su2" : "u1");
    doc.set_int("model.d", model.d);
    doc.set_int("model.half_width", model.half_width);
    doc.set("model.mode", model.mode == BoundaryMode::torus ? "torus" : "free");
    doc.set_num("model.g", model.g);
    doc.set_num("model.alpha", model.alpha);
    doc.set_num("model.c", model.c);
    doc.set_num("model.eps", model.eps);
    doc.set_num("model.kappa", model.kappa);
    doc.set_num("model.delta", model.delta);
    doc.set_num("model.delta0", model.delta0);
    doc.set_int("model.window_m", model.window_m);

    doc.set_num("sampler.step", sampler.step);
    doc.set_num("sampler.higgs_step", sampler.higgs_step);
    doc.set_int("sampler.sweeps", sampler.sweeps);
    doc.set_int("sampler.burnin", sampler.burnin);
    doc.set_int("sampler.thin", sampler.thin);
    doc.set_int("sampler.checkpoint_every", sampler.checkpoint_every);

    std::string eps;
    for (size_t i = 0; i < eps_list.size(); ++i) {
        if (i) eps += ",";
        std::ostringstream os;
        os.precision(17);
        os << eps_list[i];
        eps += os.str();
    }
    doc.set("lattice.eps_list", eps);
    doc.set_num("forms.gaussian_width", gaussian_width);
    doc.set_num("forms.bump_radius", bump_radius);
    return doc;
}

void ExperimentConfig::require_known_scenario() const {
    if (std::find(kScenarioNames.begin(), kScenarioNames.end(), scenario) == kScenarioNames.end())
        throw UsageError("unknown scenario '" + scenario + "'");
}

}  // namespace prlc
