#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "prlc/group.hpp"
#include "prlc/rng.hpp"
#include "prlc/ym.hpp"

namespace prlc {

struct SamplerConfig {
    double step = 0.3;        // initial rotation-angle scale for edge proposals
    double higgs_step = 0.3;  // rotation scale for Higgs proposals (joint mode)
    long sweeps = 10000;
    long burnin = 1000;
    long thin = 1;
    uint64_t seed = 1;
    double acc_lo = 0.3, acc_hi = 0.6;  // target acceptance window
    long tune_interval = 100;           // during burn-in only
    long drift_check_interval = 1000;
    long checkpoint_every = 0;  // 0 = only on request

    void validate() const {
        if (step <= 0 || higgs_step <= 0) throw std::invalid_argument("SamplerConfig: step sizes must be positive");
        if (burnin >= sweeps) throw std::invalid_argument("SamplerConfig: burn-in must be smaller than sweeps");
        if (thin < 1) throw std::invalid_argument("SamplerConfig: thin >= 1");
    }
};

inline double accept_probability(double delta_h) {
    if (std::isnan(delta_h)) throw NumericalError("accept_probability: NaN energy difference");
    return delta_h <= 0.0 ? 1.0 : std::exp(-delta_h);
}

struct Diagnostics {
    double tau;  // integrated autocorrelation time
    double ess;  // N / tau
};

// Initial-positive-sequence estimator of the integrated autocorrelation time.
Diagnostics diagnostics(const std::vector<double>& series);

// mean, and standard error of the mean corrected by the autocorrelation time
struct SeriesStats {
    double mean;
    double se;
    double tau;
    double ess;
};
SeriesStats series_stats(const std::vector<double>& series);

// --- chains -------------------------------------------------------------------
// One chain owns its state exclusively; parallelism is across chains. The RNG
// stream for sweep k is Rng(seed, chain_id, k), so trajectories are
// reproducible for a fixed (seed, chain_id) regardless of the thread layout.

template <class M>
struct JointChain {
    GaugeField<M> u;
    HiggsConfig<M> phi;
    double energy = 0.0;  // -S(U, phi)
    long sweep = 0;
    double edge_step, higgs_step;
    uint64_t seed = 0, chain_id = 0;
    long acc_edge = 0, try_edge = 0, acc_site = 0, try_site = 0;  // tuning window
    double last_edge_acc = 0.0, last_site_acc = 0.0;
};

template <class M>
struct FixedChain {
    GaugeField<M> v;
    double energy = 0.0;  // H(V)
    long sweep = 0;
    double edge_step;
    uint64_t seed = 0, chain_id = 0;
    long acc_edge = 0, try_edge = 0;
    double last_edge_acc = 0.0;
};

template <class M>
JointChain<M> make_joint_chain(std::shared_ptr<const Lattice> lat, const ModelParams& par,
                               const SamplerConfig& cfg, uint64_t chain_id) {
    JointChain<M> c;
    c.u = GaugeField<M>(lat);
    c.phi = HiggsConfig<M>(std::move(lat));
    c.energy = -action_eval(c.u, c.phi, par);
    c.edge_step = cfg.step;
    c.higgs_step = cfg.higgs_step;
    c.seed = cfg.seed;
    c.chain_id = chain_id;
    return c;
}

template <class M>
FixedChain<M> make_fixed_chain(std::shared_ptr<const Lattice> lat, const ModelParams& par,
                               const SamplerConfig& cfg, uint64_t chain_id) {
    FixedChain<M> c;
    c.v = GaugeField<M>(std::move(lat));
    c.energy = hamiltonian_eval(c.v, par);
    c.edge_step = cfg.step;
    c.seed = cfg.seed;
    c.chain_id = chain_id;
    return c;
}

namespace detail {

// change in sum_{p ni e} ReTr(U_p) if edge e is set to cand
template <class M>
double plaq_retr_delta(const GaugeField<M>& u, int e, const typename M::Group& cand) {
    const Lattice& lat = *u.lat;
    double delta = 0.0;
    for (int p : lat.plaquettes_of_edge(e)) {
        const auto& pl = lat.plaquette(p);
        typename M::Group before = M::Group::identity(), after = M::Group::identity();
        for (int s = 0; s < 4; ++s) {
            const int eid = pl.edge[s];
            const auto& cur = u.e[eid];
            const auto& alt = (eid == e) ? cand : cur;
            if (s < 2) {
                before = before * cur;
                after = after * alt;
            } else {
                before = before * cur.inverse();
                after = after * alt.inverse();
            }
        }
        delta += re_tr(after) - re_tr(before);
    }
    return delta;
}

inline void tune_step(double& step, long acc, long tries, double lo, double hi) {
    if (tries == 0) return;
    const double rate = static_cast<double>(acc) / tries;
    if (rate > hi)
        step = std::min(step * 1.3, 3.0);
    else if (rate < lo)
        step = std::max(step / 1.3, 1e-12);
}

}  // namespace detail

// One full pass over edges and sites of the joint (U, phi) chain targeting
// exp(S). Step sizes are tuned toward the acceptance window during burn-in
// only; the cached energy is drift-checked against a full recomputation.
template <class M>
void metropolis_sweep(JointChain<M>& c, const ModelParams& par, const SamplerConfig& cfg) {
    const Lattice& lat = *c.u.lat;
    Rng rng(c.seed, c.chain_id, static_cast<uint64_t>(c.sweep));
    const double g2 = par.g * par.g, a2 = par.alpha * par.alpha;

    for (int e = 0; e < lat.n_edges(); ++e) {
        const auto& ed = lat.edge(e);
        const typename M::Group cand = M::random_rotation(rng, c.edge_step) * c.u.e[e];
        double dS = detail::plaq_retr_delta(c.u, e, cand) / g2;
        dS += a2 * (M::higgs_pair(c.phi.s[ed.tail], cand, c.phi.s[ed.head]) -
                    M::higgs_pair(c.phi.s[ed.tail], c.u.e[e], c.phi.s[ed.head]));
        c.try_edge++;
        if (rng.uniform() < accept_probability(-dS)) {
            c.u.e[e] = cand;
            c.energy -= dS;
            c.acc_edge++;
        }
    }
    for (int x = 0; x < lat.n_vertices(); ++x) {
        const typename M::Higgs cand = M::transform_higgs(M::random_rotation(rng, c.higgs_step), c.phi.s[x]);
        double dS = 0.0;
        for (auto [e, orient] : lat.vertex_edges(x)) {
            const auto& ed = lat.edge(e);
            const auto& tail = (orient > 0) ? cand : c.phi.s[ed.tail];
            const auto& head = (orient > 0) ? c.phi.s[ed.head] : cand;
            dS += M::higgs_pair(tail, c.u.e[e], head) -
                  M::higgs_pair(c.phi.s[ed.tail], c.u.e[e], c.phi.s[ed.head]);
        }
        dS *= a2;
        c.try_site++;
        if (rng.uniform() < accept_probability(-dS)) {
            c.phi.s[x] = cand;
            c.energy -= dS;
            c.acc_site++;
        }
    }

    c.sweep++;
    if (c.sweep <= cfg.burnin && c.sweep % cfg.tune_interval == 0) {
        detail::tune_step(c.edge_step, c.acc_edge, c.try_edge, cfg.acc_lo, cfg.acc_hi);
        detail::tune_step(c.higgs_step, c.acc_site, c.try_site, cfg.acc_lo, cfg.acc_hi);
        c.last_edge_acc = c.try_edge ? static_cast<double>(c.acc_edge) / c.try_edge : 0.0;
        c.last_site_acc = c.try_site ? static_cast<double>(c.acc_site) / c.try_site : 0.0;
        c.acc_edge = c.try_edge = c.acc_site = c.try_site = 0;
    }
    if (c.sweep % cfg.drift_check_interval == 0) {
        const double fresh = -action_eval(c.u, c.phi, par);
        if (std::abs(fresh - c.energy) > 1e-6 * std::max(1.0, std::abs(fresh)))
            throw IntegrityError("joint chain energy drift at sweep " + std::to_string(c.sweep));
        c.energy = fresh;
    }
}

// One full pass over edges of the gauge-fixed chain targeting exp(-H).
template <class M>
void metropolis_sweep(FixedChain<M>& c, const ModelParams& par, const SamplerConfig& cfg) {
    const Lattice& lat = *c.v.lat;
    Rng rng(c.seed, c.chain_id, static_cast<uint64_t>(c.sweep));
    const double g2 = par.g * par.g, a2 = par.alpha * par.alpha;

    for (int e = 0; e < lat.n_edges(); ++e) {
        const typename M::Group cand = M::random_rotation(rng, c.edge_step) * c.v.e[e];
        // H uses ||I-U||^2 = (4 or 2) - 2 ReTr, so dH = -(dReTr)/g^2 - ...
        double dH = -detail::plaq_retr_delta(c.v, e, cand) / g2;
        dH += a2 * M::edge_h_factor * (norm_defect(cand) - norm_defect(c.v.e[e]));
        c.try_edge++;
        if (rng.uniform() < accept_probability(dH)) {
            c.v.e[e] = cand;
            c.energy += dH;
            c.acc_edge++;
        }
    }

    c.sweep++;
    if (c.sweep <= cfg.burnin && c.sweep % cfg.tune_interval == 0) {
        detail::tune_step(c.edge_step, c.acc_edge, c.try_edge, cfg.acc_lo, cfg.acc_hi);
        c.last_edge_acc = c.try_edge ? static_cast<double>(c.acc_edge) / c.try_edge : 0.0;
        c.acc_edge = c.try_edge = 0;
    }
    if (c.sweep % cfg.drift_check_interval == 0) {
        const double fresh = hamiltonian_eval(c.v, par);
        if (std::abs(fresh - c.energy) > 1e-6 * std::max(1.0, std::abs(fresh)))
            throw IntegrityError("fixed chain energy drift at sweep " + std::to_string(c.sweep));
        c.energy = fresh;
    }
}

}  // namespace prlc
