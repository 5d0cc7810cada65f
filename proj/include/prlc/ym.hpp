#pragma once

#include <cmath>
#include <memory>

#include "prlc/group.hpp"
#include "prlc/lattice.hpp"

namespace prlc {

// Couplings and scaling-scenario bookkeeping.
//
// The scaling scenario ties alpha*g = c*eps. The delta/delta0/window defaults
// follow the recipe delta = g^{1-a*kappa}, delta0 = g^{1-b*kappa},
// M = floor(sqrt(2) g^{-4 kappa}) with b = 2d+1 and a = 6d.
struct ModelParams {
    int d = 2;
    int half_width = 4;
    BoundaryMode mode = BoundaryMode::torus;
    GroupTag group = GroupTag::su2;
    double g = 0.5;       // gauge coupling
    double alpha = 1.5;   // Higgs length
    double c = 1.0;       // target mass in the scaling scenario
    double eps = 0.25;    // lattice spacing
    double kappa = 0.0;   // decay exponent of g (0 = scenario inactive)
    double delta = 0.5;
    double delta0 = 0.25;
    int window_m = 2;

    bool scaling_active() const { return kappa > 0.0; }

    void validate(bool key_estimate_checks = false) const {
        if (d < 2 || half_width < 1) throw std::invalid_argument("ModelParams: bad lattice shape");
        if (g <= 0 || alpha <= 0 || eps <= 0) throw std::invalid_argument("ModelParams: couplings must be positive");
        if (scaling_active() && std::abs(alpha * g - c * eps) > 1e-12 * std::max(1.0, c * eps))
            throw std::invalid_argument("ModelParams: scaling scenario requires alpha*g = c*eps");
        if (delta0 >= delta) throw std::invalid_argument("ModelParams: need delta0 < delta");
        if (key_estimate_checks && (alpha < 2.0 || alpha * g > 1.0))
            throw std::invalid_argument("ModelParams: key-estimate checks need alpha >= 2 and alpha*g <= 1");
    }

    // delta/delta0/M from the kappa recipe (a = 6d, b = 2d+1)
    void apply_threshold_recipe() {
        if (!scaling_active()) throw std::invalid_argument("threshold recipe needs kappa > 0");
        const double a = 6.0 * d, b = 2.0 * d + 1.0;
        delta = std::pow(g, 1.0 - a * kappa);
        delta0 = std::pow(g, 1.0 - b * kappa);
        window_m = static_cast<int>(std::floor(std::sqrt(2.0) * std::pow(g, -4.0 * kappa)));
    }

    std::shared_ptr<const Lattice> make_lattice() const { return build_lattice(d, half_width, mode); }
};

// S(U, phi) = (1/g^2) sum_p ReTr(U_p) + alpha^2 sum_e Re(phi_x^* U_e phi_y)
template <class M>
double action_eval(const GaugeField<M>& u, const HiggsConfig<M>& phi, const ModelParams& par) {
    if (!u.lat || !phi.lat || !u.lat->same_shape(*phi.lat))
        throw std::invalid_argument("action_eval: configurations on different lattices");
    const Lattice& lat = *u.lat;
    double sp = 0.0;
    for (int p = 0; p < lat.n_plaquettes(); ++p) sp += re_tr(holonomy(u, p));
    double se = 0.0;
    for (int e = 0; e < lat.n_edges(); ++e) {
        const auto& ed = lat.edge(e);
        se += M::higgs_pair(phi.s[ed.tail], u.e[e], phi.s[ed.head]);
    }
    return sp / (par.g * par.g) + par.alpha * par.alpha * se;
}

// H(V) = (1/2g^2) sum_p ||I-V_p||^2 + alpha^2 * f_e * sum_e ||I-V_e||^2,
// with f_e = 1/4 for SU(2) and 1/2 for U(1). Zero exactly at V = I, and
// exp(-H(V)) is proportional to exp(S(V, trivial Higgs)).
template <class M>
double hamiltonian_eval(const GaugeField<M>& v, const ModelParams& par) {
    const Lattice& lat = *v.lat;
    double hp = 0.0;
    for (int p = 0; p < lat.n_plaquettes(); ++p) hp += norm_defect(holonomy(v, p));
    double he = 0.0;
    for (const auto& g : v.e) he += norm_defect(g);
    return hp / (2.0 * par.g * par.g) + par.alpha * par.alpha * M::edge_h_factor * he;
}

// Exact unnormalized log-density of the A-field at B: -H(lift(B)) plus the
// stereographic weights. No truncated small-g expansion is involved.
double a_logdensity(const EdgeField& b, const ModelParams& par);

// ||A_e|| threshold equivalent to ||I - V_e|| <= delta (delta0 on the boundary).
double event_threshold(const ModelParams& par, bool boundary);

// alpha*g/sqrt(2) for SU(2), alpha*g for U(1)
double proca_mass_parameter(const ModelParams& par);

// runtime-dispatch conveniences used by the CLI layer
double action_eval_u1(const GaugeField<U1Model>&, const HiggsConfig<U1Model>&, const ModelParams&);
double action_eval_su2(const GaugeField<SU2Model>&, const HiggsConfig<SU2Model>&, const ModelParams&);

}  // namespace prlc
