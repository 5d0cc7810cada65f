#include "prlc/ym.hpp"

namespace prlc {

namespace {

template <class M>
double a_logdensity_impl(const EdgeField& b, const ModelParams& par) {
    b.check_finite();
    GaugeField<M> v = a_lift_field<M>(b, par.g);
    double logw = 0.0;
    for (int e = 0; e < b.lat->n_edges(); ++e) logw += M::a_logweight(b.ptr(e), par.g);
    return -hamiltonian_eval(v, par) + logw;
}

}  // namespace

double a_logdensity(const EdgeField& b, const ModelParams& par) {
    if (!b.lat) throw std::invalid_argument("a_logdensity: field without lattice");
    if (par.group == GroupTag::u1) {
        if (b.ncomp != 1) throw std::invalid_argument("a_logdensity: U(1) needs a scalar field");
        return a_logdensity_impl<U1Model>(b, par);
    }
    if (b.ncomp != 3) throw std::invalid_argument("a_logdensity: SU(2) needs a 3-component field");
    return a_logdensity_impl<SU2Model>(b, par);
}

double event_threshold(const ModelParams& par, bool boundary) {
    const double del = boundary ? par.delta0 : par.delta;
    if (del <= 0.0 || del >= 2.0) throw std::invalid_argument("event_threshold: delta out of (0, 2)");
    if (par.group == GroupTag::su2)
        return std::pow(2.0, 1.5) * del / (par.g * std::sqrt(8.0 - del * del));
    return 2.0 * del / (par.g * std::sqrt(4.0 - del * del));
}

double proca_mass_parameter(const ModelParams& par) {
    par.validate();
    return par.group == GroupTag::su2 ? par.alpha * par.g / std::sqrt(2.0) : par.alpha * par.g;
}

double action_eval_u1(const GaugeField<U1Model>& u, const HiggsConfig<U1Model>& phi,
                      const ModelParams& par) {
    return action_eval<U1Model>(u, phi, par);
}
double action_eval_su2(const GaugeField<SU2Model>& u, const HiggsConfig<SU2Model>& phi,
                       const ModelParams& par) {
    return action_eval<SU2Model>(u, phi, par);
}

}  // namespace prlc
