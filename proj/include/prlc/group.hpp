#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "prlc/errors.hpp"
#include "prlc/lattice.hpp"
#include "prlc/rng.hpp"

namespace prlc {

enum class GroupTag { u1, su2 };

// Unit complex number.
struct U1 {
    double re = 1.0, im = 0.0;

    static U1 identity() { return {1.0, 0.0}; }
    static U1 from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }
    U1 inverse() const { return {re, -im}; }
    double norm2() const { return re * re + im * im; }
    void renormalize() {
        const double n = std::sqrt(norm2());
        re /= n;
        im /= n;
    }
    friend U1 operator*(U1 a, U1 b) {
        U1 r{a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
        r.renormalize();
        return r;
    }
};

// Unit quaternion (x, y, w, z); the matrix form is
//   [[ x+iy,  w+iz ],
//    [ -w+iz, x-iy ]]
// which is special unitary exactly when x^2+y^2+w^2+z^2 = 1. Re Tr = 2x.
struct SU2 {
    double x = 1.0, y = 0.0, w = 0.0, z = 0.0;

    static SU2 identity() { return {1.0, 0.0, 0.0, 0.0}; }
    SU2 inverse() const { return {x, -y, -w, -z}; }
    double norm2() const { return x * x + y * y + w * w + z * z; }
    void renormalize() {
        const double n = std::sqrt(norm2());
        x /= n;
        y /= n;
        w /= n;
        z /= n;
    }
    // Hamilton product; renormalized so unit norm survives long MCMC runs.
    friend SU2 operator*(const SU2& p, const SU2& q) {
        SU2 r{p.x * q.x - p.y * q.y - p.w * q.w - p.z * q.z,
              p.x * q.y + p.y * q.x + p.w * q.z - p.z * q.w,
              p.x * q.w - p.y * q.z + p.w * q.x + p.z * q.y,
              p.x * q.z + p.y * q.w - p.w * q.y + p.z * q.x};
        r.renormalize();
        return r;
    }
    // exp of the pure quaternion v (Lie algebra direction)
    static SU2 exp_pure(const double v[3]) {
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (n < 1e-300) return identity();
        const double s = std::sin(n) / n;
        return {std::cos(n), s * v[0], s * v[1], s * v[2]};
    }
};

// --- stereographic maps ------------------------------------------------------
// P_n(x) = ((4-|x|^2)/(4+|x|^2), 4x/(4+|x|^2)) lifts R^n to S^n; sigma_n is the
// inverse, undefined at the pole -e1. Points within kPoleEps of -e1 raise
// PoleError (an event of probability zero for the random fields here).
inline constexpr double kPoleEps = 1e-9;

// P_n: out has n+1 entries
void stereo_lift(const double* x, int n, double* out);
// sigma_n: point on S^n (n+1 entries) -> R^n
void stereo_project(const double* s, int n, double* out);

// log of the unnormalized density on R^n whose P_n-pushforward is the uniform
// law on S^n: -n log(4 + |x|^2)
double stereo_logweight(const double* x, int n);

// --- element-level helpers ---------------------------------------------------
inline double re_tr(U1 u) { return u.re; }          // Re(U)
inline double re_tr(const SU2& u) { return 2.0 * u.x; }  // Re Tr(U)

// squared distance to the identity: |1-U|^2 = 2-2Re(U), ||I-U||^2 = 4-2ReTr(U)
inline double norm_defect(U1 u) { return 2.0 - 2.0 * u.re; }
inline double norm_defect(const SU2& u) { return 4.0 - 4.0 * u.x; }

// --- model traits ------------------------------------------------------------
// U(1): Higgs values on S^1 are unit complex numbers.
// SU(2): a Higgs value phi in S^3 (subset of C^2) is stored as the unit
// quaternion h whose matrix has first column phi, i.e. phi = M(h) e1. Group
// action U.phi is then the quaternion product U h, and Re(phi^* psi) is the
// 4-vector dot product.

struct U1Model {
    using Group = U1;
    using Higgs = U1;
    static constexpr GroupTag tag = GroupTag::u1;
    static constexpr int a_components = 1;
    // H(U) = (1/2g^2) sum_p |1-U_p|^2 + alpha^2 * edge_h_factor * sum_e |1-U_e|^2
    static constexpr double edge_h_factor = 0.5;

    static double higgs_pair(Higgs a, Group u, Higgs b) {
        const U1 ub = u * b;
        return a.re * ub.re + a.im * ub.im;  // Re(conj(a) * u * b)
    }
    static Group gauge_theta(Higgs phi) { return phi.inverse(); }
    static Group apply_gauge(Group theta_x, Group u, Group theta_y) {
        return theta_x * u * theta_y.inverse();
    }
    static Higgs transform_higgs(Group theta, Higgs phi) { return theta * phi; }

    static void a_field(Group v, double g, double* out) {
        const double s[2] = {v.re, v.im};
        stereo_project(s, 1, out);
        out[0] /= g;
    }
    static Group a_lift(const double* a, double g) {
        const double x = g * a[0];
        double s[2];
        stereo_lift(&x, 1, s);
        if (2.0 * (1.0 + s[0]) < kPoleEps * kPoleEps)
            throw PoleError("a_lift: lifted point within pole-avoidance bound of -e1");
        return Group{s[0], s[1]};
    }
    static Group random_rotation(Rng& rng, double step) {
        return Group::from_angle(step * rng.normal());
    }
    static Higgs random_higgs(Rng& rng) { return Group::from_angle(rng.uniform(0.0, 6.283185307179586477)); }
    static double a_logweight(const double* a, double g) {
        const double x = g * a[0];
        return stereo_logweight(&x, 1);
    }
};

struct SU2Model {
    using Group = SU2;
    using Higgs = SU2;
    static constexpr GroupTag tag = GroupTag::su2;
    static constexpr int a_components = 3;
    static constexpr double edge_h_factor = 0.25;

    static double higgs_pair(const Higgs& a, const Group& u, const Higgs& b) {
        const SU2 ub = u * b;
        return a.x * ub.x + a.y * ub.y + a.w * ub.w + a.z * ub.z;
    }
    static Group gauge_theta(const Higgs& phi) { return phi.inverse(); }
    static Group apply_gauge(const Group& theta_x, const Group& u, const Group& theta_y) {
        return theta_x * u * theta_y.inverse();
    }
    static Higgs transform_higgs(const Group& theta, const Higgs& phi) { return theta * phi; }

    // A = (sqrt2/g) sigma_3(tau(V)); tau is the quaternion coordinate map
    static void a_field(const Group& v, double g, double* out) {
        const double s[4] = {v.x, v.y, v.w, v.z};
        stereo_project(s, 3, out);
        const double c = std::sqrt(2.0) / g;
        for (int k = 0; k < 3; ++k) out[k] *= c;
    }
    static Group a_lift(const double* a, double g) {
        const double c = g / std::sqrt(2.0);
        const double x[3] = {c * a[0], c * a[1], c * a[2]};
        double s[4];
        stereo_lift(x, 3, s);
        if (2.0 * (1.0 + s[0]) < kPoleEps * kPoleEps)
            throw PoleError("a_lift: lifted point within pole-avoidance bound of -e1");
        return Group{s[0], s[1], s[2], s[3]};
    }
    static Group random_rotation(Rng& rng, double step) {
        double n[3];
        rng.unit_vector3(n);
        const double mag = step * rng.normal();
        const double v[3] = {mag * n[0], mag * n[1], mag * n[2]};
        return Group::exp_pure(v);
    }
    static Higgs random_higgs(Rng& rng) {
        // uniform on S^3: normalized 4-dim Gaussian
        SU2 h{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        h.renormalize();
        return h;
    }
    static double a_logweight(const double* a, double g) {
        const double c = g / std::sqrt(2.0);
        const double x[3] = {c * a[0], c * a[1], c * a[2]};
        return stereo_logweight(x, 3);
    }
};

// --- configurations ----------------------------------------------------------
template <class M>
struct GaugeField {
    std::shared_ptr<const Lattice> lat;
    std::vector<typename M::Group> e;

    GaugeField() = default;
    explicit GaugeField(std::shared_ptr<const Lattice> l)
        : lat(std::move(l)), e(lat->n_edges(), M::Group::identity()) {}
};

template <class M>
struct HiggsConfig {
    std::shared_ptr<const Lattice> lat;
    std::vector<typename M::Higgs> s;

    HiggsConfig() = default;
    explicit HiggsConfig(std::shared_ptr<const Lattice> l)
        : lat(std::move(l)), s(lat->n_vertices(), M::Higgs::identity()) {}
};

// Unitary gauge fixing: V_e = theta_x U_e theta_y^{-1} with theta_x the unique
// element sending phi_x to the reference Higgs value; the transformed Higgs
// field is the reference everywhere.
template <class M>
GaugeField<M> gauge_fix(const GaugeField<M>& u, const HiggsConfig<M>& phi) {
    if (!u.lat || !phi.lat || !u.lat->same_shape(*phi.lat))
        throw std::invalid_argument("gauge_fix: configurations on different lattices");
    for (const auto& h : phi.s)
        if (std::abs(h.norm2() - 1.0) > 1e-9)
            throw std::invalid_argument("gauge_fix: Higgs values must be unit norm");
    GaugeField<M> v;
    v.lat = u.lat;
    v.e.resize(u.e.size());
    const Lattice& lat = *u.lat;
    for (int e = 0; e < lat.n_edges(); ++e) {
        const auto& ed = lat.edge(e);
        v.e[e] = M::apply_gauge(M::gauge_theta(phi.s[ed.tail]), u.e[e], M::gauge_theta(phi.s[ed.head]));
    }
    return v;
}

// Holonomy U_p = U_{e1} U_{e2} U_{e3}^{-1} U_{e4}^{-1} in the canonical edge order.
template <class M>
typename M::Group holonomy(const GaugeField<M>& u, int p) {
    const auto& pl = u.lat->plaquette(p);
    return u.e[pl.edge[0]] * u.e[pl.edge[1]] * u.e[pl.edge[2]].inverse() * u.e[pl.edge[3]].inverse();
}

// Stereographic A-field of a gauge-fixed configuration; counts pole hits in
// warn (if given), throws PoleError when an edge is at the pole.
template <class M>
EdgeField a_field(const GaugeField<M>& v, double g, Warnings* warn = nullptr) {
    if (g <= 0) throw std::invalid_argument("a_field: g must be positive");
    EdgeField out(v.lat, M::a_components);
    for (int e = 0; e < v.lat->n_edges(); ++e) {
        if (warn) {
            // |s - (-e1)|^2 = 2(1 + s1); count close approaches to the pole
            const double first = (M::a_components == 1) ? re_tr(v.e[e]) : 0.5 * re_tr(v.e[e]);
            if (2.0 * (1.0 + first) < 1e-12) warn->pole_count++;
        }
        M::a_field(v.e[e], g, out.ptr(e));
    }
    return out;
}

template <class M>
GaugeField<M> a_lift_field(const EdgeField& a, double g) {
    if (a.ncomp != M::a_components) throw std::invalid_argument("a_lift: component mismatch");
    GaugeField<M> v;
    v.lat = a.lat;
    v.e.resize(a.lat->n_edges());
    for (int e = 0; e < a.lat->n_edges(); ++e) v.e[e] = M::a_lift(a.ptr(e), g);
    return v;
}

}  // namespace prlc
