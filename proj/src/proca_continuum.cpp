#include "prlc/proca_continuum.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <array>
#include <cmath>
#include <complex>
#include <string>

namespace prlc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// fixed-order Gauss-Legendre nodes/weights on [-1, 1]
struct GaussRule {
    std::vector<double> x, w;
    explicit GaussRule(int n) {
        // Newton iteration on Legendre polynomials
        x.resize(n);
        w.resize(n);
        for (int i = 0; i < n; ++i) {
            double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                const double dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[i] = t;
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

const GaussRule& quad_rule() {
    static const GaussRule rule(48);
    return rule;
}

const GaussRule& arc_rule() {
    static const GaussRule rule(24);
    return rule;
}

// Chebyshev barycentric interpolant on [lo, hi]; used to cache the smooth
// angular integral of the kernel-weighted quadratures
class ChebInterp {
  public:
    template <class F>
    ChebInterp(double lo, double hi, int n, const F& f) : lo_(lo), hi_(hi), x_(n + 1), v_(n + 1) {
        for (int k = 0; k <= n; ++k) {
            x_[k] = std::cos(kPi * k / n);
            v_[k] = f(map(x_[k]));
        }
    }
    double operator()(double r) const {
        const double t = 2.0 * (r - lo_) / (hi_ - lo_) - 1.0;
        const int n = static_cast<int>(x_.size()) - 1;
        double num = 0.0, den = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double diff = t - x_[k];
            if (std::abs(diff) < 1e-14) return v_[k];
            double w = (k % 2 == 0) ? 1.0 : -1.0;
            if (k == 0 || k == n) w *= 0.5;
            const double q = w / diff;
            num += q * v_[k];
            den += q;
        }
        return num / den;
    }

  private:
    double map(double t) const { return 0.5 * (lo_ + hi_) + 0.5 * (hi_ - lo_) * t; }
    double lo_, hi_;
    std::vector<double> x_, v_;
};

}  // namespace

double k_lambda(double r, double lam, int d) {
    if (r <= 0.0) throw SingularityError("k_lambda: r must be positive (K_lambda(0) = infinity)");
    if (lam <= 0.0 || d < 2) throw std::invalid_argument("k_lambda: need lambda > 0 and d >= 2");

    // factored integrand exp(-(r - 2 sqrt(lam) t)^2 / 4t) in log time t = e^u;
    // the left shoulder dies below t = r^2/3000, the right one above
    // t = (800 + sqrt(lam) r) / lam, and the peak sits at t* = r/(2 sqrt(lam))
    const double sq = std::sqrt(lam);
    const double half_d = 0.5 * d;
    auto g = [=](double u) {
        const double t = std::exp(u);
        const double w = r - 2.0 * sq * t;
        const double ex = -w * w / (4.0 * t);
        if (ex < -745.0) return 0.0;
        return std::pow(4.0 * kPi * t, -half_d) * std::exp(ex) * t;
    };
    const double ulo = std::log(r * r / 3000.0);
    const double uhi = std::log((800.0 + sq * r) / lam);
    const double ustar = std::min(std::max(std::log(r / (2.0 * sq)), ulo), uhi);

    double err1 = 0.0, err2 = 0.0;
    const double i1 = GK::integrate(g, ulo, ustar, 15, 1e-14, &err1);
    const double i2 = GK::integrate(g, ustar, uhi, 15, 1e-14, &err2);
    const double total = i1 + i2;
    if (total > 0.0 && (err1 + err2) / total > 1e-9)
        throw NumericalError("k_lambda: quadrature did not reach 1e-9 relative accuracy (achieved " +
                             std::to_string((err1 + err2) / total) + ")");
    return std::exp(-sq * r) * total;
}

double k_lambda_asymptotic(double r, double lam, int d) {
    if (r <= 0.0) throw SingularityError("k_lambda_asymptotic: r must be positive");
    return std::pow(lam, 0.25 * (d - 3)) * std::exp(-std::sqrt(lam) * r) /
           (2.0 * std::pow(kTwoPi, 0.5 * (d - 1)) * std::pow(r, 0.5 * (d - 1)));
}

double QApplied::value(int i, const double* x) const {
    const int d = f_.dim();
    std::vector<double> hess(d * d);
    double out = lam_ * f_.value(i, x);
    for (int j = 0; j < d; ++j) {
        f_.hessian(j, x, hess.data());
        if (j == i) {
            double tr = 0.0;
            for (int k = 0; k < d; ++k) tr += hess[k * d + k];
            out -= tr;  // -Laplacian f_i
        }
        out += hess[i * d + j];  // d_i d_j f_j
    }
    return out;
}

namespace {

// int A(v) B(v - u) dv by tensor Gauss-Legendre over the intersection of the
// envelope balls. eval(i < 0) means the divergence.
class Correlator {
  public:
    Correlator(const FormLike& a, const FormLike& b) : a_(a), b_(b), d_(a.dim()) {
        ca_.resize(d_);
        cb_.resize(d_);
        a_.envelope(ca_.data(), &ra_);
        b_.envelope(cb_.data(), &rb_);
    }

    int dim() const { return d_; }
    // envelope ball of u -> correlation(u): center ca - cb, radius ra + rb
    void support(double* center, double* radius) const {
        for (int k = 0; k < d_; ++k) center[k] = ca_[k] - cb_[k];
        *radius = ra_ + rb_;
    }

    double operator()(int ia, int ib, const double* u) const {
        // quick reject using the envelope ball
        double dist2 = 0.0;
        for (int k = 0; k < d_; ++k) {
            const double t = u[k] - (ca_[k] - cb_[k]);
            dist2 += t * t;
        }
        const double rr = ra_ + rb_;
        if (dist2 >= rr * rr) return 0.0;

        // axis-aligned bounding box of ball(ca, ra) intersected with ball(cb + u, rb)
        std::vector<double> lo(d_), hi(d_);
        for (int k = 0; k < d_; ++k) {
            lo[k] = std::max(ca_[k] - ra_, cb_[k] + u[k] - rb_);
            hi[k] = std::min(ca_[k] + ra_, cb_[k] + u[k] + rb_);
            if (lo[k] >= hi[k]) return 0.0;
        }

        const GaussRule& rule = quad_rule();
        const int n = static_cast<int>(rule.x.size());
        std::vector<int> idx(d_, 0);
        std::vector<double> v(d_), vb(d_);
        double acc = 0.0;
        double jac = 1.0;
        for (int k = 0; k < d_; ++k) jac *= 0.5 * (hi[k] - lo[k]);
        while (true) {
            double wgt = 1.0;
            for (int k = 0; k < d_; ++k) {
                v[k] = 0.5 * (lo[k] + hi[k]) + 0.5 * (hi[k] - lo[k]) * rule.x[idx[k]];
                vb[k] = v[k] - u[k];
                wgt *= rule.w[idx[k]];
            }
            const double av = (ia < 0) ? a_.divergence(v.data()) : a_.value(ia, v.data());
            if (av != 0.0) {
                const double bv = (ib < 0) ? b_.divergence(vb.data()) : b_.value(ib, vb.data());
                acc += wgt * av * bv;
            }
            int k = d_ - 1;
            while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
            if (k < 0) break;
        }
        return acc * jac;
    }

  private:
    const FormLike& a_;
    const FormLike& b_;
    int d_;
    std::vector<double> ca_, cb_;
    double ra_ = 0.0, rb_ = 0.0;
};

// kernel-weighted integral int K_lambda(v) W(v - shift) dv, where W has the
// given envelope; radial Gauss-Kronrod around the kernel singularity at v = 0.
// In d = 2 the angular integral is restricted to the arc actually covered by
// the W-support (essential when the support sits far from the origin).
template <class W>
double kernel_weighted_integral(const W& wfun, int d, double lam, const double* shift,
                                const double* wcenter, double wradius) {
    // W(v - shift) is supported in the ball around shift + wcenter
    std::vector<double> c(d);
    double cnorm2 = 0.0;
    for (int k = 0; k < d; ++k) {
        c[k] = shift[k] + wcenter[k];
        cnorm2 += c[k] * c[k];
    }
    const double cnorm = std::sqrt(cnorm2);
    const double rlo = std::max(cnorm - wradius, 0.0);
    const double rhi = cnorm + wradius;
    if (rhi <= 0.0) return 0.0;

    if (d != 2) throw std::invalid_argument("kernel-weighted integrals are implemented for d = 2");

    // full-circle integral of W(r omega - shift)
    auto angular_full = [&](double r) {
        const int n_theta = 24;
        double acc = 0.0, v[2];
        for (int i = 0; i < n_theta; ++i) {
            const double th = kTwoPi * i / n_theta;
            v[0] = r * std::cos(th) - shift[0];
            v[1] = r * std::sin(th) - shift[1];
            acc += wfun(v);
        }
        return acc * (kTwoPi / n_theta);
    };

    // support away from the origin: Gauss-Legendre over the covered arc
    const bool use_arc = cnorm > wradius * 1.05;
    const double theta_c = use_arc ? std::atan2(c[1], c[0]) : 0.0;
    auto angular_arc = [&](double r) {
        const double cosd = (r * r + cnorm2 - wradius * wradius) / (2.0 * r * cnorm);
        if (cosd >= 1.0) return 0.0;
        const double delta = std::acos(std::max(cosd, -1.0));
        const GaussRule& rule = arc_rule();
        double acc = 0.0, v[2];
        for (size_t i = 0; i < rule.x.size(); ++i) {
            const double th = theta_c + delta * rule.x[i];
            v[0] = r * std::cos(th) - shift[0];
            v[1] = r * std::sin(th) - shift[1];
            acc += rule.w[i] * wfun(v);
        }
        return acc * delta;
    };

    // The angular integral is smooth in r, so cache it and let the adaptive
    // radial rule re-evaluate only the (cheap) kernel. A single interpolant
    // cannot resolve the near-origin correlation spike against the full
    // support interval, so use Chebyshev pieces on a dyadic partition.
    auto ang_at = [&](double r) {
        if (r <= 0.0) return angular_full(0.0);  // finite: 2 pi W(-shift)
        return use_arc ? angular_arc(r) : angular_full(r);
    };
    const double len = rhi - rlo;
    const std::array<double, 5> cuts = {rlo, rlo + len / 8.0, rlo + len / 4.0, rlo + len / 2.0,
                                        rhi};
    std::vector<ChebInterp> pieces;
    pieces.reserve(4);
    for (int s = 0; s < 4; ++s) pieces.emplace_back(cuts[s], cuts[s + 1], 32, ang_at);

    auto radial = [&](double r) {
        if (r <= 0.0) return 0.0;
        int s = 3;
        while (s > 0 && r < cuts[s]) --s;
        const double ang = pieces[s](r);
        if (ang == 0.0) return 0.0;
        return k_lambda(r, lam, d) * std::pow(r, d - 1) * ang;
    };
    double err = 0.0;
    return GK::integrate(radial, rlo, rhi, 12, 1e-8, &err);
}

double variance_direct(const FormLike& f, double lam) {
    const int d = f.dim();
    if (d != 2)
        throw std::invalid_argument(
            "proca_variance: the direct-space route is implemented for d = 2 "
            "(use proca_variance_fourier for d = 3)");
    Correlator corr(f, f);
    std::vector<double> wc(d);
    double wr = 0.0;
    corr.support(wc.data(), &wr);

    auto wfun = [&](const double* u) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += corr(i, i, u);
        acc += corr(-1, -1, u) / lam;
        return acc;
    };
    std::vector<double> zero(d, 0.0);
    return kernel_weighted_integral(wfun, d, lam, zero.data(), wc.data(), wr);
}

}  // namespace

double proca_variance(const FormLike& f, double lam) {
    if (lam <= 0) throw std::invalid_argument("proca_variance: lambda must be positive");
    return variance_direct(f, lam);
}

double proca_variance(const TestForm& f, double lam) {
    TestFormView view(f);
    return proca_variance(static_cast<const FormLike&>(view), lam);
}

double proca_variance_fourier(const TestForm& f, double lam) {
    if (lam <= 0) throw std::invalid_argument("proca_variance_fourier: lambda must be positive");
    const int d = f.dim();
    if (d != 2 && d != 3)
        throw std::invalid_argument("proca_variance_fourier: d = 2 or 3 supported");

    std::vector<double> env_c(d);
    double env_r = 0.0;
    f.quad_envelope(env_c.data(), &env_r);

    const bool analytic = f.has_fourier();
    const GaussRule& rule = quad_rule();
    const int n = static_cast<int>(rule.x.size());

    // numeric transform fallback: tensor Gauss-Legendre over the envelope box
    auto fhat_numeric = [&](int i, const double* k) {
        std::vector<int> idx(d, 0);
        std::vector<double> x(d);
        std::complex<double> acc(0.0, 0.0);
        double jac = 1.0;
        for (int a = 0; a < d; ++a) jac *= env_r;  // half-width env_r, jacobian (2*env_r/2)^d
        while (true) {
            double wgt = 1.0, kx = 0.0;
            for (int a = 0; a < d; ++a) {
                x[a] = env_c[a] + env_r * rule.x[idx[a]];
                wgt *= rule.w[idx[a]];
                kx += k[a] * x[a];
            }
            const double v = f.value(i, x.data());
            if (v != 0.0) acc += wgt * v * std::exp(std::complex<double>(0.0, -kx));
            int a = d - 1;
            while (a >= 0 && ++idx[a] == n) idx[a--] = 0;
            if (a < 0) break;
        }
        return acc * jac;
    };

    auto integrand_at = [&](const double* k) {
        std::complex<double> dot(0.0, 0.0);
        double norm2 = 0.0, k2 = 0.0;
        for (int i = 0; i < d; ++i) k2 += k[i] * k[i];
        for (int i = 0; i < d; ++i) {
            const std::complex<double> fi = analytic ? f.fourier(i, k) : fhat_numeric(i, k);
            norm2 += std::norm(fi);
            dot += k[i] * fi;
        }
        return (norm2 + std::norm(dot) / lam) / (k2 + lam);
    };

    auto angular_mean = [&](double rho) {
        std::vector<double> k(d);
        if (d == 2) {
            const int m = 64;
            double acc = 0.0;
            for (int i = 0; i < m; ++i) {
                const double th = kTwoPi * i / m;
                k[0] = rho * std::cos(th);
                k[1] = rho * std::sin(th);
                acc += integrand_at(k.data());
            }
            return acc / m;
        }
        static const GaussRule czr(24);
        const int n_phi = 32;
        double total = 0.0;
        for (int i = 0; i < 24; ++i) {
            const double cz = czr.x[i];
            const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
            double ring = 0.0;
            for (int j = 0; j < n_phi; ++j) {
                const double ph = kTwoPi * j / n_phi;
                k[0] = rho * sz * std::cos(ph);
                k[1] = rho * sz * std::sin(ph);
                k[2] = rho * cz;
                ring += integrand_at(k.data());
            }
            total += czr.w[i] * ring / n_phi;
        }
        return total / 2.0;
    };

    const double sphere_area = (d == 2) ? kTwoPi : 2.0 * kTwoPi;
    auto radial = [&](double rho) {
        return std::pow(rho, d - 1) * angular_mean(rho) * sphere_area;
    };

    // segment doubling until the tail stops contributing
    double k0 = 170.0 / env_r;  // ~ 17 / width for the 10-sigma gaussian envelope
    double lo = 0.0, acc = 0.0;
    for (int seg = 0; seg < 24; ++seg) {
        double err = 0.0;
        const double part = GK::integrate(radial, lo, k0, 12, 1e-9, &err);
        acc += part;
        if (seg > 0 && std::abs(part) < 1e-12 * std::abs(acc)) break;
        lo = k0;
        k0 *= 2.0;
    }
    return acc / std::pow(kTwoPi, d);
}

double covariance_functional(const TestForm& f, const TestForm& g, const std::vector<double>& x,
                             double lam, Warnings* warn) {
    if (lam <= 0) throw std::invalid_argument("covariance_functional: lambda must be positive");
    const int d = f.dim();
    if (g.dim() != d || static_cast<int>(x.size()) != d)
        throw std::invalid_argument("covariance_functional: dimension mismatch");
    if (d != 2) throw std::invalid_argument("covariance_functional: implemented for d = 2");

    TestFormView fv(f), gv(g);
    Correlator corr(fv, gv);
    std::vector<double> wc(d);
    double wr = 0.0;
    corr.support(wc.data(), &wr);

    double xnorm = 0.0;
    for (double t : x) xnorm += t * t;
    xnorm = std::sqrt(xnorm);
    if (warn && (f.kind() != FormKind::bump || g.kind() != FormKind::bump) && xnorm > 0.5 * wr)
        warn->accuracy_warning = true;

    // (f, R g^x) = int K(v) W(v - x) dv with W(u) = sum_i C_{f_i g_i}(u) + C_dd(u)/lam
    auto wfun = [&](const double* u) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += corr(i, i, u);
        acc += corr(-1, -1, u) / lam;
        return acc;
    };
    return kernel_weighted_integral(wfun, d, lam, x.data(), wc.data(), wr);
}

PsiResult psi_prefactor(const TestForm& f, const TestForm& g, const std::vector<double>& u,
                        double lam) {
    const int d = f.dim();
    if (g.dim() != d || static_cast<int>(u.size()) != d)
        throw std::invalid_argument("psi_prefactor: dimension mismatch");
    double un = 0.0;
    for (double t : u) un += t * t;
    if (std::abs(un - 1.0) > 1e-9) throw std::invalid_argument("psi_prefactor: u must be a unit vector");
    if (f.kind() != FormKind::bump || g.kind() != FormKind::bump)
        throw std::invalid_argument("psi_prefactor: bump forms required");

    const double sq = std::sqrt(lam);
    const GaussRule& rule = quad_rule();
    const int n = static_cast<int>(rule.x.size());

    // two-sided transform Ftilde(p) = int F(y) e^{p.y} dy over the envelope box
    auto tilde_of = [&](const TestForm& form, int comp, bool divergence, const double* p) {
        std::vector<double> c(d);
        double r = 0.0;
        form.quad_envelope(c.data(), &r);
        std::vector<int> idx(d, 0);
        std::vector<double> y(d);
        double acc = 0.0, jac = 1.0;
        for (int a = 0; a < d; ++a) jac *= r;
        while (true) {
            double wgt = 1.0, py = 0.0;
            for (int a = 0; a < d; ++a) {
                y[a] = c[a] + r * rule.x[idx[a]];
                wgt *= rule.w[idx[a]];
                py += p[a] * y[a];
            }
            const double v = divergence ? form.divergence(y.data()) : form.value(comp, y.data());
            if (v != 0.0) acc += wgt * v * std::exp(py);
            int a = d - 1;
            while (a >= 0 && ++idx[a] == n) idx[a--] = 0;
            if (a < 0) break;
        }
        return acc * jac;
    };

    std::vector<double> pm(d), pp(d);
    for (int a = 0; a < d; ++a) {
        pm[a] = -sq * u[a];
        pp[a] = sq * u[a];
    }

    PsiResult res;
    res.psi.resize(d);
    for (int i = 0; i < d; ++i)
        res.psi[i] = tilde_of(f, i, false, pm.data()) * tilde_of(g, i, false, pp.data());
    res.psi_div = tilde_of(f, 0, true, pm.data()) * tilde_of(g, 0, true, pp.data());

    double sum = res.psi_div / lam;
    for (double v : res.psi) sum += v;
    res.prefactor = std::pow(lam, 0.25 * (d - 3)) / (2.0 * std::pow(kTwoPi, 0.5 * (d - 1))) * sum;
    return res;
}

}  // namespace prlc
