#pragma once

#include <vector>

#include "prlc/errors.hpp"
#include "prlc/test_form.hpp"

namespace prlc {

// K_lambda(r) = int_0^inf (4 pi t)^{-d/2} exp(-r^2/4t - lambda t) dt, evaluated
// as e^{-sqrt(lambda) r} * int (4 pi t)^{-d/2} exp(-(r - 2 sqrt(lambda) t)^2 / 4t) dt
// with adaptive Gauss-Kronrod split at the peak t* = r / (2 sqrt(lambda)).
// Relative accuracy target 1e-10. Throws SingularityError at r <= 0.
double k_lambda(double r, double lam, int d);

// lambda^{(d-3)/4} e^{-sqrt(lambda) r} / (2 (2 pi)^{(d-1)/2} r^{(d-1)/2});
// the exact kernel for d = 3.
double k_lambda_asymptotic(double r, double lam, int d);

// Minimal interface consumed by the variance quadratures: component values,
// divergence values, and an envelope ball.
class FormLike {
  public:
    virtual ~FormLike() = default;
    virtual int dim() const = 0;
    virtual double value(int i, const double* x) const = 0;
    virtual double divergence(const double* x) const = 0;
    virtual void envelope(double* center, double* radius) const = 0;
};

class TestFormView final : public FormLike {
  public:
    explicit TestFormView(const TestForm& f) : f_(f) {}
    int dim() const override { return f_.dim(); }
    double value(int i, const double* x) const override { return f_.value(i, x); }
    double divergence(const double* x) const override { return f_.divergence(x); }
    void envelope(double* c, double* r) const override { f_.quad_envelope(c, r); }

  private:
    const TestForm& f_;
};

// (Q_lambda f)_i = -Laplacian f_i + lambda f_i + d_i (div f), from analytic
// Hessians. Its divergence is lambda * div f.
class QApplied final : public FormLike {
  public:
    QApplied(const TestForm& f, double lam) : f_(f), lam_(lam) {}
    int dim() const override { return f_.dim(); }
    double value(int i, const double* x) const override;
    double divergence(const double* x) const override { return lam_ * f_.divergence(x); }
    void envelope(double* c, double* r) const override { f_.quad_envelope(c, r); }
    double lambda() const { return lam_; }

  private:
    const TestForm& f_;
    double lam_;
};

inline QApplied apply_Q(const TestForm& f, double lam) {
    if (lam <= 0) throw std::invalid_argument("apply_Q: lambda must be positive");
    return QApplied(f, lam);
}

// Variance (f, R_lambda f), direct-space route: correlations of f against the
// kernel, with derivatives moved onto f by parts,
//   (f, R f) = int K(u) [ sum_i C_{f_i f_i}(u) + (1/lambda) C_{div f, div f}(u) ] du.
double proca_variance(const TestForm& f, double lam);
double proca_variance(const FormLike& f, double lam);

// Independent Fourier-space route:
//   (2 pi)^{-d} int ( |f_hat|^2 + |k . f_hat|^2 / lambda ) / (|k|^2 + lambda) dk.
// Uses analytic transforms when the form has them, numeric ones otherwise.
double proca_variance_fourier(const TestForm& f, double lam);

// (f, R_lambda g^x) with g^x(y) = g(x + y). Bump forms are intended for large
// |x|; non-compact forms beyond half the envelope radius set the accuracy
// warning in warn.
double covariance_functional(const TestForm& f, const TestForm& g, const std::vector<double>& x,
                             double lam, Warnings* warn = nullptr);

// Psi(F, G, u, lambda) = int int F(y) G(y - v) e^{-sqrt(lambda) u.v} dv dy,
// which factorizes as Ftilde(-sqrt(lambda) u) * Gtilde(sqrt(lambda) u) with the
// two-sided transform Ftilde(p) = int F(y) e^{p.y} dy.
struct PsiResult {
    std::vector<double> psi;  // Psi(f_i, g_i, u, lambda) per component
    double psi_div;           // Psi(div f, div g, u, lambda) = sum_ij Psi(d_i f_i, d_j g_j, ...)
    double prefactor;         // lambda^{(d-3)/4} / (2 (2 pi)^{(d-1)/2}) * (sum_i psi_i + psi_div / lambda)
};
PsiResult psi_prefactor(const TestForm& f, const TestForm& g, const std::vector<double>& u, double lam);

}  // namespace prlc
