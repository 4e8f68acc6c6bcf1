#pragma once

#include <complex>

#include "mimocap/errors.hpp"

namespace mimocap {

/// Parameters of the integral families
///   G_n(a,b,xi)      = \int_0^inf (1+ax)^{xi-1} x^{n-1} e^{-x/b} dx
///   J_{n,l}(a,b,xi)  = \int_0^inf (1+ax)^{xi-1} ln^l(1+ax) x^{n-1} e^{-x/b} dx
/// with J the l-th derivative of G with respect to xi.
struct IntegralParams {
    int n = 1;                       ///< power of x is n-1, n >= 1
    double a = 1.0;                  ///< a > 0
    double b = 1.0;                  ///< b > 0
    std::complex<double> xi{1.0, 0}; ///< exponent parameter
    int ell = 0;                     ///< log power (J only), ell >= 1 for J

    void validate(bool for_j) const;
};

enum class EvalMethod { closed_form, quadrature };

struct EvalResult {
    std::complex<double> value;
    EvalMethod method = EvalMethod::closed_form;
    double est_abs_error = 0.0;
};

/// psi^(order)(z) for integer z >= 1. Orders 0..3 use the finite-sum forms in
/// gamma, pi^2/6, zeta(3), pi^4/15; higher orders use the zeta series.
double polygamma(int order, int z);

/// E_1(x) = \int_x^inf e^{-t}/t dt, x > 0. Relative error <= 1e-13.
double exp_integral_e1(double x);

/// Complementary incomplete gamma Gamma(alpha, x), x > 0, alpha any real.
/// Nonpositive alpha uses the downward recurrence
/// Gamma(a,x) = (Gamma(a+1,x) - x^a e^{-x}) / a seeded at Gamma(0,x) = E_1(x)
/// (or a fractional seed); |alpha| > 30 falls back to direct quadrature.
double upper_incomplete_gamma(double alpha, double x);

/// i-th parameter derivative of the complementary incomplete gamma:
/// d^i/dalpha^i Gamma(alpha, x) = \int_x^inf t^{alpha-1} ln^i(t) e^{-t} dt.
double gamma_tail_log_moment(double alpha, double x, int i);

/// G_n(a,b,xi). Dispatch: positive-integer xi -> finite sum; other real xi ->
/// incomplete-gamma expansion; complex xi -> quadrature for moderate Im(xi),
/// the extended-precision incomplete-gamma expansion beyond that.
EvalResult integral_G(const IntegralParams& p);

/// J_{n,ell}(a,b,xi). Positive-integer xi -> incomplete-gamma/Leibniz
/// expansion; everything else -> adaptive Gauss-Laguerre.
EvalResult integral_J(const IntegralParams& p);

// Both routes are exposed directly so they can be cross-validated.
EvalResult integral_G_closed_form(const IntegralParams& p);
EvalResult integral_G_quadrature(const IntegralParams& p);
EvalResult integral_J_closed_form(const IntegralParams& p);  // real xi only
EvalResult integral_J_quadrature(const IntegralParams& p);

}  // namespace mimocap
