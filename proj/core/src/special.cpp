#include "mimocap/special.hpp"

#include "mimocap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mimocap {
namespace {

constexpr long double kEulerGamma = 0.57721566490153286060651209008240243L;
constexpr long double kZeta3 = 1.20205690315959428539973816151144999L;
constexpr long double kPi = 3.14159265358979323846264338327950288L;

long double binoml(int n, int k) {
    if (k < 0 || k > n) return 0.0L;
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// e^x E_1(x): series for x <= 1, modified-Lentz continued fraction above.
long double e1_scaled(long double x) {
    if (x <= 1.0L) {
        long double sum = 0.0L, term = 1.0L;
        for (int k = 1; k < 64; ++k) {
            term *= -x / k;
            const long double del = -term / k;
            sum += del;
            if (std::abs(del) < 1e-22L * std::abs(sum) + 1e-4940L) break;
        }
        return std::exp(x) * (-kEulerGamma - std::log(x) + sum);
    }
    const long double tiny = 1e-4000L;
    long double b = x + 1.0L, c = 1.0L / tiny, d = 1.0L / b, h = d;
    for (int i = 1; i < 200; ++i) {
        const long double an = -static_cast<long double>(i) * i;
        b += 2.0L;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const long double del = d * c;
        h *= del;
        if (std::abs(del - 1.0L) < 1e-22L) break;
    }
    return h;  // E_1(x) = e^{-x} h
}

// e^x Gamma(alpha, x) for alpha > 0, x > 0.
long double gamma_upper_scaled_pos(long double alpha, long double x) {
    if (x < alpha + 1.0L) {
        // via the lower incomplete gamma series
        long double ap = alpha, sum = 1.0L / alpha, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0L;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-22L) break;
        }
        const long double lower = sum * std::exp(alpha * std::log(x));  // e^x * gamma(alpha,x)
        return std::exp(x + std::lgamma(alpha)) - lower;
    }
    const long double tiny = 1e-4000L;
    long double b = x + 1.0L - alpha, c = 1.0L / tiny, d = 1.0L / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const long double an = -i * (i - alpha);
        b += 2.0L;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const long double del = d * c;
        h *= del;
        if (std::abs(del - 1.0L) < 1e-22L) break;
    }
    return std::exp(alpha * std::log(x)) * h;
}

// e^x Gamma(alpha, x) for any real alpha, via downward recurrence from a
// positive (or zero) seed order.
long double gamma_upper_scaled(long double alpha, long double x) {
    if (alpha > 0.0L) return gamma_upper_scaled_pos(alpha, x);
    const long double rounded = std::floor(alpha + 0.5L);
    const bool integer = std::abs(alpha - rounded) < 1e-12L;
    long double a = integer ? 0.0L : alpha - std::floor(alpha);  // seed in (0,1) or 0
    long double g = integer ? e1_scaled(x) : gamma_upper_scaled_pos(a, x);
    while (a > alpha + 0.5L) {
        a -= 1.0L;
        g = (g - std::exp(a * std::log(x))) / a;
    }
    return g;
}

// e^x \int_x^inf t^{alpha-1} ln^i(t) e^{-t} dt.
// [x,1) segment (if any) under t = e^{-s}; [max(x,1), inf) by shifted
// Gauss-Laguerre.
long double tail_log_moment_scaled(long double alpha, long double x, int i) {
    const long double m = std::max(x, 1.0L);
    const QuadRule& lag = gauss_laguerre(256);
    long double tail = 0.0L;
    for (std::size_t j = 0; j < lag.size(); ++j) {
        const long double t = m + static_cast<long double>(lag.x[j]);
        const long double lt = std::log(t);
        long double f = std::exp((alpha - 1.0L) * lt);
        for (int q = 0; q < i; ++q) f *= lt;
        tail += static_cast<long double>(lag.w[j]) * f;
    }
    tail *= std::exp(x - m);
    if (x >= 1.0L) return tail;

    const long double L = -std::log(x);
    const QuadRule& leg = gauss_legendre(160);
    long double head = 0.0L;
    for (std::size_t j = 0; j < leg.size(); ++j) {
        const long double s = 0.5L * L * (static_cast<long double>(leg.x[j]) + 1.0L);
        long double f = std::exp(-alpha * s - std::exp(-s));
        for (int q = 0; q < i; ++q) f *= -s;
        head += static_cast<long double>(leg.w[j]) * f;
    }
    head *= 0.5L * L * std::exp(x);
    return tail + head;
}

long double zeta(int m) {
    // m >= 2; direct sum plus Euler-Maclaurin tail
    const int K = 200;
    long double s = 0.0L;
    for (int k = 1; k <= K; ++k) s += std::pow(static_cast<long double>(k), -m);
    const long double Kl = K;
    s += std::pow(Kl, 1.0L - m) / (m - 1.0L) - 0.5L * std::pow(Kl, static_cast<long double>(-m)) +
         m / 12.0L * std::pow(Kl, -m - 1.0L);
    return s;
}

template <typename Scalar>
Scalar laguerre_sum(const QuadRule& rule, int n, double a, double b, Scalar xi_minus_1, int ell) {
    // \int = b^n sum_j w_j t^{n-1} exp((xi-1) ln(1+abt)) ln^ell(1+abt)
    const long double ab = static_cast<long double>(a) * b;
    Scalar acc{};
    for (std::size_t j = 0; j < rule.size(); ++j) {
        const long double t = rule.x[j];
        const double L = static_cast<double>(std::log1p(ab * t));
        long double poly = rule.w[j];
        for (int q = 0; q < n - 1; ++q) poly *= t;
        Scalar f = std::exp(xi_minus_1 * L) * static_cast<double>(poly);
        for (int q = 0; q < ell; ++q) f *= L;
        acc += f;
    }
    return acc * std::pow(b, n);
}

template <typename Scalar>
EvalResult adaptive_laguerre(const IntegralParams& p, Scalar xi_minus_1, int ell) {
    Scalar prev{};
    bool have_prev = false;
    EvalResult r;
    r.method = EvalMethod::quadrature;
    for (int level : kLaguerreLevels) {
        const Scalar cur = laguerre_sum(gauss_laguerre(level), p.n, p.a, p.b, xi_minus_1, ell);
        if (have_prev) {
            const double diff = std::abs(std::complex<double>(cur - prev));
            r.value = std::complex<double>(cur);
            r.est_abs_error = diff;
            if (diff <= 1e-11 * std::abs(r.value) || diff < 1e-300) return r;
        }
        prev = cur;
        have_prev = true;
    }
    return r;
}

using CLD = std::complex<long double>;

CLD lgamma_c(CLD z) {
    // Lanczos, g = 7, 9 terms; adequate for the ~1e-15 target of this path
    static const long double c[9] = {0.99999999999980993L,  676.5203681218851L,
                                     -1259.1392167224028L,  771.32342877765313L,
                                     -176.61502916214059L,  12.507343278686905L,
                                     -0.13857109526572012L, 9.9843695780195716e-6L,
                                     1.5056327351493116e-7L};
    if (z.real() < 0.5L) {
        return std::log(kPi) - std::log(std::sin(kPi * z)) - lgamma_c(1.0L - z);
    }
    z -= 1.0L;
    CLD x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<long double>(i));
    const CLD t = z + 7.5L;
    return 0.5L * std::log(2.0L * kPi) + (z + 0.5L) * std::log(t) - t + std::log(x);
}

// e^x Gamma(xi, x) for complex xi, real x > 0.
CLD gamma_upper_scaled_c(CLD xi, long double x) {
    const long double lx = std::log(x);
    if (x < std::abs(xi) + 1.5L) {
        // e^x gamma(xi,x) = x^xi sum_k x^k / (xi (xi+1) ... (xi+k))
        CLD ap = xi, sum = 1.0L / xi, del = sum;
        for (int i = 0; i < 10000; ++i) {
            ap += 1.0L;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-22L) break;
        }
        const CLD lower = sum * std::exp(xi * lx);
        return std::exp(CLD(x, 0.0L) + lgamma_c(xi)) - lower;
    }
    const long double tiny = 1e-4000L;
    CLD b = x + 1.0L - xi, c = 1.0L / tiny, d = 1.0L / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        const CLD an = -static_cast<long double>(i) * (static_cast<long double>(i) - xi);
        b += 2.0L;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const CLD del = d * c;
        h *= del;
        if (std::abs(del - 1.0L) < 1e-22L) break;
    }
    return std::exp(xi * lx) * h;
}

// incomplete-gamma expansion of G for complex xi, summed in extended
// precision; e^x Gamma(xi+k, x) advanced by the upward recurrence.
EvalResult integral_G_closed_complex(const IntegralParams& p) {
    const CLD xi(p.xi.real(), p.xi.imag());
    const long double ab = static_cast<long double>(p.a) * p.b;
    const long double x = 1.0L / ab;
    const long double lab = std::log(ab);
    const long double lx = std::log(x);
    CLD g = gamma_upper_scaled_c(xi, x);
    CLD sum{};
    long double abs_sum = 0.0L;
    for (int k = 0; k < p.n; ++k) {
        const long double sign = (p.n - 1 - k) % 2 == 0 ? 1.0L : -1.0L;
        const CLD term =
            sign * binoml(p.n - 1, k) * std::exp((xi + static_cast<long double>(k)) * lab) * g;
        sum += term;
        abs_sum += std::abs(term);
        g = (xi + static_cast<long double>(k)) * g +
            std::exp((xi + static_cast<long double>(k)) * lx);
    }
    const long double an = std::exp(-p.n * std::log(static_cast<long double>(p.a)));
    EvalResult r;
    r.method = EvalMethod::closed_form;
    r.value = std::complex<double>(sum * an);
    r.est_abs_error = static_cast<double>(1e-17L * an * abs_sum);
    return r;
}

bool is_positive_integer(double x, long* out) {
    const double rounded = std::round(x);
    if (rounded >= 1.0 && std::abs(x - rounded) < 1e-12) {
        *out = static_cast<long>(rounded);
        return true;
    }
    return false;
}

}  // namespace

void IntegralParams::validate(bool for_j) const {
    if (n < 1) throw domain_error("integral family: n must be >= 1");
    if (!(a > 0.0) || !(b > 0.0)) throw domain_error("integral family: a and b must be positive");
    if (ell < 0) throw domain_error("integral family: ell must be nonnegative");
    if (for_j && ell < 1) throw domain_error("integral J: ell must be >= 1");
}

double polygamma(int order, int z) {
    if (order < 0 || z < 1) throw domain_error("polygamma: need order >= 0 and integer z >= 1");
    long double partial = 0.0L;
    switch (order) {
        case 0:
            for (int k = 1; k < z; ++k) partial += 1.0L / k;
            return static_cast<double>(-kEulerGamma + partial);
        case 1:
            for (int k = 1; k < z; ++k) partial += 1.0L / (static_cast<long double>(k) * k);
            return static_cast<double>(kPi * kPi / 6.0L - partial);
        case 2:
            for (int k = 1; k < z; ++k) partial += 2.0L / (static_cast<long double>(k) * k * k);
            return static_cast<double>(-2.0L * kZeta3 + partial);
        case 3:
            for (int k = 1; k < z; ++k)
                partial += 6.0L / (static_cast<long double>(k) * k * k * k);
            return static_cast<double>(kPi * kPi * kPi * kPi / 15.0L - partial);
        default: {
            for (int k = 1; k < z; ++k) partial += std::pow(static_cast<long double>(k), -order - 1);
            const long double fact = std::exp(std::lgamma(static_cast<long double>(order + 1)));
            const long double sign = (order % 2 == 0) ? -1.0L : 1.0L;
            return static_cast<double>(sign * fact * (zeta(order + 1) - partial));
        }
    }
}

double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw domain_error("exp_integral_e1: x must be positive");
    const long double s = e1_scaled(x);
    return static_cast<double>(std::exp(std::log(s) - static_cast<long double>(x)));
}

double upper_incomplete_gamma(double alpha, double x) {
    if (!(x > 0.0)) throw domain_error("upper_incomplete_gamma: x must be positive");
    long double scaled;
    if (std::abs(alpha) > 30.0) {
        scaled = tail_log_moment_scaled(alpha, x, 0);
    } else {
        scaled = gamma_upper_scaled(alpha, x);
    }
    const long double sign = scaled < 0.0L ? -1.0L : 1.0L;
    return static_cast<double>(sign *
                               std::exp(std::log(std::abs(scaled)) - static_cast<long double>(x)));
}

double gamma_tail_log_moment(double alpha, double x, int i) {
    if (!(x > 0.0)) throw domain_error("gamma_tail_log_moment: x must be positive");
    if (i < 0) throw domain_error("gamma_tail_log_moment: i must be nonnegative");
    return static_cast<double>(tail_log_moment_scaled(alpha, x, i) *
                               std::exp(-static_cast<long double>(x)));
}

EvalResult integral_G_closed_form(const IntegralParams& p) {
    p.validate(false);
    if (p.xi.imag() != 0.0) return integral_G_closed_complex(p);
    const double xi = p.xi.real();
    EvalResult r;
    r.method = EvalMethod::closed_form;
    long xi_int = 0;
    if (is_positive_integer(xi, &xi_int)) {
        // b^n sum_k C(xi-1,k) (ab)^k (n+k-1)!
        const long double lab = std::log(static_cast<long double>(p.a) * p.b);
        long double sum = 0.0L;
        for (long k = 0; k < xi_int; ++k) {
            sum += std::exp(std::lgamma(static_cast<long double>(xi_int)) -
                            std::lgamma(static_cast<long double>(k + 1)) -
                            std::lgamma(static_cast<long double>(xi_int - k)) + k * lab +
                            std::lgamma(static_cast<long double>(p.n + k)));
        }
        const long double g = std::exp(p.n * std::log(static_cast<long double>(p.b))) * sum;
        r.value = static_cast<double>(g);
        r.est_abs_error = 1e-17 * std::abs(r.value);
        return r;
    }
    // incomplete-gamma expansion, log-space per term
    const long double lab = std::log(static_cast<long double>(p.a) * p.b);
    const long double c = 1.0L / (static_cast<long double>(p.a) * p.b);
    const long double lna = std::log(static_cast<long double>(p.a));
    long double sum = 0.0L, abs_sum = 0.0L;
    for (int k = 0; k < p.n; ++k) {
        const long double gs = gamma_upper_scaled(xi + k, c);
        const long double mag =
            std::exp((xi + k) * lab - p.n * lna + std::log(std::abs(gs)) +
                     std::log(binoml(p.n - 1, k)));
        const long double sign = ((p.n - 1 - k) % 2 == 0 ? 1.0L : -1.0L) * (gs < 0 ? -1.0L : 1.0L);
        sum += sign * mag;
        abs_sum += mag;
    }
    r.value = static_cast<double>(sum);
    r.est_abs_error = static_cast<double>(1e-17L * abs_sum);
    return r;
}

EvalResult integral_G_quadrature(const IntegralParams& p) {
    p.validate(false);
    if (p.xi.imag() == 0.0) {
        return adaptive_laguerre<long double>(p, static_cast<long double>(p.xi.real()) - 1.0L, 0);
    }
    return adaptive_laguerre<std::complex<double>>(p, p.xi - 1.0, 0);
}

EvalResult integral_G(const IntegralParams& p) {
    p.validate(false);
    if (p.xi.imag() != 0.0) {
        // Laguerre nodes stop resolving the oscillation beyond moderate Im(xi);
        // the incomplete-gamma expansion has no such limit
        if (std::abs(p.xi.imag()) > 20.0) return integral_G_closed_complex(p);
        return integral_G_quadrature(p);
    }
    return integral_G_closed_form(p);
}

EvalResult integral_J_closed_form(const IntegralParams& p) {
    p.validate(true);
    const double xi = p.xi.real();
    const long double lab = std::log(static_cast<long double>(p.a) * p.b);
    const long double c = 1.0L / (static_cast<long double>(p.a) * p.b);
    const long double an = std::exp(-p.n * std::log(static_cast<long double>(p.a)));
    long double sum = 0.0L, abs_sum = 0.0L;
    for (int k = 0; k < p.n; ++k) {
        const long double outer =
            binoml(p.n - 1, k) * std::exp((xi + k) * lab) * ((p.n - 1 - k) % 2 == 0 ? 1.0L : -1.0L);
        for (int i = 0; i <= p.ell; ++i) {
            long double term = binoml(p.ell, i) * tail_log_moment_scaled(xi + k, c, i);
            for (int q = 0; q < p.ell - i; ++q) term *= lab;
            sum += outer * term;
            abs_sum += std::abs(outer * term);
        }
    }
    EvalResult r;
    r.method = EvalMethod::closed_form;
    r.value = static_cast<double>(an * sum);
    r.est_abs_error = static_cast<double>(1e-16L * an * abs_sum);
    return r;
}

EvalResult integral_J_quadrature(const IntegralParams& p) {
    p.validate(true);
    if (p.xi.imag() == 0.0) {
        return adaptive_laguerre<long double>(p, static_cast<long double>(p.xi.real()) - 1.0L,
                                              p.ell);
    }
    return adaptive_laguerre<std::complex<double>>(p, p.xi - 1.0, p.ell);
}

EvalResult integral_J(const IntegralParams& p) {
    p.validate(true);
    long xi_int = 0;
    if (p.xi.imag() == 0.0 && is_positive_integer(p.xi.real(), &xi_int)) {
        return integral_J_closed_form(p);
    }
    return integral_J_quadrature(p);
}

}  // namespace mimocap
