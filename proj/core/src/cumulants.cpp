#include "mimocap/cumulants.hpp"

#include <quadmath.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mimocap/special.hpp"

namespace mimocap {
namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

// sum_{l=1}^{n_s - 1} l^{1-n}
double power_sum(int n_s, int n) {
    double s = 0.0;
    for (int l = 1; l < n_s; ++l) s += std::pow(static_cast<double>(l), 1 - n);
    return s;
}

double correlated_correction(int n_s, int n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * std::tgamma(static_cast<double>(n)) * power_sum(n_s, n);
}

// The correlated base matrix is a disguised Vandermonde product whose
// condition number grows like eta_bar^(n_s - 1); by 50 dB it reaches 1e11
// and the polymatrix entries grow with it while the cumulants, which are
// traces, stay O(log eta_bar). Double precision then has no digits left,
// so the whole nu = 0 pipeline for the correlated kind runs in quad
// precision with entries from closed forms rather than quadrature.
using quad = __float128;

quad quad_const(const char* digits) { return strtoflt128(digits, nullptr); }

// zeta(2)..zeta(10) and the Euler-Mascheroni constant
const quad kZeta[9] = {
    quad_const("1.644934066848226436472415166646025189219"),
    quad_const("1.202056903159594285399738161511449990765"),
    quad_const("1.082323233711138191516003696541167902775"),
    quad_const("1.036927755143369926331365486457034168057"),
    quad_const("1.017343061984449139714517929790920527902"),
    quad_const("1.008349277381922826839797549849796759600"),
    quad_const("1.004077356197944339378685238508652465259"),
    quad_const("1.002008392826082214417852769232412060486"),
    quad_const("1.000994575127818085337145958900319017006"),
};
const quad kEulerGamma = quad_const("0.5772156649015328606065120900824024310422");

quad binom_q(int n, int k) {
    quad r = 1.0;
    for (int i = 1; i <= k; ++i) r *= quad(n - k + i) / quad(i);
    return r;
}

quad factorial_q(int n) {
    quad r = 1.0;
    for (int i = 2; i <= n; ++i) r *= quad(i);
    return r;
}

// psi^(k)(z) for integer z >= 1
quad polygamma_q(int k, int z) {
    if (k == 0) {
        quad s = -kEulerGamma;
        for (int i = 1; i < z; ++i) s += quad(1) / quad(i);
        return s;
    }
    quad tail = kZeta[k - 1];
    for (int i = 1; i < z; ++i) tail -= powq(quad(i), quad(-(k + 1)));
    const quad sign = (k % 2 == 0) ? quad(-1) : quad(1);
    return sign * factorial_q(k) * tail;
}

// d^m/dxi^m Gamma(xi) for m = 0..m_max at integer xi, via
// Gamma^(m+1) = sum_r binom(m, r) Gamma^(r) psi^(m-r)
std::vector<quad> gamma_derivatives_q(int xi, int m_max) {
    std::vector<quad> g(m_max + 1);
    g[0] = factorial_q(xi - 1);
    for (int m = 0; m < m_max; ++m) {
        quad s = 0.0;
        for (int r = 0; r <= m; ++r) s += binom_q(m, r) * g[r] * polygamma_q(m - r, xi);
        g[m + 1] = s;
    }
    return g;
}

// int_0^c t^{xi-1} ln^m(t) e^{-t} dt by expanding e^{-t}; each power of t
// integrates to c^p sum_r binom(m, r) ln^{m-r}(c) (-1)^r r! / p^{r+1}
quad lower_log_moment_q(int xi, quad c, int m) {
    const quad lc = logq(c);
    quad cp = powq(c, quad(xi));
    quad inv_fact = 1.0;
    quad sum = 0.0;
    quad largest = 0.0;
    for (int j = 0; j <= 400; ++j) {
        const quad p = quad(xi + j);
        quad inner = 0.0;
        for (int r = 0; r <= m; ++r) {
            const quad sign = (r % 2 == 0) ? quad(1) : quad(-1);
            inner += binom_q(m, r) * powq(lc, quad(m - r)) * sign * factorial_q(r) /
                     powq(p, quad(r + 1));
        }
        const quad term = ((j % 2 == 0) ? quad(1) : quad(-1)) * cp * inv_fact * inner;
        sum += term;
        if (fabsq(term) > largest) largest = fabsq(term);
        if (j > static_cast<int>(c) + 8 && fabsq(term) < quad(1e-42) * largest) break;
        cp *= c;
        inv_fact /= quad(j + 1);
    }
    return sum;
}

// G_1(a, b, xi) for integer xi via the finite sum (exact, no cancellation);
// J_{1,order}(a, b, xi) via e^c (ab)^xi / a sum_m binom lab^{order-m}
// [Gamma^(m)(xi) - int_0^c], c = 1/(ab). For c > 30 the series above turns
// alternating-hostile while the condition number is benign, so the double
// closed form is accurate enough there.
quad lambda_entry_q(double a_in, double b_in, int xi, int order,
                    const std::vector<quad>& gamma_derivs) {
    const quad a = a_in;
    const quad b = b_in;
    const quad ab = a * b;
    if (order == 0) {
        quad s = 0.0;
        for (int k = 0; k < xi; ++k) s += binom_q(xi - 1, k) * factorial_q(k) * powq(ab, quad(k));
        return b * s;
    }
    const quad c = quad(1) / ab;
    if (c > quad(30)) {
        IntegralParams p;
        p.n = 1;
        p.a = a_in;
        p.b = b_in;
        p.xi = {static_cast<double>(xi), 0.0};
        p.ell = order;
        return quad(integral_J_closed_form(p).value.real());
    }
    const quad lab = logq(ab);
    const quad ec = expq(c);
    quad s = 0.0;
    for (int m = 0; m <= order; ++m) {
        const quad tail = ec * (gamma_derivs[m] - lower_log_moment_q(xi, c, m));
        s += binom_q(order, m) * powq(lab, quad(order - m)) * tail;
    }
    return powq(ab, quad(xi)) / a * s;
}

// minimal dense quad matrices, row-major
struct QuadMatrix {
    int n = 0;
    std::vector<quad> a;

    explicit QuadMatrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, quad(0)) {}
    quad& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    quad at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    quad trace() const {
        quad t = 0.0;
        for (int i = 0; i < n; ++i) t += at(i, i);
        return t;
    }
    Eigen::MatrixXd to_double() const {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(at(i, j));
        return m;
    }
};

QuadMatrix multiply_q(const QuadMatrix& x, const QuadMatrix& y) {
    const int n = x.n;
    QuadMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const quad v = x.at(i, k);
            if (v == quad(0)) continue;
            for (int j = 0; j < n; ++j) r.at(i, j) += v * y.at(k, j);
        }
    return r;
}

quad trace_product_q(const QuadMatrix& x, const QuadMatrix& y) {
    quad t = 0.0;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) t += x.at(i, j) * y.at(j, i);
    return t;
}

struct QuadLU {
    QuadMatrix lu;
    std::vector<int> perm;

    explicit QuadLU(QuadMatrix base) : lu(std::move(base)), perm(lu.n) {
        const int n = lu.n;
        quad max_entry = 0.0;
        for (const quad& v : lu.a)
            if (fabsq(v) > max_entry) max_entry = fabsq(v);
        quad min_pivot = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) perm[i] = i;
        for (int k = 0; k < n; ++k) {
            int p = k;
            for (int i = k + 1; i < n; ++i)
                if (fabsq(lu.at(i, k)) > fabsq(lu.at(p, k))) p = i;
            if (p != k) {
                for (int j = 0; j < n; ++j) std::swap(lu.at(k, j), lu.at(p, j));
                std::swap(perm[k], perm[p]);
            }
            const quad piv = lu.at(k, k);
            if (fabsq(piv) < min_pivot) min_pivot = fabsq(piv);
            if (piv == quad(0)) break;
            for (int i = k + 1; i < n; ++i) {
                const quad f = lu.at(i, k) / piv;
                lu.at(i, k) = f;
                for (int j = k + 1; j < n; ++j) lu.at(i, j) -= f * lu.at(k, j);
            }
        }
        const double rc =
            max_entry > quad(0) ? static_cast<double>(min_pivot / max_entry) : 0.0;
        if (!(rc > 1e-30))
            throw degeneracy_error(
                "base matrix is numerically singular (rcond " + std::to_string(rc) + ")",
                rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
    }

    QuadMatrix solve(const QuadMatrix& rhs) const {
        const int n = lu.n;
        QuadMatrix x(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) x.at(i, j) = rhs.at(perm[i], j);
        for (int k = 0; k < n; ++k)
            for (int i = k + 1; i < n; ++i) {
                const quad f = lu.at(i, k);
                for (int j = 0; j < n; ++j) x.at(i, j) -= f * x.at(k, j);
            }
        for (int k = n - 1; k >= 0; --k) {
            const quad piv = lu.at(k, k);
            for (int j = 0; j < n; ++j) x.at(k, j) /= piv;
            for (int i = 0; i < k; ++i) {
                const quad f = lu.at(i, k);
                for (int j = 0; j < n; ++j) x.at(i, j) -= f * x.at(k, j);
            }
        }
        return x;
    }
};

QuadMatrix build_lambda_q(const CFMatrixBundle& b, int order,
                          const std::vector<quad>& gamma_derivs) {
    const int gap = b.n_l - b.n_s;
    QuadMatrix m(b.n_l);
    for (int i = 1; i <= b.n_l; ++i) {
        for (int j = 1; j <= b.n_l; ++j) {
            const double sigma = b.sigma_large(j - 1);
            if (i <= gap) {
                if (order == 0) m.at(i - 1, j - 1) = powq(quad(sigma), quad(i - 1));
            } else {
                const int iota = i - gap;
                m.at(i - 1, j - 1) =
                    powq(quad(sigma), quad(gap - 1)) *
                    lambda_entry_q(b.eta_bar * b.lambda_small(iota - 1), sigma, b.n_s, order,
                                   gamma_derivs);
            }
        }
    }
    return m;
}

void fill_trace_route_q(PolymatrixSet& pm, const std::vector<QuadMatrix>& poly) {
    const QuadMatrix& r1 = poly[1];
    const QuadMatrix& r2 = poly[2];
    const QuadMatrix& r3 = poly[3];
    const QuadMatrix& r4 = poly[4];
    const QuadMatrix r11 = multiply_q(r1, r1);
    const quad k1 = r1.trace();
    const quad k2 = r2.trace() - r11.trace();
    const quad k3 = r3.trace() - quad(3) * trace_product_q(r1, r2) + quad(2) * trace_product_q(r11, r1);
    const quad k4 = r4.trace() - quad(4) * trace_product_q(r1, r3) - quad(3) * trace_product_q(r2, r2) +
                    quad(12) * trace_product_q(r2, r11) - quad(6) * trace_product_q(r11, r11);
    pm.trace_route = {static_cast<double>(k1), static_cast<double>(k2), static_cast<double>(k3),
                      static_cast<double>(k4)};
}

PolymatrixSet polymatrix_set_q(const CFMatrixBundle& bundle, int max_order) {
    const std::vector<quad> gamma_derivs = gamma_derivatives_q(bundle.n_s, max_order);
    const QuadLU lu(build_lambda_q(bundle, 0, gamma_derivs));

    std::vector<QuadMatrix> poly;
    poly.reserve(max_order + 1);
    poly.emplace_back(bundle.n_l);
    for (int i = 0; i < bundle.n_l; ++i) poly[0].at(i, i) = 1.0;
    for (int n = 1; n <= max_order; ++n)
        poly.push_back(lu.solve(build_lambda_q(bundle, n, gamma_derivs)));

    std::vector<QuadMatrix> dimatrix;
    dimatrix.reserve(max_order);
    for (int n = 1; n <= max_order; ++n) {
        QuadMatrix d = poly[n];
        for (int l = 1; l < n; ++l) {
            const quad coeff = binom_q(n - 1, l - 1);
            const QuadMatrix prod = multiply_q(poly[n - l], dimatrix[l - 1]);
            for (size_t idx = 0; idx < d.a.size(); ++idx) d.a[idx] -= coeff * prod.a[idx];
        }
        dimatrix.push_back(std::move(d));
    }

    PolymatrixSet pm;
    pm.poly.resize(max_order + 1);
    pm.dimatrix_derivs.resize(max_order);
    pm.kappa_traces.resize(max_order);
    for (int n = 0; n <= max_order; ++n) pm.poly[n] = poly[n].to_double();
    for (int n = 1; n <= max_order; ++n) {
        pm.dimatrix_derivs[n - 1] = dimatrix[n - 1].to_double();
        pm.kappa_traces[n - 1] = static_cast<double>(dimatrix[n - 1].trace());
    }
    if (max_order >= 4) fill_trace_route_q(pm, poly);
    return pm;
}

void fill_trace_route(PolymatrixSet& pm) {
    const Eigen::MatrixXd& r1 = pm.poly[1];
    const Eigen::MatrixXd& r2 = pm.poly[2];
    const Eigen::MatrixXd& r3 = pm.poly[3];
    const Eigen::MatrixXd& r4 = pm.poly[4];
    const Eigen::MatrixXd r11 = r1 * r1;
    const double k1 = r1.trace();
    const double k2 = r2.trace() - r11.trace();
    const double k3 = r3.trace() - 3.0 * (r1 * r2).trace() + 2.0 * (r11 * r1).trace();
    const double k4 = r4.trace() - 4.0 * (r1 * r3).trace() - 3.0 * (r2 * r2).trace() +
                      12.0 * (r2 * r11).trace() - 6.0 * (r11 * r11).trace();
    pm.trace_route = {k1, k2, k3, k4};
}

}  // namespace

PolymatrixSet polymatrix_set(const Eigen::MatrixXd& base,
                             const std::vector<Eigen::MatrixXd>& derivatives) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(base);
    const double rc = lu.rcond();
    if (!(rc > 1e-14))
        throw degeneracy_error("base matrix is numerically singular (rcond " + std::to_string(rc) +
                                   ")",
                               rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
    PolymatrixSet pm;
    const int max_order = static_cast<int>(derivatives.size());
    pm.poly.resize(max_order + 1);
    pm.poly[0] = Eigen::MatrixXd::Identity(base.rows(), base.cols());
    for (int n = 1; n <= max_order; ++n) pm.poly[n] = lu.solve(derivatives[n - 1]);

    pm.dimatrix_derivs.resize(max_order);
    pm.kappa_traces.resize(max_order);
    for (int n = 1; n <= max_order; ++n) {
        Eigen::MatrixXd d = pm.poly[n];
        for (int l = 1; l < n; ++l)
            d -= binom(n - 1, l - 1) * pm.poly[n - l] * pm.dimatrix_derivs[l - 1];
        pm.dimatrix_derivs[n - 1] = d;
        pm.kappa_traces[n - 1] = d.trace();
    }
    if (max_order >= 4) fill_trace_route(pm);
    return pm;
}

PolymatrixSet compute_polymatrices(const CFMatrixBundle& bundle, int max_order) {
    if (max_order < 1 || max_order > 10)
        throw domain_error("compute_polymatrices: max_order must lie in [1, 10]");
    if (bundle.kind == CFKind::correlated) return polymatrix_set_q(bundle, max_order);
    const Eigen::MatrixXd base = base_matrix_at_zero(bundle, 0);
    std::vector<Eigen::MatrixXd> derivs;
    derivs.reserve(max_order);
    for (int n = 1; n <= max_order; ++n) derivs.push_back(base_matrix_at_zero(bundle, n));
    return polymatrix_set(base, derivs);
}

void moments_from_cumulants(CumulantSet& set) {
    const int n_max = static_cast<int>(set.kappa.size());
    set.raw_moments.assign(n_max, 0.0);
    set.central_moments.assign(n_max, 0.0);

    std::vector<double> m(n_max + 1, 0.0);
    m[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        double s = 0.0;
        for (int l = 1; l <= n; ++l) s += binom(n - 1, l - 1) * m[n - l] * set.kappa[l - 1];
        m[n] = s;
        set.raw_moments[n - 1] = s;
    }
    const double m1 = m[1];
    for (int n = 1; n <= n_max; ++n) {
        double s = 0.0;
        for (int l = 0; l <= n; ++l) s += binom(n, l) * m[n - l] * std::pow(-m1, l);
        set.central_moments[n - 1] = s;
    }
    set.mean = m1;
    set.variance = n_max >= 2 ? set.central_moments[1] : 0.0;
    set.skewness = n_max >= 3 ? set.central_moments[2] / std::pow(set.variance, 1.5) : 0.0;
    set.kurtosis_excess =
        n_max >= 4 ? set.central_moments[3] / (set.variance * set.variance) - 3.0 : 0.0;
}

CumulantSet cumulants_iid(const ChannelConfig& config, int max_order) {
    const CFMatrixBundle bundle = CFMatrixBundle::iid(config);
    const PolymatrixSet pm = compute_polymatrices(bundle, max_order);
    CumulantSet set;
    set.source = CFKind::iid;
    set.kappa.resize(max_order);
    for (int n = 1; n <= max_order; ++n) set.kappa[n - 1] = pm.kappa_traces[n - 1];
    moments_from_cumulants(set);
    return set;
}

CumulantSet cumulants_correlated(const ChannelConfig& config, const CorrelationPair& pair,
                                 int max_order) {
    const CFMatrixBundle bundle = CFMatrixBundle::correlated(config, pair);
    const PolymatrixSet pm = compute_polymatrices(bundle, max_order);
    CumulantSet set;
    set.source = CFKind::correlated;
    set.kappa.resize(max_order);
    for (int n = 1; n <= max_order; ++n)
        set.kappa[n - 1] = pm.kappa_traces[n - 1] + correlated_correction(config.n_s, n);
    moments_from_cumulants(set);
    return set;
}

CumulantSet cumulants_high_snr(const ChannelConfig& config, const CorrelationPair& pair,
                               int max_order) {
    CumulantSet set;
    set.source = CFKind::high_snr;
    set.kappa.resize(max_order);

    const double log_det_s = pair.lambda().array().log().sum();
    const double log_det_l = pair.sigma().array().log().sum();
    const bool square = config.n_t == config.n_r;

    std::vector<double> trace_terms(max_order, 0.0);
    if (!square) {
        const CFMatrixBundle bundle = CFMatrixBundle::high_snr(config, pair);
        const PolymatrixSet pm = compute_polymatrices(bundle, max_order);
        for (int n = 1; n <= max_order; ++n) trace_terms[n - 1] = pm.kappa_traces[n - 1];
    } else {
        // the determinant factor collapses to det(psi_l)^nu
        trace_terms[0] = log_det_l;
    }

    for (int n = 1; n <= max_order; ++n) {
        double k = trace_terms[n - 1];
        if (n == 1) k += config.n_s * std::log(config.eta_bar) + log_det_s;
        for (int l = 1; l <= config.n_s; ++l) k += polygamma(n - 1, l);
        set.kappa[n - 1] = k;
    }
    moments_from_cumulants(set);
    return set;
}

TraceStats trace_statistics(const PolymatrixSet& pm, CFKind kind, int n_s) {
    if (kind == CFKind::high_snr)
        throw domain_error("trace_statistics: supported for correlated and iid kinds only");
    if (pm.trace_route.size() < 4)
        throw domain_error("trace_statistics: needs polymatrices up to order 4");

    const bool corr = kind == CFKind::correlated;
    const double k1 = pm.trace_route[0] + (corr ? correlated_correction(n_s, 1) : 0.0);
    const double k2 = pm.trace_route[1] + (corr ? correlated_correction(n_s, 2) : 0.0);
    const double k3 = pm.trace_route[2] + (corr ? correlated_correction(n_s, 3) : 0.0);
    const double k4 = pm.trace_route[3] + (corr ? correlated_correction(n_s, 4) : 0.0);

    TraceStats ts;
    ts.mean = k1;
    ts.variance = k2;
    ts.skewness = k3 / std::pow(k2, 1.5);
    ts.kurtosis_excess = k4 / (k2 * k2);
    return ts;
}

}  // namespace mimocap
