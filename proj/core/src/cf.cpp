#include "mimocap/cf.hpp"

#include <cmath>
#include <limits>

#include "mimocap/special.hpp"

namespace mimocap {
namespace {

double log_vandermonde(const Eigen::VectorXd& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        for (Eigen::Index j = i + 1; j < v.size(); ++j) {
            const double d = v(j) - v(i);
            if (!(d > 0.0)) throw degeneracy_error("eigenvalues are not strictly ascending", 0.0);
            s += std::log(d);
        }
    return s;
}

void require_distinct(const Eigen::VectorXd& v, double threshold, const char* which) {
    for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
        const double gap = (v(i + 1) - v(i)) / (0.5 * (v(i) + v(i + 1)));
        if (!(gap > threshold))
            throw degeneracy_error(std::string(which) +
                                       " spectrum has a near-degenerate eigenvalue pair "
                                       "(relative gap " +
                                       std::to_string(gap) + "); regularize first",
                                   gap > 0.0 ? 1.0 / gap : std::numeric_limits<double>::infinity());
    }
}

}  // namespace

CFMatrixBundle CFMatrixBundle::correlated(const ChannelConfig& config, const CorrelationPair& pair,
                                          double distinctness_threshold) {
    require_distinct(pair.lambda(), distinctness_threshold, "small-side");
    require_distinct(pair.sigma(), distinctness_threshold, "large-side");
    CFMatrixBundle b;
    b.kind = CFKind::correlated;
    b.lambda_small = pair.lambda();
    b.sigma_large = pair.sigma();
    b.eta_bar = config.eta_bar;
    b.n_s = config.n_s;
    b.n_l = config.n_l;
    b.log_k_cor = 0.5 * config.n_s * (config.n_s - 1) * std::log(config.eta_bar) +
                  log_vandermonde(b.lambda_small) + log_vandermonde(b.sigma_large);
    return b;
}

CFMatrixBundle CFMatrixBundle::iid(const ChannelConfig& config) {
    CFMatrixBundle b;
    b.kind = CFKind::iid;
    b.eta_bar = config.eta_bar;
    b.n_s = config.n_s;
    b.n_l = config.n_l;
    for (int l = 1; l <= config.n_s; ++l)
        b.log_k_iid += std::lgamma(config.n_l - l + 1.0) + std::lgamma(static_cast<double>(l));
    return b;
}

CFMatrixBundle CFMatrixBundle::high_snr(const ChannelConfig& config, const CorrelationPair& pair,
                                        double distinctness_threshold) {
    require_distinct(pair.sigma(), distinctness_threshold, "large-side");
    CFMatrixBundle b;
    b.kind = CFKind::high_snr;
    b.lambda_small = pair.lambda();
    b.sigma_large = pair.sigma();
    b.eta_bar = config.eta_bar;
    b.n_s = config.n_s;
    b.n_l = config.n_l;
    b.log_det_psi_s = b.lambda_small.array().log().sum();
    for (int l = 1; l <= config.n_s; ++l) b.log_k_cor += std::lgamma(static_cast<double>(l));
    b.log_k_cor += log_vandermonde(b.sigma_large);
    return b;
}

ComplexMatrix build_lambda_matrix(const CFMatrixBundle& b, std::complex<double> nu) {
    const int gap = b.n_l - b.n_s;
    ComplexMatrix m(b.n_l, b.n_l);
    for (int i = 1; i <= b.n_l; ++i) {
        for (int j = 1; j <= b.n_l; ++j) {
            const double sigma = b.sigma_large(j - 1);
            if (i <= gap) {
                m(i - 1, j - 1) = std::pow(sigma, i - 1);
            } else {
                const int iota = i - gap;
                IntegralParams p;
                p.n = 1;
                p.a = b.eta_bar * b.lambda_small(iota - 1);
                p.b = sigma;
                p.xi = nu + static_cast<double>(b.n_s);
                m(i - 1, j - 1) = std::pow(sigma, gap - 1) * integral_G(p).value;
            }
        }
    }
    return m;
}

ComplexMatrix build_lambda_derivative(const CFMatrixBundle& b, std::complex<double> nu, int order) {
    if (order < 1) throw domain_error("build_lambda_derivative: order must be >= 1");
    const int gap = b.n_l - b.n_s;
    ComplexMatrix m = ComplexMatrix::Zero(b.n_l, b.n_l);
    for (int i = gap + 1; i <= b.n_l; ++i) {
        for (int j = 1; j <= b.n_l; ++j) {
            const double sigma = b.sigma_large(j - 1);
            const int iota = i - gap;
            IntegralParams p;
            p.n = 1;
            p.a = b.eta_bar * b.lambda_small(iota - 1);
            p.b = sigma;
            p.xi = nu + static_cast<double>(b.n_s);
            p.ell = order;
            m(i - 1, j - 1) = std::pow(sigma, gap - 1) * integral_J(p).value;
        }
    }
    return m;
}

ComplexMatrix build_omega_matrix(const CFMatrixBundle& b, std::complex<double> nu, int order) {
    ComplexMatrix m(b.n_s, b.n_s);
    for (int i = 1; i <= b.n_s; ++i) {
        for (int j = 1; j <= b.n_s; ++j) {
            IntegralParams p;
            p.n = b.n_l - b.n_s + i + j - 1;
            p.a = b.eta_bar;
            p.b = 1.0;
            p.xi = nu + 1.0;
            p.ell = order;
            m(i - 1, j - 1) = (order == 0) ? integral_G(p).value : integral_J(p).value;
        }
    }
    return m;
}

ComplexMatrix build_k_matrix(const CFMatrixBundle& b, std::complex<double> nu, int order) {
    const int gap = b.n_l - b.n_s;
    ComplexMatrix m = ComplexMatrix::Zero(b.n_l, b.n_l);
    for (int i = 1; i <= b.n_l; ++i) {
        for (int j = 1; j <= b.n_l; ++j) {
            const double sigma = b.sigma_large(j - 1);
            const double ls = std::log(sigma);
            if (i <= gap) {
                if (order == 0) m(i - 1, j - 1) = std::pow(sigma, i - 1);
            } else {
                m(i - 1, j - 1) =
                    std::exp((nu + static_cast<double>(i - 1)) * ls) * std::pow(ls, order);
            }
        }
    }
    return m;
}

Eigen::MatrixXd base_matrix_at_zero(const CFMatrixBundle& b, int order) {
    ComplexMatrix m;
    switch (b.kind) {
        case CFKind::correlated:
            m = (order == 0) ? build_lambda_matrix(b, 0.0) : build_lambda_derivative(b, 0.0, order);
            break;
        case CFKind::iid:
            m = build_omega_matrix(b, 0.0, order);
            break;
        case CFKind::high_snr:
            m = build_k_matrix(b, 0.0, order);
            break;
    }
    return m.real();
}

std::complex<double> log_det(ComplexMatrix m) {
    if (m.rows() != m.cols()) throw dimension_error("log_det: matrix must be square");
    double log_scale = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double s = m.row(i).cwiseAbs().maxCoeff();
        if (s == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
        m.row(i) /= s;
        log_scale += std::log(s);
    }
    const std::complex<double> d = Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
    if (d == std::complex<double>(0.0))
        return {-std::numeric_limits<double>::infinity(), 0.0};
    return std::log(d) + log_scale;
}

std::complex<double> log_gamma(std::complex<double> z) {
    // Lanczos, g = 7, 9 terms
    static const double c[9] = {0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059, 12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6,
                                1.5056327351493116e-7};
    if (z.real() < 0.5) {
        const double pi = 3.14159265358979323846;
        return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
    }
    z -= 1.0;
    std::complex<double> x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
    const std::complex<double> t = z + 7.5;
    return 0.5 * std::log(2.0 * 3.14159265358979323846) + (z + 0.5) * std::log(t) - t +
           std::log(x);
}

CapacityCF::CapacityCF(CFMatrixBundle bundle) : bundle_(std::move(bundle)) {
    const Eigen::MatrixXd base = base_matrix_at_zero(bundle_, 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(base);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    cond_at_zero_ = (smin > 0.0) ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

std::complex<double> CapacityCF::evaluate(double omega) const {
    return evaluate_nu({0.0, omega});
}

std::complex<double> CapacityCF::evaluate_nu(std::complex<double> nu) const {
    std::complex<double> log_phi;
    switch (bundle_.kind) {
        case CFKind::correlated: {
            log_phi = -bundle_.log_k_cor + log_det(build_lambda_matrix(bundle_, nu));
            for (int l = 1; l < bundle_.n_s; ++l)
                log_phi -= static_cast<double>(l) * std::log(nu + static_cast<double>(l));
            break;
        }
        case CFKind::iid:
            log_phi = -bundle_.log_k_iid + log_det(build_omega_matrix(bundle_, nu, 0));
            break;
        case CFKind::high_snr: {
            log_phi = nu * (bundle_.n_s * std::log(bundle_.eta_bar) + bundle_.log_det_psi_s) -
                      bundle_.log_k_cor + log_det(build_k_matrix(bundle_, nu, 0));
            for (int l = 1; l <= bundle_.n_s; ++l)
                log_phi += log_gamma(nu + static_cast<double>(l));
            break;
        }
    }
    const std::complex<double> phi = std::exp(log_phi);
    if (!std::isfinite(phi.real()) || !std::isfinite(phi.imag()))
        throw degeneracy_error("characteristic function evaluation is not finite", cond_at_zero_);
    return phi;
}

std::function<std::complex<double>(double)> CapacityCF::as_function() const {
    return [cf = *this](double omega) { return cf.evaluate(omega); };
}

CapacityCF build_correlated_cf(const ChannelConfig& config, const CorrelationPair& pair) {
    return CapacityCF(CFMatrixBundle::correlated(config, pair));
}

CapacityCF build_iid_cf(const ChannelConfig& config) {
    return CapacityCF(CFMatrixBundle::iid(config));
}

CapacityCF build_high_snr_cf(const ChannelConfig& config, const CorrelationPair& pair) {
    return CapacityCF(CFMatrixBundle::high_snr(config, pair));
}

}  // namespace mimocap
