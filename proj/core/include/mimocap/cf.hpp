#pragma once

#include <complex>
#include <functional>

#include "mimocap/channel.hpp"

namespace mimocap {

enum class CFKind { correlated, iid, high_snr };

/// Spectra, SNR, and log-normalization constants needed to evaluate the
/// determinant form of the capacity characteristic function.
struct CFMatrixBundle {
    CFKind kind = CFKind::iid;
    Eigen::VectorXd lambda_small;  ///< ascending eigenvalues of psi_s (empty for iid)
    Eigen::VectorXd sigma_large;   ///< ascending eigenvalues of psi_l (empty for iid)
    double eta_bar = 1.0;
    int n_s = 1;
    int n_l = 1;
    double log_k_cor = 0.0;      ///< correlated normalization, log scale
    double log_k_iid = 0.0;      ///< prod (n_l - l)! (l-1)!, log scale
    double log_det_psi_s = 0.0;  ///< high-SNR prefactor piece

    static CFMatrixBundle correlated(const ChannelConfig& config, const CorrelationPair& pair,
                                     double distinctness_threshold = 0.0);
    static CFMatrixBundle iid(const ChannelConfig& config);
    static CFMatrixBundle high_snr(const ChannelConfig& config, const CorrelationPair& pair,
                                   double distinctness_threshold = 0.0);
};

/// Base matrix (order 0) or its order-th derivative, at general complex nu.
ComplexMatrix build_lambda_matrix(const CFMatrixBundle& b, std::complex<double> nu);
ComplexMatrix build_lambda_derivative(const CFMatrixBundle& b, std::complex<double> nu, int order);
ComplexMatrix build_omega_matrix(const CFMatrixBundle& b, std::complex<double> nu, int order);
ComplexMatrix build_k_matrix(const CFMatrixBundle& b, std::complex<double> nu, int order);

/// Real-valued base matrix derivatives at nu = 0 (all entries are real
/// there); order 0 is the base matrix itself.
Eigen::MatrixXd base_matrix_at_zero(const CFMatrixBundle& b, int order);

/// log|det| + i arg(det) with per-row scaling to keep pivots in range.
std::complex<double> log_det(ComplexMatrix m);

/// Evaluable capacity characteristic function. Immutable, evaluation is
/// pure and safe to call concurrently.
class CapacityCF {
  public:
    explicit CapacityCF(CFMatrixBundle bundle);

    const CFMatrixBundle& bundle() const { return bundle_; }

    /// phi_C(j omega) = E[e^{j omega C}]
    std::complex<double> evaluate(double omega) const;

    /// Phi(nu) = E[e^{nu C}] at general complex nu; evaluate(w) = Phi(jw)
    std::complex<double> evaluate_nu(std::complex<double> nu) const;

    double cond_estimate_at_zero() const { return cond_at_zero_; }

    std::function<std::complex<double>(double)> as_function() const;

  private:
    CFMatrixBundle bundle_;
    double cond_at_zero_ = 0.0;
};

CapacityCF build_correlated_cf(const ChannelConfig& config, const CorrelationPair& pair);
CapacityCF build_iid_cf(const ChannelConfig& config);
CapacityCF build_high_snr_cf(const ChannelConfig& config, const CorrelationPair& pair);

/// Principal-branch log Gamma for complex z with Re(z) > 0 (Lanczos).
std::complex<double> log_gamma(std::complex<double> z);

}  // namespace mimocap
