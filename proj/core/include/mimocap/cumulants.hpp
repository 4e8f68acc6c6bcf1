#pragma once

#include <vector>

#include "mimocap/cf.hpp"

namespace mimocap {

/// Solutions of the base-matrix linear systems at nu = 0.
///   poly[n]            = R^{-1}(0) R^{(n)}(0),        n = 1..max_order
///   dimatrix_derivs[k] = R_[1]^{(k)}(0),              k = 0..max_order-1
/// where R_[1] = poly[1] and the higher derivatives follow the recurrence
///   R_[1]^{(n-1)} = R_[n] - sum_{l=1}^{n-1} binom(n-1, l-1) R_[n-l] R_[1]^{(l-1)}.
struct PolymatrixSet {
    std::vector<Eigen::MatrixXd> poly;             ///< poly[0] unused identity slot
    std::vector<Eigen::MatrixXd> dimatrix_derivs;  ///< size max_order

    /// tr dimatrix_derivs[k], taken in the native precision of the pipeline
    /// that built the set. The correlated engine runs in quad precision: at
    /// high SNR the base matrix condition number reaches 1e11 and the
    /// polymatrix entries grow with it while their traces stay O(log eta),
    /// so double-precision traces lose every significant digit.
    std::vector<double> kappa_traces;

    /// Combined trace forms for orders 1..4 (no correction sums), the
    /// dimatrix-free cross-check route; filled when max_order >= 4.
    std::vector<double> trace_route;
};

/// Builds the set from a base matrix and its derivatives at zero. Throws
/// degeneracy_error when the base matrix is numerically singular.
PolymatrixSet polymatrix_set(const Eigen::MatrixXd& base,
                             const std::vector<Eigen::MatrixXd>& derivatives);

PolymatrixSet compute_polymatrices(const CFMatrixBundle& bundle, int max_order);

/// Cumulants kappa_1..kappa_N with the derived moment ladder.
struct CumulantSet {
    CFKind source = CFKind::iid;
    std::vector<double> kappa;            ///< kappa[k] = kappa_{k+1}
    std::vector<double> raw_moments;      ///< raw_moments[k] = m_{k+1}
    std::vector<double> central_moments;  ///< central_moments[k] = mu_{k+1}, mu_1 = 0
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;         ///< beta_1, needs max_order >= 3
    double kurtosis_excess = 0.0;  ///< beta_2, needs max_order >= 4
};

/// Fills raw/central moments and the shape statistics from kappa.
void moments_from_cumulants(CumulantSet& set);

CumulantSet cumulants_iid(const ChannelConfig& config, int max_order = 4);
CumulantSet cumulants_correlated(const ChannelConfig& config, const CorrelationPair& pair,
                                 int max_order = 4);
CumulantSet cumulants_high_snr(const ChannelConfig& config, const CorrelationPair& pair,
                               int max_order = 4);

/// First four statistics assembled directly from traces of the polymatrices
/// (plus the correction sums for the correlated kind); independent of the
/// dimatrix recurrence, kept as a cross-check route.
struct TraceStats {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis_excess = 0.0;
};

TraceStats trace_statistics(const PolymatrixSet& pm, CFKind kind, int n_s);

}  // namespace mimocap
