#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <utility>

#include "mimocap/errors.hpp"

namespace mimocap {

using ComplexMatrix = Eigen::MatrixXcd;

/// Antenna counts and SNR, with the derived small/large side ordering.
struct ChannelConfig {
    int n_t = 1;          ///< transmit antennas
    int n_r = 1;          ///< receive antennas
    double snr_db = 0.0;  ///< eta in dB

    double eta = 1.0;      ///< linear SNR
    double eta_bar = 1.0;  ///< eta / n_t
    int n_s = 1;           ///< min(n_t, n_r)
    int n_l = 1;           ///< max(n_t, n_r)

    static ChannelConfig make(int n_t, int n_r, double snr_db);

    /// true when the receive side carries the smaller antenna count
    bool receive_side_small() const { return n_r <= n_t; }
};

struct ValidationOptions {
    double hermitian_tol = 1e-12;
    double unit_diagonal_tol = 1e-12;
    bool permissive_diagonal = false;  ///< demote unit-diagonal violation to a note
};

/// What (if anything) spectrum regularization changed.
struct SpectrumReport {
    double min_rel_gap_small = 0.0;
    double min_rel_gap_large = 0.0;
    bool regularized = false;
    double epsilon_used = 0.0;
};

/// Transmit/receive correlation matrices with validated, sorted spectra.
/// Immutable after construction.
class CorrelationPair {
  public:
    static CorrelationPair validate_and_decompose(const ComplexMatrix& psi_t,
                                                  const ComplexMatrix& psi_r,
                                                  const ChannelConfig& config,
                                                  const ValidationOptions& opts = {});

    const ComplexMatrix& psi_t() const { return psi_t_; }
    const ComplexMatrix& psi_r() const { return psi_r_; }
    const ComplexMatrix& psi_s() const { return small_is_receive_ ? psi_r_ : psi_t_; }
    const ComplexMatrix& psi_l() const { return small_is_receive_ ? psi_t_ : psi_r_; }

    /// ascending eigenvalues of psi_s
    const Eigen::VectorXd& lambda() const { return lambda_; }
    /// ascending eigenvalues of psi_l
    const Eigen::VectorXd& sigma() const { return sigma_; }

    double min_rel_gap_small() const;
    double min_rel_gap_large() const;
    bool diagonal_deviation_noted() const { return diagonal_deviation_noted_; }

    friend CorrelationPair regularize_spectrum(const CorrelationPair& pair, double epsilon,
                                               SpectrumReport* report);

  private:
    CorrelationPair() = default;

    ComplexMatrix psi_t_, psi_r_;
    Eigen::VectorXd lambda_, sigma_;
    bool small_is_receive_ = true;
    bool diagonal_deviation_noted_ = false;
};

/// n x n matrix with entries rho^|i-j|, 0 <= rho < 1.
Eigen::MatrixXd make_exponential_correlation(int n, double rho);

/// Spreads eigenvalue clusters whose relative gap is below epsilon so they
/// become distinct, preserving the trace of each spectrum. No-op (and
/// report.regularized = false) when all gaps already exceed epsilon.
CorrelationPair regularize_spectrum(const CorrelationPair& pair, double epsilon,
                                    SpectrumReport* report = nullptr);

/// CORRMAT v1 text format: header `CORRMAT v1 <n_t> <n_r>`, then the psi_t
/// rows, a blank line, and the psi_r rows. `#` starts a comment.
std::pair<ComplexMatrix, ComplexMatrix> read_correlation_matrices(std::istream& in);
std::pair<ComplexMatrix, ComplexMatrix> ingest_correlation_file(const std::string& path);
void write_correlation_matrices(std::ostream& out, const ComplexMatrix& psi_t,
                                const ComplexMatrix& psi_r);
void write_correlation_file(const std::string& path, const ComplexMatrix& psi_t,
                            const ComplexMatrix& psi_r);

/// Ascending eigenvalues of a Hermitian matrix; imaginary residue above
/// 1e-10 in the decomposition is treated as an internal error.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m);

}  // namespace mimocap
