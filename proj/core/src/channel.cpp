#include "mimocap/channel.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace mimocap {
namespace {

double min_adjacent_rel_gap(const Eigen::VectorXd& v) {
    if (v.size() < 2) return std::numeric_limits<double>::infinity();
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
        const double mid = 0.5 * (v(i) + v(i + 1));
        g = std::min(g, (v(i + 1) - v(i)) / mid);
    }
    return g;
}

std::complex<double> parse_complex_literal(const std::string& tok, int line) {
    std::string s = tok;
    bool has_i = !s.empty() && (s.back() == 'i' || s.back() == 'j');
    if (has_i) s.pop_back();
    try {
        if (!has_i) {
            std::size_t used = 0;
            const double re = std::stod(s, &used);
            if (used != s.size()) throw parse_error("trailing characters in number '" + tok + "'", line);
            return {re, 0.0};
        }
        // locate the sign splitting real and imaginary parts (not a leading
        // sign, not an exponent sign)
        std::size_t split = std::string::npos;
        for (std::size_t k = s.size(); k-- > 1;) {
            if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
                split = k;
                break;
            }
        }
        if (split == std::string::npos) {
            // pure imaginary, e.g. "0.5i" or "-i"
            if (s.empty() || s == "+") return {0.0, 1.0};
            if (s == "-") return {0.0, -1.0};
            std::size_t used = 0;
            const double im = std::stod(s, &used);
            if (used != s.size()) throw parse_error("bad imaginary literal '" + tok + "'", line);
            return {0.0, im};
        }
        std::size_t used = 0;
        const double re = std::stod(s.substr(0, split), &used);
        if (used != split) throw parse_error("bad real part in '" + tok + "'", line);
        std::string imtok = s.substr(split);
        if (imtok == "+") return {re, 1.0};
        if (imtok == "-") return {re, -1.0};
        const double im = std::stod(imtok, &used);
        if (used != imtok.size()) throw parse_error("bad imaginary part in '" + tok + "'", line);
        return {re, im};
    } catch (const std::invalid_argument&) {
        throw parse_error("malformed complex literal '" + tok + "'", line);
    } catch (const std::out_of_range&) {
        throw parse_error("number out of range '" + tok + "'", line);
    }
}

std::string render_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string render_complex(const std::complex<double>& z) {
    if (z.imag() == 0.0) return render_double(z.real());
    std::string s = render_double(z.real());
    s += (z.imag() < 0.0 ? "-" : "+");
    s += render_double(std::abs(z.imag()));
    s += "i";
    return s;
}

// Reads `n` rows of `n` complex literals, skipping comments/blank lines.
ComplexMatrix read_matrix_block(std::istream& in, int n, int& line_no) {
    ComplexMatrix m(n, n);
    int row = 0;
    std::string line;
    while (row < n && std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ls >> tok) toks.push_back(tok);
        if (toks.empty()) continue;
        if (static_cast<int>(toks.size()) != n)
            throw parse_error("expected " + std::to_string(n) + " entries, got " +
                                  std::to_string(toks.size()),
                              line_no);
        for (int j = 0; j < n; ++j) m(row, j) = parse_complex_literal(toks[j], line_no);
        ++row;
    }
    if (row < n) throw parse_error("unexpected end of file inside matrix block", line_no);
    return m;
}

void spread_clusters(Eigen::VectorXd& v, double epsilon, bool& changed) {
    const Eigen::Index n = v.size();
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n) {
            const double mid = 0.5 * (v(j) + v(j + 1));
            if ((v(j + 1) - v(j)) / mid < epsilon)
                ++j;
            else
                break;
        }
        const Eigen::Index m = j - i + 1;
        if (m > 1) {
            const double mean = v.segment(i, m).mean();
            for (Eigen::Index k = 0; k < m; ++k) {
                v(i + k) = mean + mean * epsilon * (static_cast<double>(k) / (m - 1) - 0.5);
            }
            changed = true;
        }
        i = j + 1;
    }
}

}  // namespace

ChannelConfig ChannelConfig::make(int n_t, int n_r, double snr_db) {
    if (n_t < 1 || n_r < 1) throw validation_error("antenna counts must be >= 1");
    ChannelConfig c;
    c.n_t = n_t;
    c.n_r = n_r;
    c.snr_db = snr_db;
    c.eta = std::pow(10.0, snr_db / 10.0);
    c.eta_bar = c.eta / n_t;
    c.n_s = std::min(n_t, n_r);
    c.n_l = std::max(n_t, n_r);
    return c;
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
    const double residue = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (residue > 1e-10)
        throw error("hermitian_eigenvalues: matrix is not Hermitian (residue " +
                    std::to_string(residue) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw error("hermitian eigenvalue decomposition failed");
    return es.eigenvalues();  // ascending
}

Eigen::MatrixXd make_exponential_correlation(int n, double rho) {
    if (n < 1) throw validation_error("exponential correlation: n must be >= 1");
    if (!(rho >= 0.0) || rho >= 1.0)
        throw validation_error("exponential correlation: rho must lie in [0, 1)");
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = std::pow(rho, std::abs(i - j));
    return m;
}

CorrelationPair CorrelationPair::validate_and_decompose(const ComplexMatrix& psi_t,
                                                        const ComplexMatrix& psi_r,
                                                        const ChannelConfig& config,
                                                        const ValidationOptions& opts) {
    if (psi_t.rows() != psi_t.cols() || psi_r.rows() != psi_r.cols())
        throw dimension_error("correlation matrices must be square");
    if (psi_t.rows() != config.n_t)
        throw dimension_error("psi_t is " + std::to_string(psi_t.rows()) + "x" +
                              std::to_string(psi_t.cols()) + ", expected " +
                              std::to_string(config.n_t));
    if (psi_r.rows() != config.n_r)
        throw dimension_error("psi_r is " + std::to_string(psi_r.rows()) + "x" +
                              std::to_string(psi_r.cols()) + ", expected " +
                              std::to_string(config.n_r));

    CorrelationPair pair;
    pair.psi_t_ = psi_t;
    pair.psi_r_ = psi_r;
    pair.small_is_receive_ = config.receive_side_small();

    for (const auto* m : {&psi_t, &psi_r}) {
        const char* name = (m == &psi_t) ? "psi_t" : "psi_r";
        const double herm = (*m - m->adjoint()).cwiseAbs().maxCoeff();
        if (herm > opts.hermitian_tol)
            throw validation_error(std::string(name) + " is not Hermitian (max |A - A^H| = " +
                                   std::to_string(herm) + ")");
        double diag_dev = 0.0;
        for (Eigen::Index i = 0; i < m->rows(); ++i)
            diag_dev = std::max(diag_dev, std::abs((*m)(i, i) - std::complex<double>(1.0)));
        if (diag_dev > opts.unit_diagonal_tol) {
            if (!opts.permissive_diagonal)
                throw validation_error(std::string(name) +
                                       " diagonal deviates from unity by " +
                                       std::to_string(diag_dev));
            pair.diagonal_deviation_noted_ = true;
        }
    }

    Eigen::VectorXd eig_t = hermitian_eigenvalues(psi_t);
    Eigen::VectorXd eig_r = hermitian_eigenvalues(psi_r);
    for (const auto* v : {&eig_t, &eig_r}) {
        if ((*v)(0) <= 0.0)
            throw validation_error("correlation matrix is not positive definite (min eigenvalue " +
                                   std::to_string((*v)(0)) + ")");
    }
    pair.lambda_ = pair.small_is_receive_ ? eig_r : eig_t;
    pair.sigma_ = pair.small_is_receive_ ? eig_t : eig_r;
    return pair;
}

double CorrelationPair::min_rel_gap_small() const { return min_adjacent_rel_gap(lambda_); }
double CorrelationPair::min_rel_gap_large() const { return min_adjacent_rel_gap(sigma_); }

CorrelationPair regularize_spectrum(const CorrelationPair& pair, double epsilon,
                                    SpectrumReport* report) {
    if (!(epsilon > 0.0)) throw domain_error("regularize_spectrum: epsilon must be positive");
    CorrelationPair out = pair;
    bool changed = false;
    spread_clusters(out.lambda_, epsilon, changed);
    spread_clusters(out.sigma_, epsilon, changed);
    if (report) {
        report->min_rel_gap_small = out.min_rel_gap_small();
        report->min_rel_gap_large = out.min_rel_gap_large();
        report->regularized = changed;
        report->epsilon_used = changed ? epsilon : 0.0;
    }
    return out;
}

std::pair<ComplexMatrix, ComplexMatrix> read_correlation_matrices(std::istream& in) {
    int line_no = 0;
    std::string line;
    int n_t = 0, n_r = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string magic, version;
        if (!(ls >> magic)) continue;
        if (magic != "CORRMAT") throw parse_error("missing CORRMAT header", line_no);
        if (!(ls >> version >> n_t >> n_r) || version != "v1")
            throw parse_error("bad header, expected 'CORRMAT v1 <n_t> <n_r>'", line_no);
        if (n_t < 1 || n_r < 1) throw parse_error("antenna counts must be positive", line_no);
        have_header = true;
        break;
    }
    if (!have_header) throw parse_error("missing CORRMAT header", line_no);
    ComplexMatrix psi_t = read_matrix_block(in, n_t, line_no);
    ComplexMatrix psi_r = read_matrix_block(in, n_r, line_no);
    return {psi_t, psi_r};
}

std::pair<ComplexMatrix, ComplexMatrix> ingest_correlation_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open correlation file: " + path);
    return read_correlation_matrices(in);
}

void write_correlation_matrices(std::ostream& out, const ComplexMatrix& psi_t,
                                const ComplexMatrix& psi_r) {
    out << "CORRMAT v1 " << psi_t.rows() << " " << psi_r.rows() << "\n";
    for (const auto* m : {&psi_t, &psi_r}) {
        for (Eigen::Index i = 0; i < m->rows(); ++i) {
            for (Eigen::Index j = 0; j < m->cols(); ++j) {
                if (j) out << " ";
                out << render_complex((*m)(i, j));
            }
            out << "\n";
        }
        if (m == &psi_t) out << "\n";
    }
}

void write_correlation_file(const std::string& path, const ComplexMatrix& psi_t,
                            const ComplexMatrix& psi_r) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open file for writing: " + path);
    write_correlation_matrices(out, psi_t, psi_r);
}

}  // namespace mimocap
