#include "mimocap/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>

namespace mimocap {
namespace {

// Golub-Welsch: eigen-decompose the Jacobi matrix of the orthogonal
// polynomial recurrence. Stable for the node counts used here.
QuadRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                      double total_weight) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        jacobi(i, i) = diag(i);
        if (i + 1 < n) {
            jacobi(i, i + 1) = offdiag(i);
            jacobi(i + 1, i) = offdiag(i);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    QuadRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.w[i] = total_weight * v0 * v0;
    }
    return rule;
}

QuadRule make_laguerre(int n) {
    Eigen::VectorXd diag(n), offdiag(n - 1);
    for (int i = 0; i < n; ++i) diag(i) = 2.0 * i + 1.0;
    for (int i = 0; i + 1 < n; ++i) offdiag(i) = static_cast<double>(i + 1);
    return golub_welsch(diag, offdiag, 1.0);  // \int_0^inf e^{-t} dt = 1
}

QuadRule make_legendre(int n) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd offdiag(n - 1);
    for (int i = 1; i < n; ++i) {
        offdiag(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
    }
    return golub_welsch(diag, offdiag, 2.0);  // \int_{-1}^{1} dt = 2
}

template <typename Maker>
const QuadRule& cached(std::map<int, QuadRule>& cache, std::mutex& mtx, int n, Maker maker) {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, maker(n)).first;
    return it->second;
}

}  // namespace

const QuadRule& gauss_laguerre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    return cached(cache, mtx, n, make_laguerre);
}

const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    return cached(cache, mtx, n, make_legendre);
}

}  // namespace mimocap
