#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "mimocap/errors.hpp"
#include "mimocap/quadrature.hpp"

namespace mimocap {

using ScalarFunction = std::function<double(double)>;

/// m! det[ \int_lo^hi f_i(x) g_j(x) h(x) dx ], the closed-form side of the
/// product-determinant integral identity. The brute-force multidimensional
/// side lives with its tests.
inline double determinant_integral_rhs(const std::vector<ScalarFunction>& f,
                                       const std::vector<ScalarFunction>& g,
                                       const ScalarFunction& h, double lo, double hi,
                                       int nodes = 64) {
    const auto m = static_cast<Eigen::Index>(f.size());
    if (m == 0 || g.size() != f.size()) throw domain_error("determinant_integral_rhs: bad sizes");
    const QuadRule& gl = gauss_legendre(nodes);
    Eigen::MatrixXd phi(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < gl.x.size(); ++k) {
                const double x = lo + 0.5 * (hi - lo) * (gl.x[k] + 1.0);
                s += gl.w[k] * f[i](x) * g[j](x) * h(x);
            }
            phi(i, j) = 0.5 * (hi - lo) * s;
        }
    }
    double factorial = 1.0;
    for (Eigen::Index k = 2; k <= m; ++k) factorial *= static_cast<double>(k);
    return factorial * phi.determinant();
}

}  // namespace mimocap
