#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mimocap/identities.hpp"

using namespace mimocap;

namespace {

// brute-force left side: \int ... \int det[f_i(x_j)] det[g_i(x_j)]
// prod_k h(x_k) dx over [lo, hi]^m, via a tensorized Legendre rule
double determinant_integral_lhs(const std::vector<ScalarFunction>& f,
                                const std::vector<ScalarFunction>& g, const ScalarFunction& h,
                                double lo, double hi, int nodes) {
    const auto m = static_cast<int>(f.size());
    const QuadRule& gl = gauss_legendre(nodes);
    std::vector<double> x(nodes), w(nodes);
    for (int k = 0; k < nodes; ++k) {
        x[k] = lo + 0.5 * (hi - lo) * (gl.x[k] + 1.0);
        w[k] = 0.5 * (hi - lo) * gl.w[k];
    }

    std::vector<int> idx(m, 0);
    Eigen::MatrixXd fm(m, m), gm(m, m);
    double total = 0.0;
    while (true) {
        double weight = 1.0;
        for (int j = 0; j < m; ++j) {
            weight *= w[idx[j]] * h(x[idx[j]]);
            for (int i = 0; i < m; ++i) {
                fm(i, j) = f[i](x[idx[j]]);
                gm(i, j) = g[i](x[idx[j]]);
            }
        }
        total += weight * fm.determinant() * gm.determinant();
        int d = m - 1;
        while (d >= 0 && ++idx[d] == nodes) idx[d--] = 0;
        if (d < 0) break;
    }
    return total;
}

ScalarFunction random_poly(std::mt19937& rng) {
    std::uniform_real_distribution<double> cd(-1.0, 1.0);
    const double c0 = cd(rng), c1 = cd(rng), c2 = cd(rng), c3 = cd(rng);
    return [c0, c1, c2, c3](double x) { return c0 + x * (c1 + x * (c2 + x * c3)); };
}

}  // namespace

TEST_CASE("product-determinant integral identity") {
    std::mt19937 rng(60221023);
    const ScalarFunction weight = [](double x) { return std::exp(-x); };
    for (int m = 1; m <= 3; ++m) {
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<ScalarFunction> f, g;
            for (int i = 0; i < m; ++i) {
                f.push_back(random_poly(rng));
                g.push_back(random_poly(rng));
            }
            const double rhs = determinant_integral_rhs(f, g, weight, 0.0, 4.0, 32);
            const double lhs = determinant_integral_lhs(f, g, weight, 0.0, 4.0, 32);
            CHECK(std::abs(lhs - rhs) < 1e-6 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("determinant_integral_rhs input validation") {
    const ScalarFunction one = [](double) { return 1.0; };
    CHECK_THROWS_AS(determinant_integral_rhs({}, {}, one, 0.0, 1.0), domain_error);
    CHECK_THROWS_AS(determinant_integral_rhs({one}, {one, one}, one, 0.0, 1.0), domain_error);
}
