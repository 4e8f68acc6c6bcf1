#pragma once

#include <cstddef>
#include <vector>

namespace mimocap {

/// Nodes and weights of a Gaussian quadrature rule.
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

/// Gauss-Laguerre rule for \int_0^inf f(t) e^{-t} dt (weight included in w).
/// Rules are computed once per node count and cached.
const QuadRule& gauss_laguerre(int n);

/// Gauss-Legendre rule on [-1, 1].
const QuadRule& gauss_legendre(int n);

/// Node counts used by the adaptive Laguerre escalation, in order.
inline constexpr int kLaguerreLevels[] = {64, 128, 256, 512, 1024};

}  // namespace mimocap
