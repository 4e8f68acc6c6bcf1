#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "mimocap/cf.hpp"

using namespace mimocap;

namespace {

constexpr double kGamma = 0.5772156649015329;

CorrelationPair exponential_pair(const ChannelConfig& c, double rho_t, double rho_r) {
    const ComplexMatrix pt =
        make_exponential_correlation(c.n_t, rho_t).cast<std::complex<double>>();
    const ComplexMatrix pr =
        make_exponential_correlation(c.n_r, rho_r).cast<std::complex<double>>();
    return CorrelationPair::validate_and_decompose(pt, pr, c);
}

struct RandomScenario {
    ChannelConfig config;
    CapacityCF cf;
};

RandomScenario random_scenario(std::mt19937& rng, bool correlated) {
    std::uniform_int_distribution<int> ant(1, 4);
    std::uniform_real_distribution<double> snr(-5.0, 25.0);
    std::uniform_real_distribution<double> rho(0.1, 0.85);
    const ChannelConfig c = ChannelConfig::make(ant(rng), ant(rng), snr(rng));
    if (!correlated) return {c, build_iid_cf(c)};
    CorrelationPair pair = exponential_pair(c, rho(rng), rho(rng));
    SpectrumReport rep;
    pair = regularize_spectrum(pair, 1e-6, &rep);
    return {c, build_correlated_cf(c, pair)};
}

}  // namespace

TEST_CASE("phi(0) = 1 on random configurations") {
    std::mt19937 rng(314159);
    for (int trial = 0; trial < 50; ++trial) {
        const RandomScenario s = random_scenario(rng, trial % 2 == 0);
        CHECK(std::abs(s.cf.evaluate(0.0) - 1.0) < 1e-8);
    }
}

TEST_CASE("Hermitian symmetry and modulus bound") {
    std::mt19937 rng(2718);
    for (int trial = 0; trial < 8; ++trial) {
        const RandomScenario s = random_scenario(rng, trial % 2 == 0);
        std::uniform_real_distribution<double> wd(0.05, 50.0);
        for (int k = 0; k < 12; ++k) {
            const double w = wd(rng);
            const auto vp = s.cf.evaluate(w);
            const auto vm = s.cf.evaluate(-w);
            CHECK(std::abs(vp - std::conj(vm)) < 1e-10 * std::max(1.0, std::abs(vp)));
            CHECK(std::abs(vp) <= 1.0 + 1e-8);
        }
    }
}

TEST_CASE("iid base matrix structure at nu = 0") {
    // 2x2, eta_bar = 1: entries are (i+j-1)! -> det [[1, 1], [1, 2]] = 1
    const ChannelConfig c = ChannelConfig::make(2, 2, 10.0 * std::log10(2.0));
    REQUIRE(c.eta_bar == doctest::Approx(1.0).epsilon(1e-13));
    const CFMatrixBundle b = CFMatrixBundle::iid(c);
    const ComplexMatrix omega = build_omega_matrix(b, 0.0, 0);
    CHECK(omega(0, 0).real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(omega(0, 1).real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(omega(1, 0).real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(omega(1, 1).real() == doctest::Approx(2.0).epsilon(1e-10));
    // Hankel symmetry: entries depend on i + j only
    const ChannelConfig c3 = ChannelConfig::make(3, 3, 10.0 * std::log10(3.0));
    const ComplexMatrix o3 = build_omega_matrix(CFMatrixBundle::iid(c3), 0.0, 0);
    CHECK(std::abs(o3(0, 1) - o3(1, 0)) < 1e-12 * std::abs(o3(0, 1)));
    CHECK(std::abs(o3(0, 2) - o3(1, 1)) < 1e-12 * std::abs(o3(0, 2)));
    CHECK(std::abs(o3(1, 2) - o3(2, 1)) < 1e-12 * std::abs(o3(1, 2)));
    // det Omega(0) = K_iid
    const CFMatrixBundle b3 = CFMatrixBundle::iid(c3);
    const std::complex<double> ld = log_det(build_omega_matrix(b3, 0.0, 0));
    CHECK(ld.real() == doctest::Approx(b3.log_k_iid).epsilon(1e-10));
}

TEST_CASE("Lambda derivative structure") {
    const ChannelConfig c = ChannelConfig::make(4, 2, 12.0);
    const CorrelationPair pair = exponential_pair(c, 0.5, 0.7);
    const CFMatrixBundle b = CFMatrixBundle::correlated(c, pair);

    const ComplexMatrix d1 = build_lambda_derivative(b, 0.0, 1);
    // rows above the integral block do not depend on nu
    for (int j = 0; j < b.n_l; ++j)
        for (int i = 0; i < b.n_l - b.n_s; ++i) CHECK(std::abs(d1(i, j)) == 0.0);

    // finite differences of the base matrix against the analytic derivative
    const double h = 1e-5;
    const ComplexMatrix fp = build_lambda_matrix(b, h);
    const ComplexMatrix fm = build_lambda_matrix(b, -h);
    const ComplexMatrix fd = (fp - fm) / (2.0 * h);
    for (int i = 0; i < b.n_l; ++i)
        for (int j = 0; j < b.n_l; ++j) {
            const double scale = std::max(std::abs(d1(i, j)), 1.0);
            CHECK(std::abs(fd(i, j) - d1(i, j)) < 1e-6 * scale);
        }
}

TEST_CASE("correlated CF at real nu") {
    const ChannelConfig c = ChannelConfig::make(3, 3, 15.0);
    const CorrelationPair pair = exponential_pair(c, 0.5, 0.7);
    const CapacityCF cf = build_correlated_cf(c, pair);
    CHECK(std::abs(cf.evaluate_nu(0.0) - 1.0) < 1e-9);
    // Phi(nu) is a moment generating function: real, >= 1 near 0 by Jensen
    const double phi = cf.evaluate_nu(0.1).real();
    CHECK(cf.evaluate_nu(0.1).imag() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(phi > 1.0);
    CHECK(cf.cond_estimate_at_zero() > 0.0);
}

TEST_CASE("correlated engine approaches iid at regularized identity") {
    const ChannelConfig c = ChannelConfig::make(2, 2, 15.0);
    const CapacityCF iid = build_iid_cf(c);
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const auto pair = CorrelationPair::validate_and_decompose(id, id, c);

    const auto phi_at = [&](double eps, double w) {
        const auto reg = regularize_spectrum(pair, eps);
        return build_correlated_cf(c, reg).evaluate(w);
    };
    for (double w : {-10.0, -3.0, 0.7, 2.0, 10.0}) {
        const auto coarse = phi_at(1e-4, w);
        const auto fine = phi_at(1e-5, w);
        const auto ref = iid.evaluate(w);
        CHECK(std::abs(coarse - ref) < 1e-2);
        CHECK(std::abs(fine - ref) < 1e-3);
    }
}

TEST_CASE("square case is symmetric under side swap") {
    const ChannelConfig c = ChannelConfig::make(3, 3, 18.0);
    const CapacityCF ab = build_correlated_cf(c, exponential_pair(c, 0.4, 0.75));
    const CapacityCF ba = build_correlated_cf(c, exponential_pair(c, 0.75, 0.4));
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> wd(-30.0, 30.0);
    for (int k = 0; k < 20; ++k) {
        const double w = wd(rng);
        const auto va = ab.evaluate(w);
        const auto vb = ba.evaluate(w);
        CHECK(std::abs(va - vb) < 1e-9 * std::max(1.0, std::abs(va)));
    }
}

TEST_CASE("high-SNR characteristic function") {
    const ChannelConfig c = ChannelConfig::make(1, 1, 50.0);
    const ComplexMatrix id = ComplexMatrix::Identity(1, 1);
    const auto pair = CorrelationPair::validate_and_decompose(id, id, c);
    const CapacityCF cf = build_high_snr_cf(c, pair);
    CHECK(std::abs(cf.evaluate(0.0) - 1.0) < 1e-10);

    // mean from the log-CF slope: ln eta - gamma for the single antenna link
    const double h = 1e-6;
    const double mean =
        (std::log(cf.evaluate_nu(h)) - std::log(cf.evaluate_nu(-h))).real() / (2.0 * h);
    CHECK(mean == doctest::Approx(std::log(c.eta) - kGamma).epsilon(1e-6));

    const ChannelConfig c2 = ChannelConfig::make(2, 2, 40.0);
    const CapacityCF cf2 = build_high_snr_cf(c2, exponential_pair(c2, 0.5, 0.7));
    CHECK(std::abs(cf2.evaluate(0.0) - 1.0) < 1e-8);
    CHECK(std::abs(cf2.evaluate(1.3) - std::conj(cf2.evaluate(-1.3))) < 1e-10);
}

TEST_CASE("degenerate spectra raise degeneracy errors") {
    const ChannelConfig c = ChannelConfig::make(2, 2, 10.0);
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const auto pair = CorrelationPair::validate_and_decompose(id, id, c);
    CHECK_THROWS_AS(build_correlated_cf(c, pair), degeneracy_error);
    CHECK_THROWS_AS(build_high_snr_cf(c, pair), degeneracy_error);
}

TEST_CASE("log_gamma spot values") {
    CHECK(log_gamma({5.0, 0.0}).real() == doctest::Approx(std::lgamma(5.0)).epsilon(1e-12));
    // |Gamma(1 + i)| = sqrt(pi / sinh(pi))
    const double want = 0.5 * std::log(M_PI / std::sinh(M_PI));
    CHECK(log_gamma({1.0, 1.0}).real() == doctest::Approx(want).epsilon(1e-10));
}
