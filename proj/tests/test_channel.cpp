#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mimocap/channel.hpp"

using namespace mimocap;

TEST_CASE("channel config derived values") {
    const ChannelConfig c = ChannelConfig::make(4, 3, 15.0);
    CHECK(c.n_s == 3);
    CHECK(c.n_l == 4);
    CHECK(c.eta == doctest::Approx(std::pow(10.0, 1.5)).epsilon(1e-14));
    CHECK(c.eta_bar == doctest::Approx(c.eta / 4.0).epsilon(1e-14));
    CHECK(c.receive_side_small());
    CHECK_FALSE(ChannelConfig::make(2, 3, 0.0).receive_side_small());
    CHECK_THROWS_AS(ChannelConfig::make(0, 3, 0.0), validation_error);
    CHECK_THROWS_AS(ChannelConfig::make(3, -1, 0.0), validation_error);
}

TEST_CASE("exponential correlation matrix") {
    const Eigen::MatrixXd m = make_exponential_correlation(3, 0.5);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 0.5);
    CHECK(m(0, 2) == 0.25);
    CHECK(m(2, 0) == 0.25);
    CHECK(m.trace() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(make_exponential_correlation(3, 1.0), validation_error);
    CHECK_THROWS_AS(make_exponential_correlation(3, -0.1), validation_error);
}

TEST_CASE("validate_and_decompose") {
    const ChannelConfig c = ChannelConfig::make(3, 3, 10.0);
    const Eigen::MatrixXd et = make_exponential_correlation(3, 0.5);
    const ComplexMatrix id = ComplexMatrix::Identity(3, 3);

    SUBCASE("identity spectra") {
        const auto pair = CorrelationPair::validate_and_decompose(id, id, c);
        for (int k = 0; k < 3; ++k) {
            CHECK(pair.lambda()[k] == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(pair.sigma()[k] == doctest::Approx(1.0).epsilon(1e-13));
        }
    }

    SUBCASE("exponential spectrum facts") {
        const auto pair =
            CorrelationPair::validate_and_decompose(et.cast<std::complex<double>>(), id, c);
        // psi_t is the large side here (the 3x3 tie resolves to receive small)
        const Eigen::VectorXd spec = pair.sigma();
        CHECK(spec.sum() == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(spec[1] == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(spec[0] > 0.0);
        CHECK(spec[0] < spec[1]);
        CHECK(spec[1] < spec[2]);
    }

    SUBCASE("dimension mismatch") {
        const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
        CHECK_THROWS_AS(CorrelationPair::validate_and_decompose(id2, id, c), dimension_error);
        CHECK_THROWS_AS(CorrelationPair::validate_and_decompose(id, id2, c), dimension_error);
    }

    SUBCASE("non-Hermitian input") {
        ComplexMatrix bad = id;
        bad(0, 1) = {0.2, 0.1};
        bad(1, 0) = {0.3, 0.1};
        CHECK_THROWS_AS(CorrelationPair::validate_and_decompose(bad, id, c), validation_error);
    }

    SUBCASE("non positive definite input") {
        ComplexMatrix bad = id;
        bad(0, 1) = bad(1, 0) = 1.5;
        CHECK_THROWS_AS(CorrelationPair::validate_and_decompose(bad, id, c), validation_error);
    }

    SUBCASE("unit diagonal enforcement") {
        ComplexMatrix off = id;
        off(0, 0) = 1.01;
        CHECK_THROWS_AS(CorrelationPair::validate_and_decompose(off, id, c), validation_error);
        ValidationOptions opts;
        opts.permissive_diagonal = true;
        const auto pair = CorrelationPair::validate_and_decompose(off, id, c, opts);
        CHECK(pair.diagonal_deviation_noted());
    }
}

TEST_CASE("regularize_spectrum") {
    const ChannelConfig c = ChannelConfig::make(2, 2, 10.0);
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const auto pair = CorrelationPair::validate_and_decompose(id, id, c);

    SpectrumReport report;
    const auto reg = regularize_spectrum(pair, 1e-4, &report);
    CHECK(report.regularized);
    CHECK(reg.lambda()[0] == doctest::Approx(1.0 - 5e-5).epsilon(1e-9));
    CHECK(reg.lambda()[1] == doctest::Approx(1.0 + 5e-5).epsilon(1e-9));
    CHECK(reg.lambda().sum() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(reg.sigma().sum() == doctest::Approx(2.0).epsilon(1e-12));

    // already distinct spectra pass through untouched
    const Eigen::MatrixXd et = make_exponential_correlation(2, 0.6);
    const auto distinct = CorrelationPair::validate_and_decompose(
        et.cast<std::complex<double>>(), et.cast<std::complex<double>>(), c);
    SpectrumReport report2;
    const auto same = regularize_spectrum(distinct, 1e-4, &report2);
    CHECK_FALSE(report2.regularized);
    CHECK(same.lambda().isApprox(distinct.lambda(), 0.0));
}

TEST_CASE("CORRMAT round trip") {
    ComplexMatrix pt(2, 2), pr(3, 3);
    pt << std::complex<double>(1.0, 0.0), std::complex<double>(0.5, 0.3),
        std::complex<double>(0.5, -0.3), std::complex<double>(1.0, 0.0);
    const Eigen::MatrixXd er = make_exponential_correlation(3, 0.7);
    pr = er.cast<std::complex<double>>();

    std::stringstream ss;
    write_correlation_matrices(ss, pt, pr);
    const auto [rt, rr] = read_correlation_matrices(ss);
    REQUIRE(rt.rows() == 2);
    REQUIRE(rr.rows() == 3);
    CHECK((rt - pt).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rr - pr).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("CORRMAT parse errors carry line numbers") {
    SUBCASE("bad header") {
        std::stringstream ss("CORRMAT v2 2 2\n");
        try {
            read_correlation_matrices(ss);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 1);
        }
    }
    SUBCASE("bad entry") {
        std::stringstream ss("CORRMAT v1 2 2\n1 0\n0 oops\n\n1 0\n0 1\n");
        try {
            read_correlation_matrices(ss);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("complex literal accepted") {
        std::stringstream ss(
            "CORRMAT v1 2 2\n"
            "1 0.5+0.3i\n0.5-0.3i 1\n\n1 0\n0 1\n");
        const auto [pt, pr] = read_correlation_matrices(ss);
        CHECK(pt(0, 1).real() == doctest::Approx(0.5));
        CHECK(pt(0, 1).imag() == doctest::Approx(0.3));
        CHECK(pr(1, 1).real() == doctest::Approx(1.0));
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(ingest_correlation_file("/nonexistent/corr.txt"), io_error);
    }
}

TEST_CASE("hermitian_eigenvalues sorted ascending") {
    const Eigen::MatrixXd et = make_exponential_correlation(4, 0.8);
    const Eigen::VectorXd ev = hermitian_eigenvalues(et.cast<std::complex<double>>());
    for (int k = 1; k < ev.size(); ++k) CHECK(ev[k] >= ev[k - 1]);
    CHECK(ev.sum() == doctest::Approx(4.0).epsilon(1e-12));
}
