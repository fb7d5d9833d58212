#include "doctest.h"
#include "oracles.hpp"

#include "urf/errors.hpp"
#include "urf/tsstats.hpp"

#include <cmath>

using namespace urf;

TEST_SUITE("tsstats") {

TEST_CASE("panel validation") {
    CHECK_THROWS_AS(TimeSeriesPanel(Matrix::Zero(1, 3)), ArgumentError);
    CHECK_THROWS_AS(TimeSeriesPanel(Matrix::Zero(5, 0)), ArgumentError);
    Matrix bad = Matrix::Zero(4, 2);
    bad(2, 1) = std::nan("");
    CHECK_THROWS_AS(TimeSeriesPanel{bad}, ArgumentError);
    const TimeSeriesPanel ok(Matrix::Ones(4, 2));
    CHECK(ok.n() == 4);
    CHECK(ok.p() == 2);
}

TEST_CASE("autocovariance hand values") {
    Matrix y(2, 1);
    y << 1, 3;
    CHECK(sample_autocov(y, 0).matrix(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sample_autocov(y, 1).matrix(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(sample_autocov(y, 1).lag == 1);
    CHECK_THROWS_AS(sample_autocov(y, 2), ArgumentError);
    CHECK_THROWS_AS(sample_autocov(y, -1), ArgumentError);
}

TEST_CASE("constant panel has zero autocovariances") {
    const Matrix y = Matrix::Constant(10, 3, 2.5);
    for (int k = 0; k <= 8; ++k) {
        CHECK(sample_autocov(y, k).matrix.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("autocovariance matches the summation oracle") {
    oracle::Gen g(11);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = g.integer(3, 60);
        const int p = g.integer(1, 6);
        const Matrix y = g.normal_matrix(n, p);
        const int k = g.integer(0, n - 2);
        const Matrix got = sample_autocov(y, k).matrix;
        CHECK((got - oracle::autocov(y, k)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("lag-0 autocovariance is symmetric PSD") {
    oracle::Gen g(12);
    const Matrix y = g.normal_matrix(40, 8);
    const Matrix s = sample_autocov(y, 0).matrix;
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(sym_eigen(s).values.minCoeff() >= -1e-10 * s.trace());
}

TEST_CASE("acf hand values") {
    Vector x(4);
    x << 1, -1, 1, -1;
    CHECK(sample_acf(x, 0) == doctest::Approx(1.0));
    CHECK(sample_acf(x, 1) == doctest::Approx(-0.75).epsilon(1e-12));
    Vector c = Vector::Constant(3, 2.0);
    CHECK_THROWS_AS(sample_acf(c, 1), DegenerateSeriesError);
}

TEST_CASE("acf matches the oracle and stays in [-1, 1]") {
    oracle::Gen g(13);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = g.integer(4, 80);
        const Vector x = g.ar1(n, g.uniform(-0.99, 0.99));
        for (int k = 0; k <= n - 2; k += 3) {
            const double r = sample_acf(x, k);
            CHECK(std::abs(r) <= 1.0);
            CHECK(r == doctest::Approx(oracle::acf(x, k)).epsilon(1e-10));
        }
    }
}

TEST_CASE("Ljung-Box hand value and chi-square tail") {
    Vector x(4);
    x << 1, -1, 1, -1;
    const LjungBoxResult lb = ljung_box(x, 1);
    CHECK(lb.statistic == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(std::abs(lb.pvalue - oracle::chi2_sf(4.5, 1)) < 1e-6);
    CHECK(std::abs(lb.pvalue - 0.0339) < 1e-4);
}

TEST_CASE("Ljung-Box matches the oracle and grows with m") {
    oracle::Gen g(14);
    const Vector x = g.ar1(200, 0.3);
    double prev = 0.0;
    for (int m = 1; m <= 20; ++m) {
        const LjungBoxResult lb = ljung_box(x, m);
        CHECK(lb.statistic == doctest::Approx(oracle::ljung_box_q(x, m)).epsilon(1e-10));
        CHECK(lb.statistic >= prev);
        CHECK(lb.pvalue >= 0.0);
        CHECK(lb.pvalue <= 1.0);
        prev = lb.statistic;
    }
    CHECK_THROWS_AS(ljung_box(x, 0), ArgumentError);
    CHECK_THROWS_AS(ljung_box(Vector::Ones(10), 2), DegenerateSeriesError);
}

TEST_CASE("chi-square survival function") {
    CHECK(chi2_sf(0.0, 2) == 1.0);
    CHECK(chi2_sf(2.0 * std::log(2.0), 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(chi2_sf(4.5, 1) - std::erfc(std::sqrt(2.25))) < 1e-12);
    CHECK_THROWS_AS(chi2_sf(-1.0, 2), ArgumentError);
    CHECK_THROWS_AS(chi2_sf(1.0, 0), ArgumentError);
}

TEST_CASE("chi-square agrees with quadrature on a grid") {
    double worst = 0.0;
    for (int df = 1; df <= 50; df += 7) {
        double prev = 1.0;
        for (double x = 0.0; x <= 100.0; x += 2.5) {
            const double v = chi2_sf(x, df);
            worst = std::max(worst, std::abs(v - oracle::chi2_sf(x, df)));
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("normal quantile inverts the cdf") {
    for (double p : {1e-10, 1e-4, 0.025, 0.3, 0.5, 0.8, 0.975, 1 - 1e-9}) {
        CHECK(normal_quantile(p) == doctest::Approx(oracle::normal_quantile(p)).epsilon(1e-9));
    }
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("sym_eigen small cases") {
    Matrix d(2, 2);
    d << 1, 0, 0, 3;
    const EigenDecomposition e = sym_eigen(d);
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));

    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    const EigenDecomposition f = sym_eigen(s);
    CHECK(f.values(0) == doctest::Approx(1.0));
    CHECK(f.values(1) == doctest::Approx(-1.0));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(f.vectors(0, 0)) == doctest::Approx(r));
    CHECK(f.vectors(0, 0) * f.vectors(1, 0) == doctest::Approx(0.5));
    CHECK(f.vectors(0, 1) * f.vectors(1, 1) == doctest::Approx(-0.5));

    Matrix bad = d;
    bad(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(sym_eigen(bad), ArgumentError);
}

TEST_CASE("sym_eigen contract on random matrices") {
    oracle::Gen g(15);
    for (int q : {1, 3, 17, 120, 600}) {
        const Matrix a = g.normal_matrix(q, q);
        const Matrix m = (a + a.transpose()) / 2.0;
        const EigenDecomposition e = sym_eigen(m);
        const Matrix& v = e.vectors;
        CHECK((v.transpose() * v - Matrix::Identity(q, q)).cwiseAbs().maxCoeff() < 1e-8);
        const Matrix recon = v * e.values.asDiagonal() * v.transpose();
        CHECK(sym_spectral_norm(m - recon) <= 1e-8 * std::max(1.0, sym_spectral_norm(m)));
        CHECK(e.values.sum() == doctest::Approx(m.trace()).epsilon(1e-9).scale(q));
        for (int i = 0; i + 1 < q; ++i) {
            CHECK(e.values(i) >= e.values(i + 1));
        }
        // sign convention: largest-magnitude entry of each column is positive
        for (int j = 0; j < q; ++j) {
            Eigen::Index at = 0;
            v.col(j).cwiseAbs().maxCoeff(&at);
            CHECK(v(at, j) > 0.0);
        }
    }
}

}  // TEST_SUITE
