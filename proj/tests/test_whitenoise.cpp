#include "doctest.h"
#include "oracles.hpp"

#include "urf/errors.hpp"
#include "urf/whitenoise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace urf;

namespace {

Matrix columns(std::initializer_list<Vector> cols) {
    Matrix m(cols.begin()->size(), static_cast<Eigen::Index>(cols.size()));
    Eigen::Index j = 0;
    for (const Vector& c : cols) {
        m.col(j++) = c;
    }
    return m;
}

bool is_permutation_of_iota(const std::vector<int>& order) {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] != static_cast<int>(i)) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("whitenoise") {

TEST_CASE("lb_order identity and sorting") {
    oracle::Gen g(31);
    const Matrix x = columns({g.normal_matrix(300, 1).col(0), g.ar1(300, 0.8), g.ar1(300, 0.4)});
    const OrderedComponents keep = lb_order(x, 10, false);
    CHECK(keep.order == std::vector<int>{0, 1, 2});
    const OrderedComponents sorted = lb_order(x, 10, true);
    CHECK(is_permutation_of_iota(sorted.order));
    CHECK(std::is_sorted(sorted.pvalues.begin(), sorted.pvalues.end()));
    CHECK(sorted.order.front() == 1);
    CHECK(lb_order(x.leftCols(1), 10, true).order == std::vector<int>{0});
}

TEST_CASE("AR component is ordered ahead of an i.i.d. one") {
    int first = 0;
    for (int rep = 0; rep < 100; ++rep) {
        oracle::Gen g(3100 + rep);
        const Matrix x = columns({g.normal_matrix(500, 1).col(0), g.ar1(500, 0.8)});
        first += lb_order(x, 10, true).order.front() == 1;
    }
    CHECK(first >= 99);
}

TEST_CASE("constant components go last with p-value 1") {
    oracle::Gen g(32);
    const Matrix x = columns({Vector::Constant(200, 3.0), g.normal_matrix(200, 1).col(0)});
    const OrderedComponents o = lb_order(x, 5, true);
    CHECK(o.order == std::vector<int>{1, 0});
    CHECK(o.pvalues.back() == 1.0);
    CHECK(o.warning);
}

TEST_CASE("joint test threshold and statistic") {
    CHECK(hd_wn_threshold(1, 1, 0.05) == doctest::Approx(oracle::normal_quantile(0.975)).epsilon(1e-9));
    CHECK(hd_wn_threshold(1, 1, 0.05) == doctest::Approx(1.95996).epsilon(1e-5));
    CHECK(hd_wn_threshold(7, 10, 0.05) ==
          doctest::Approx(oracle::normal_quantile(1 - 0.05 / (2 * 49 * 10))).epsilon(1e-9));
    CHECK_THROWS_AS(hd_wn_threshold(0, 1, 0.05), ArgumentError);

    oracle::Gen g(33);
    const Vector x = g.normal_matrix(400, 1).col(0);
    const WhiteNoiseTest t = hd_wn_test(x, 1, 0.05);
    CHECK(t.statistic == doctest::Approx(std::sqrt(400.0) * std::abs(oracle::acf(x, 1))).epsilon(1e-10));
    // sqrt(400) * 0.05 = 1.0 stays below 1.96
    CHECK(std::sqrt(400.0) * 0.05 == doctest::Approx(1.0));
    CHECK(!(1.0 > t.threshold));
}

TEST_CASE("joint test statistic is scale invariant and uses cross lags") {
    oracle::Gen g(34);
    const Matrix x = g.normal_matrix(300, 3);
    Matrix scaled = x;
    scaled.col(0) *= 1e4;
    scaled.col(2) *= -3e-3;
    CHECK(hd_wn_test(x, 5, 0.05).statistic ==
          doctest::Approx(hd_wn_test(scaled, 5, 0.05).statistic).epsilon(1e-10));

    // second column leads the first by two steps
    Matrix lead = g.normal_matrix(1000, 2);
    for (int t = 2; t < 1000; ++t) lead(t, 0) = lead(t - 2, 1) + 0.3 * g.normal();
    CHECK(hd_wn_test(lead, 3, 0.05).reject);
    CHECK(!hd_wn_test(lead, 1, 0.05).reject);
}

TEST_CASE("joint test size on i.i.d. panels") {
    int rejects = 0;
    for (int rep = 0; rep < 200; ++rep) {
        oracle::Gen g(3400 + rep);
        rejects += hd_wn_test(g.normal_matrix(1000, 20), 10, 0.05).reject;
    }
    CHECK(rejects <= 16);
}

TEST_CASE("bottom-up count") {
    int zero = 0;
    int two = 0;
    for (int rep = 0; rep < 100; ++rep) {
        oracle::Gen g(3500 + rep);
        const R2Estimate white = estimate_r2_small(g.normal_matrix(2000, 4), 10, 0.05);
        zero += white.r2_hat == 0;
        CHECK(white.r2_hat + white.v_hat == 4);
        const Matrix mixed = columns({g.ar1(2000, 0.8), g.ar1(2000, 0.7),
                                      g.normal_matrix(2000, 1).col(0),
                                      g.normal_matrix(2000, 1).col(0)});
        const R2Estimate est = estimate_r2_small(mixed, 10, 0.05);
        two += est.r2_hat == 2 && est.v_hat == 2;
    }
    CHECK(zero >= 80);
    CHECK(two >= 90);
}

TEST_CASE("top-down count") {
    int all_white = 0;
    for (int rep = 0; rep < 100; ++rep) {
        oracle::Gen g(3600 + rep);
        const R2Estimate est = estimate_r2_large(g.normal_matrix(500, 40), 10, 0.05, true, 0.75);
        all_white += est.v_hat == 40;
        CHECK(est.r2_hat + est.v_hat == 40);
    }
    CHECK(all_white >= 85);
}

TEST_CASE("reordering helps when dependent components sit late") {
    oracle::Gen g(37);
    const int n = 800;
    Matrix x = g.normal_matrix(n, 12);
    x.col(9) = g.ar1(n, 0.8);
    x.col(11) = g.ar1(n, 0.7);
    const R2Estimate plain = estimate_r2_large(x, 10, 0.05, false, 0.75);
    const R2Estimate sorted = estimate_r2_large(x, 10, 0.05, true, 0.75);
    CHECK(sorted.r2_hat == 2);
    CHECK(sorted.v_hat >= plain.v_hat);
    CHECK(plain.r2_hat == 12);
}

TEST_CASE("truncation to floor(epsilon n) components when d >= n") {
    oracle::Gen g(38);
    const Matrix x = g.normal_matrix(40, 60);
    const R2Estimate est = estimate_r2_large(x, 5, 0.05, true, 0.75);
    CHECK(est.kept == 30);
    CHECK(est.r2_hat + est.v_hat == 60);
    CHECK(est.r2_hat <= 30);
}

}  // TEST_SUITE
