#pragma once

#include "urf/tsstats.hpp"

#include <vector>

namespace urf {

/// Transformed components together with the testing order.
struct OrderedComponents {
    Matrix series;            ///< n x d, columns in original (eigenvalue) order
    std::vector<int> order;   ///< order[k] = original column tested at position k
    std::vector<double> pvalues;  ///< Ljung-Box p-value of column order[k]
    std::vector<bool> degenerate;  ///< aligned to order; constant columns
    bool warning = false;     ///< true if any column was degenerate
};

/**
 * Per-component Ljung-Box p-values. With reorder the permutation sorts p-values
 * ascending (most serially dependent first, ties kept in eigenvalue order);
 * otherwise the identity order is kept. Constant components get p-value 1 and
 * are placed last.
 */
OrderedComponents lb_order(const Matrix& xi, int m, bool reorder);

struct WhiteNoiseTest {
    bool reject = false;
    double statistic = 0.0;
    double threshold = 0.0;
    int excluded = 0;  ///< degenerate columns left out of the max
};

/// Bonferroni-Gaussian critical value for d components and m lags.
double hd_wn_threshold(int d, int m, double alpha);

/**
 * Joint white-noise test: T = sqrt(n) * max over lags 1..m and all ordered
 * component pairs of |sample cross-correlation|, rejected when T exceeds
 * Phi^{-1}(1 - alpha / (2 d^2 m)).
 */
WhiteNoiseTest hd_wn_test(const Matrix& xi, int m, double alpha);

/// Outcome of a white-noise count. order lists components by testing position;
/// the first r2_hat entries are the ones judged serially dependent.
struct R2Estimate {
    int r2_hat = 0;
    int v_hat = 0;
    std::vector<int> order;
    std::vector<double> pvalues;
    int kept = 0;  ///< components entering the joint test (after truncation)
    std::vector<WhiteNoiseTest> tests;
    bool warning = false;
};

/**
 * Bottom-up count for small dimensions: test the last component (in testing
 * order), then the one before, ... with a Ljung-Box test at level alpha. The
 * first non-white component at position i gives r2_hat = i.
 */
R2Estimate estimate_r2_small(const Matrix& xi, int m, double alpha, bool reorder = false);

/**
 * Top-down count for large dimensions: run hd_wn_test on the current set,
 * dropping the leading component after each rejection. When d >= n only the
 * leading floor(epsilon n) components are tested and the truncated tail is
 * counted as white noise.
 */
R2Estimate estimate_r2_large(const Matrix& xi, int m, double alpha, bool reorder,
                             double epsilon);

}  // namespace urf
