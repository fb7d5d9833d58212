#pragma once

#include "urf/tsstats.hpp"

#include <vector>

namespace urf {

/// Tuning for the ACF-threshold count of unit-root components.
struct R1Params {
    double c0 = 0.3;     ///< threshold on the averaged ACF, in (0, 1)
    int gap = 3;         ///< spacing l between probed lags
    int terms = 10;      ///< number m of probed lags 1, 1+l, ..., 1+(m-1)l
    bool absolute = true;  ///< average |rho| (a*) rather than signed rho (a)

    [[nodiscard]] int max_lag() const noexcept { return 1 + (terms - 1) * gap; }

    /// Throws ArgumentError if the parameters are invalid for a series of length n.
    void validate(Eigen::Index n) const;
};

/**
 * Unit-root / stationary split of the sample space.
 *
 * A1 holds the r1_hat leading eigenvectors of M1 and A2 the rest, so [A1 A2] is
 * orthonormal and A1 * x1.row(t)' + A2 * x2.row(t)' reproduces y_t.
 */
struct UnitRootSplit {
    int r1_hat = 0;
    Matrix A1;  ///< p x r1_hat
    Matrix A2;  ///< p x (p - r1_hat)
    Matrix x1;  ///< n x r1_hat recovered unit-root factor paths
    Matrix x2;  ///< n x (p - r1_hat) recovered stationary paths
    Vector eigenvalues;  ///< spectrum of M1, descending
    /// S_i(l,m)/m per transformed component (only filled by estimate_r1).
    std::vector<double> s_values;
    /// Components treated as stationary because they have zero variance.
    std::vector<int> degenerate_components;
};

/// M1 = sum_{k=0..k0} Sigma_y(k) Sigma_y(k)'. Symmetric PSD.
Matrix build_M1(const TimeSeriesPanel& panel, int k0);
Matrix build_M1(const Matrix& panel, int k0);

/// Splits on the first r1 eigenvectors and projects the panel.
UnitRootSplit split_spaces(const Matrix& panel, const EigenDecomposition& m1_eig, int r1);

/// Averaged (absolute) ACF over the probed lags: S_i(l, m) / m.
double s_statistic(const Vector& series, const R1Params& params);

/**
 * Builds M1, rotates the panel onto its eigenvectors and counts leading
 * components whose averaged ACF stays at or above c0. The first component
 * falling below c0 at position i gives r1_hat = i - 1; r1_hat = p if none does.
 */
UnitRootSplit estimate_r1(const TimeSeriesPanel& panel, int k0, const R1Params& params);
UnitRootSplit estimate_r1(const Matrix& panel, int k0, const R1Params& params);

}  // namespace urf
