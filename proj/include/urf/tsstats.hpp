#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace urf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * An n x p panel of observations: row t is the observation at time t, column i
 * is the i-th component series. Construction validates n >= 2, p >= 1 and that
 * every entry is finite.
 */
class TimeSeriesPanel {
public:
    explicit TimeSeriesPanel(Matrix data);

    [[nodiscard]] const Matrix& data() const noexcept { return data_; }
    [[nodiscard]] Eigen::Index n() const noexcept { return data_.rows(); }
    [[nodiscard]] Eigen::Index p() const noexcept { return data_.cols(); }

private:
    Matrix data_;
};

/// Lag-k sample autocovariance of a panel together with its lag.
struct AutocovMatrix {
    int lag = 0;
    Matrix matrix;
};

/// Symmetric eigendecomposition; values descending, column i of vectors pairs with values[i].
struct EigenDecomposition {
    Vector values;
    Matrix vectors;
};

/**
 * Lag-k sample autocovariance (1/n) * sum_{t=k+1..n} (y_t - ybar)(y_{t-k} - ybar)'.
 * The divisor is n for every lag and ybar is the full-sample mean.
 *
 * Accepts any n x d matrix with n >= 2; d may be zero (returns a 0 x 0 matrix).
 * Throws ArgumentError unless 0 <= k <= n - 1.
 */
AutocovMatrix sample_autocov(const Matrix& panel, int k);
AutocovMatrix sample_autocov(const TimeSeriesPanel& panel, int k);

/// Autocovariances of an already-centered panel for lags 0..max_lag.
std::vector<Matrix> centered_autocovs(const Matrix& centered, int max_lag);

/// Subtracts the column means.
Matrix center_columns(const Matrix& panel);

/// Univariate sample autocovariances gamma(0..max_lag), divisor n.
std::vector<double> sample_autocovariances(const Vector& series, int max_lag);

/**
 * Sample autocorrelation gamma(k)/gamma(0).
 * Throws DegenerateSeriesError when gamma(0) is zero, ArgumentError when k is out of range.
 */
double sample_acf(const Vector& series, int k);

/// rho(0..max_lag) in one pass; same error contract as sample_acf.
std::vector<double> sample_acf_all(const Vector& series, int max_lag);

struct LjungBoxResult {
    double statistic = 0.0;
    double pvalue = 1.0;
};

/// Q(m) = n(n+2) sum_{k=1..m} rho(k)^2 / (n-k), p-value from chi-square with m d.o.f.
LjungBoxResult ljung_box(const Vector& series, int m);

/// Upper tail of chi-square(df) at x. Throws ArgumentError for x < 0 or df < 1.
double chi2_sf(double x, int df);

/// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double gamma_q(double a, double x);

double normal_cdf(double x);

/// Standard normal quantile for p in (0, 1).
double normal_quantile(double p);

/**
 * Full eigendecomposition of a symmetric matrix. The input is symmetrized as
 * (M + M')/2 first. Eigenvalues are sorted descending and each eigenvector is
 * sign-normalized so its largest-magnitude entry is positive.
 * Throws ArgumentError on non-square input or non-finite entries.
 */
EigenDecomposition sym_eigen(const Matrix& matrix);

/// Spectral norm of a symmetric matrix (largest absolute eigenvalue).
double sym_spectral_norm(const Matrix& matrix);

}  // namespace urf
