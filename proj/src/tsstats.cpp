#include "urf/tsstats.hpp"

#include "urf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace urf {

TimeSeriesPanel::TimeSeriesPanel(Matrix data) : data_(std::move(data)) {
    if (data_.rows() < 2) {
        throw ArgumentError("panel needs at least 2 observations, got " +
                            std::to_string(data_.rows()));
    }
    if (data_.cols() < 1) {
        throw ArgumentError("panel needs at least 1 series");
    }
    if (!data_.allFinite()) {
        throw ArgumentError("panel contains non-finite entries");
    }
}

Matrix center_columns(const Matrix& panel) {
    if (panel.cols() == 0) {
        return panel;
    }
    return panel.rowwise() - panel.colwise().mean();
}

namespace {

void check_lag(Eigen::Index n, int k) {
    if (n < 2) {
        throw ArgumentError("need at least 2 observations");
    }
    if (k < 0 || k > n - 1) {
        throw ArgumentError("lag " + std::to_string(k) + " outside [0, " +
                            std::to_string(n - 1) + "]");
    }
}

Matrix lagged_product(const Matrix& centered, int k) {
    const Eigen::Index n = centered.rows();
    const Eigen::Index len = n - k;
    Matrix out = centered.bottomRows(len).transpose() * centered.topRows(len);
    out /= static_cast<double>(n);
    return out;
}

}  // namespace

AutocovMatrix sample_autocov(const Matrix& panel, int k) {
    check_lag(panel.rows(), k);
    if (panel.cols() == 0) {
        return {k, Matrix(0, 0)};
    }
    return {k, lagged_product(center_columns(panel), k)};
}

AutocovMatrix sample_autocov(const TimeSeriesPanel& panel, int k) {
    return sample_autocov(panel.data(), k);
}

std::vector<Matrix> centered_autocovs(const Matrix& centered, int max_lag) {
    check_lag(centered.rows(), max_lag);
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        out.push_back(lagged_product(centered, k));
    }
    return out;
}

std::vector<double> sample_autocovariances(const Vector& series, int max_lag) {
    const Eigen::Index n = series.size();
    check_lag(n, max_lag);
    const Vector c = series.array() - series.mean();
    std::vector<double> gamma(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        gamma[static_cast<std::size_t>(k)] =
            c.tail(n - k).dot(c.head(n - k)) / static_cast<double>(n);
    }
    return gamma;
}

std::vector<double> sample_acf_all(const Vector& series, int max_lag) {
    std::vector<double> gamma = sample_autocovariances(series, max_lag);
    const double g0 = gamma[0];
    // Relative test: a series whose deviations are pure rounding noise is constant.
    const double scale = series.cwiseAbs().maxCoeff();
    if (!(g0 > 0.0) || std::sqrt(g0) <= 1e-13 * std::max(scale, 1e-300)) {
        throw DegenerateSeriesError("series has zero sample variance");
    }
    for (double& g : gamma) {
        g = std::clamp(g / g0, -1.0, 1.0);
    }
    return gamma;
}

double sample_acf(const Vector& series, int k) {
    return sample_acf_all(series, k)[static_cast<std::size_t>(k)];
}

LjungBoxResult ljung_box(const Vector& series, int m) {
    const Eigen::Index n = series.size();
    if (m < 1 || m > n - 2) {
        throw ArgumentError("Ljung-Box lag " + std::to_string(m) + " outside [1, " +
                            std::to_string(n - 2) + "]");
    }
    const std::vector<double> rho = sample_acf_all(series, m);
    const auto nd = static_cast<double>(n);
    double sum = 0.0;
    for (int k = 1; k <= m; ++k) {
        const double r = rho[static_cast<std::size_t>(k)];
        sum += r * r / (nd - k);
    }
    LjungBoxResult res;
    res.statistic = nd * (nd + 2.0) * sum;
    res.pvalue = chi2_sf(res.statistic, m);
    return res;
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) {
        throw ArgumentError("gamma_q requires a > 0 and x >= 0");
    }
    if (x == 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // Series for the lower regularized gamma P(a, x).
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < kMaxIter; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * kEps) {
                break;
            }
        }
        return std::clamp(1.0 - sum * std::exp(log_prefix), 0.0, 1.0);
    }
    // Continued fraction for Q(a, x), modified Lentz.
    constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            break;
        }
    }
    return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

double chi2_sf(double x, int df) {
    if (df < 1) {
        throw ArgumentError("chi-square degrees of freedom must be >= 1");
    }
    if (x < 0.0 || std::isnan(x)) {
        throw ArgumentError("chi-square argument must be >= 0");
    }
    return gamma_q(0.5 * df, 0.5 * x);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ArgumentError("normal quantile requires p in (0, 1)");
    }
    // Acklam's rational approximation followed by one Halley step.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Refine against the tail that is representable without cancellation.
    const double e = (p < 0.5) ? normal_cdf(x) - p : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

EigenDecomposition sym_eigen(const Matrix& matrix) {
    if (matrix.rows() != matrix.cols()) {
        throw ArgumentError("sym_eigen requires a square matrix");
    }
    if (!matrix.allFinite()) {
        throw ArgumentError("sym_eigen: matrix has non-finite entries");
    }
    const Eigen::Index q = matrix.rows();
    EigenDecomposition out;
    if (q == 0) {
        out.values = Vector(0);
        out.vectors = Matrix(0, 0);
        return out;
    }
    const Matrix sym = 0.5 * (matrix + matrix.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver did not converge");
    }
    // Eigen returns ascending order.
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    for (Eigen::Index j = 0; j < q; ++j) {
        Eigen::Index arg = 0;
        out.vectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.vectors(arg, j) < 0.0) {
            out.vectors.col(j) *= -1.0;
        }
    }
    return out;
}

double sym_spectral_norm(const Matrix& matrix) {
    if (matrix.size() == 0) {
        return 0.0;
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (matrix + matrix.transpose()),
                                                       Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace urf
