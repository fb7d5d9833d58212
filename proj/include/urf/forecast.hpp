#pragma once

#include "urf/pipeline.hpp"

#include <optional>
#include <string>
#include <vector>

namespace urf {

/// x_t = intercept + phi x_{t-1} + e_t by least squares.
struct Ar1Fit {
    double phi = 0.0;
    double intercept = 0.0;
    bool explosive = false;  ///< |phi| >= 1 (no clamp applied)
    bool degenerate = false;  ///< constant regressor; fell back to the mean
};

/// OLS of x_t on (1, x_{t-1}). Throws DegenerateSeriesError on a constant regressor.
Ar1Fit fit_ar1(const Vector& series);

/// As fit_ar1, but a constant regressor gives phi = 0 and the sample mean.
Ar1Fit fit_ar1_or_mean(const Vector& series);

/// h-step path x_{n+1}, ..., x_{n+h} from the last value.
Vector ar1_path(const Ar1Fit& fit, double last, int h);

/// VAR(1) with intercept: u_t = c + B u_{t-1} + e_t.
struct Var1Fit {
    Vector intercept;
    Matrix coef;
    double condition_number = 1.0;  ///< of the regressor matrix
    bool ill_conditioned = false;    ///< condition number above 1e10
    int pruned = 0;                  ///< coefficients zeroed by t-ratio pruning
};

/// OLS VAR(1) on the rows of `series` (pseudo-inverse when rank deficient).
/// With prune, slope coefficients with |t| < 1.96 are zeroed in one pass.
Var1Fit fit_var1(const Matrix& series, bool prune = false);

/// Differences the panel, then fits a VAR(1) with intercept. Needs n >= k + 3.
Var1Fit fit_var1_diff(const Matrix& panel);

/// Rows u_{n+1}, ..., u_{n+h} iterated from the last observation.
Matrix var1_path(const Var1Fit& fit, const Vector& last, int h);

/// Factor models used by the forecasting step.
struct FactorModelFit {
    Var1Fit nonstat;          ///< VAR(1) on differences of x1
    Vector x1_last;           ///< x1 at the forecast origin
    Vector dx1_last;          ///< last difference of x1
    std::vector<Ar1Fit> stat; ///< one AR(1) per column of z2
    Vector z2_last;
    Vector noise_mean;        ///< in-sample mean of x2 - U1 z2
    bool warning = false;     ///< some AR(1) fit explosive or degenerate
};

FactorModelFit fit_factor_models(const UnitRootSplit& split, const StationaryFactorFit& sf);

/// Forecast paths of y for steps 1..h (rows), A1 x1 + A2 (U1 z2 + noise mean).
Matrix forecast_path(const UnitRootSplit& split, const FactorModelFit& fit,
                     const StationaryFactorFit& sf, int h);

/// y_{n+h} only.
Vector forecast_y(const UnitRootSplit& split, const FactorModelFit& fit,
                  const StationaryFactorFit& sf, int h);

/// E(tau, h) = ||yhat - y||_2 / sqrt(p) for each origin (row).
Vector origin_errors(const Matrix& forecasts, const Matrix& actuals);

/// Mean of origin_errors. Empty input throws ArgumentError.
double fe_h(const Matrix& forecasts, const Matrix& actuals);

/// Root mean squared error of one series across origins.
double rmsfe(const Vector& forecasts, const Vector& actuals);

struct DmResult {
    double statistic = 0.0;
    double lrv = 0.0;
    double pvalue = 0.5;  ///< P(Z <= statistic): small when method a is better
    bool infinite = false;
    int bandwidth = 0;
};

/// Bartlett bandwidth floor(1.2 N^{1/3}).
int dm_default_bandwidth(int n) noexcept;

/**
 * Diebold-Mariano test on d_t = loss_a - loss_b with a Bartlett HAC variance.
 * Needs N >= 8. Zero variance with a nonzero mean gives an infinite statistic.
 */
DmResult dm_test(const Vector& loss_a, const Vector& loss_b,
                 std::optional<int> bandwidth = std::nullopt);

/// Per-series AR(1) on first differences, re-integrated; rows are steps 1..h.
Matrix baseline_dfar(const Matrix& panel, int h);

enum class PcaMode { Levels, Differences };

/// Principal components of the levels (centered) or of the standardized differences.
struct PcaFit {
    PcaMode mode = PcaMode::Levels;
    Vector mean;
    Vector scale;
    Matrix loadings;  ///< p x nfac
    Matrix factors;   ///< rows aligned with the representation
    Vector last_level;

    /// In-sample fit of the representation (levels or differences).
    [[nodiscard]] Matrix fitted() const;
};

PcaFit fit_pca(const Matrix& panel, int nfac, PcaMode mode);

/**
 * Levels: VAR(1) on factor differences, mapped back with the loadings.
 * Differences: VAR(1) on factors with t-ratio pruning, then re-integrated.
 * nfac = 0 gives the sample mean path.
 */
Matrix baseline_pca(const Matrix& panel, int nfac, PcaMode mode, int h);

struct ForecastOptions {
    PipelineConfig config;
    int pca_levels_factors = -1;  ///< -1: r1_hat at the first origin
    int pca_diff_factors = -1;    ///< -1: r1_hat + r2_hat at the first origin
};

struct DmEntry {
    std::string method_a;
    std::string method_b;
    int h = 0;
    DmResult result;
};

struct ForecastReport {
    std::vector<int> horizons;
    std::vector<std::string> methods;  ///< URF, DFAR, PCA-levels, PCA-diff
    int window_start = 0;              ///< first origin tau (fit on rows [0, tau))
    int n = 0;
    int p = 0;
    int pca_levels_factors = 0;
    int pca_diff_factors = 0;
    Matrix forecasts;  ///< URF forecasts beyond the sample, one row per horizon
    /// fe[method][k] = FE at horizons[k]
    std::vector<std::vector<double>> fe;
    /// rmsfe[method][k] = per-series RMSFE at horizons[k]
    std::vector<std::vector<Vector>> rmsfe;
    /// losses[method][k] = E(tau, h) per origin
    std::vector<std::vector<Vector>> losses;
    std::vector<DmEntry> dm;  ///< URF against every other method
    std::vector<std::string> warnings;
};

/// First origin used when config.window_start is 0: ceil(0.8 n).
int default_window_start(int n) noexcept;

/**
 * Expanding-window evaluation: for tau = window_start .. n - 1 every method is
 * fitted on rows [0, tau) and its forecast of row tau + h - 1 is scored for
 * each horizon h with tau + h <= n.
 */
ForecastReport evaluate_forecasts(const Matrix& panel, const ForecastOptions& options);

}  // namespace urf
