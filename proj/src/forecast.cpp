#include "urf/forecast.hpp"

#include "urf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace urf {

namespace {

constexpr double kIllConditioned = 1e10;
constexpr double kPruneT = 1.96;

Matrix differences(const Matrix& panel) {
    const Eigen::Index n = panel.rows();
    if (n < 2) {
        return Matrix(0, panel.cols());
    }
    return panel.bottomRows(n - 1) - panel.topRows(n - 1);
}

Matrix cumulate(const Vector& start, const Matrix& steps) {
    Matrix out(steps.rows(), steps.cols());
    Vector level = start;
    for (Eigen::Index s = 0; s < steps.rows(); ++s) {
        level += steps.row(s).transpose();
        out.row(s) = level.transpose();
    }
    return out;
}

void check_steps(int h) {
    if (h < 1) {
        throw ArgumentError("forecast horizon must be >= 1");
    }
}

}  // namespace

Ar1Fit fit_ar1(const Vector& series) {
    const Eigen::Index n = series.size();
    if (n < 3) {
        throw ArgumentError("fit_ar1 needs at least 3 observations");
    }
    const Vector x = series.head(n - 1);
    const Vector y = series.tail(n - 1);
    const double mx = x.mean();
    const double my = y.mean();
    const double sxx = (x.array() - mx).square().sum();
    const double scale = std::max(x.cwiseAbs().maxCoeff(), 1.0);
    if (!(sxx > 1e-24 * scale * scale * static_cast<double>(n))) {
        throw DegenerateSeriesError("fit_ar1: constant regressor");
    }
    Ar1Fit fit;
    fit.phi = ((x.array() - mx) * (y.array() - my)).sum() / sxx;
    fit.intercept = my - fit.phi * mx;
    fit.explosive = std::abs(fit.phi) >= 1.0;
    return fit;
}

Ar1Fit fit_ar1_or_mean(const Vector& series) {
    try {
        return fit_ar1(series);
    } catch (const DegenerateSeriesError&) {
        Ar1Fit fit;
        fit.intercept = series.mean();
        fit.degenerate = true;
        return fit;
    }
}

Vector ar1_path(const Ar1Fit& fit, double last, int h) {
    check_steps(h);
    Vector out(h);
    double x = last;
    for (int s = 0; s < h; ++s) {
        x = fit.intercept + fit.phi * x;
        out(s) = x;
    }
    return out;
}

Var1Fit fit_var1(const Matrix& series, bool prune) {
    const Eigen::Index t = series.rows();
    const Eigen::Index k = series.cols();
    if (k < 1) {
        throw ArgumentError("fit_var1 needs at least one column");
    }
    if (t < k + 2) {
        throw ArgumentError("fit_var1 needs at least k + 2 = " + std::to_string(k + 2) +
                            " rows, got " + std::to_string(t));
    }
    const Eigen::Index obs = t - 1;
    Matrix x(obs, k + 1);
    x.col(0).setOnes();
    x.rightCols(k) = series.topRows(obs);
    const Matrix y = series.bottomRows(obs);

    const Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    Var1Fit fit;
    fit.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                    : std::numeric_limits<double>::infinity();
    fit.ill_conditioned = !(fit.condition_number <= kIllConditioned);
    Matrix b = svd.solve(y);  // (k + 1) x k, minimum norm when rank deficient

    const Eigen::Index dof = obs - (k + 1);
    if (prune && dof > 0) {
        const Eigen::Index rank = svd.rank();
        const Matrix v = svd.matrixV().leftCols(rank);
        const Vector inv_sq = sv.head(rank).array().square().inverse();
        // diagonal of the pseudo-inverse of X'X
        const Vector g = v.array().square().matrix() * inv_sq;
        const Matrix resid = y - x * b;
        for (Eigen::Index j = 0; j < k; ++j) {
            const double s2 = resid.col(j).squaredNorm() / static_cast<double>(dof);
            for (Eigen::Index i = 1; i <= k; ++i) {
                const double se = std::sqrt(s2 * g(i));
                if (!(se > 0.0) || std::abs(b(i, j)) < kPruneT * se) {
                    b(i, j) = 0.0;
                    ++fit.pruned;
                }
            }
        }
    }
    fit.intercept = b.row(0).transpose();
    fit.coef = b.bottomRows(k).transpose();
    return fit;
}

Var1Fit fit_var1_diff(const Matrix& panel) {
    if (panel.rows() < panel.cols() + 3) {
        throw ArgumentError("fit_var1_diff needs n >= k + 3");
    }
    return fit_var1(differences(panel));
}

Matrix var1_path(const Var1Fit& fit, const Vector& last, int h) {
    check_steps(h);
    Matrix out(h, last.size());
    Vector u = last;
    for (int s = 0; s < h; ++s) {
        u = fit.intercept + fit.coef * u;
        out.row(s) = u.transpose();
    }
    return out;
}

FactorModelFit fit_factor_models(const UnitRootSplit& split, const StationaryFactorFit& sf) {
    FactorModelFit fit;
    const Matrix& x1 = split.x1;
    const Eigen::Index n = x1.rows();
    if (x1.cols() > 0) {
        fit.nonstat = fit_var1_diff(x1);
        fit.x1_last = x1.row(n - 1).transpose();
        fit.dx1_last = (x1.row(n - 1) - x1.row(n - 2)).transpose();
    }
    const Eigen::Index r2 = sf.z2.cols();
    fit.stat.reserve(static_cast<std::size_t>(r2));
    for (Eigen::Index j = 0; j < r2; ++j) {
        Ar1Fit f = fit_ar1_or_mean(sf.z2.col(j));
        fit.warning = fit.warning || f.explosive || f.degenerate;
        fit.stat.push_back(f);
    }
    if (r2 > 0) {
        fit.z2_last = sf.z2.row(sf.z2.rows() - 1).transpose();
    }
    const Matrix& x2 = split.x2;
    if (x2.cols() > 0) {
        Matrix resid = x2;
        if (r2 > 0) {
            resid -= sf.z2 * sf.U1.transpose();
        }
        fit.noise_mean = resid.colwise().mean().transpose();
    } else {
        fit.noise_mean = Vector::Zero(0);
    }
    return fit;
}

Matrix forecast_path(const UnitRootSplit& split, const FactorModelFit& fit,
                     const StationaryFactorFit& sf, int h) {
    check_steps(h);
    const Eigen::Index p = split.A1.rows();
    Matrix y = Matrix::Zero(h, p);
    if (split.A1.cols() > 0) {
        const Matrix x1 = cumulate(fit.x1_last, var1_path(fit.nonstat, fit.dx1_last, h));
        y += x1 * split.A1.transpose();
    }
    if (split.A2.cols() > 0) {
        Matrix x2 = fit.noise_mean.transpose().replicate(h, 1);
        const auto r2 = static_cast<Eigen::Index>(fit.stat.size());
        if (r2 > 0) {
            Matrix z2(h, r2);
            for (Eigen::Index j = 0; j < r2; ++j) {
                z2.col(j) = ar1_path(fit.stat[static_cast<std::size_t>(j)], fit.z2_last(j), h);
            }
            x2 += z2 * sf.U1.transpose();
        }
        y += x2 * split.A2.transpose();
    }
    return y;
}

Vector forecast_y(const UnitRootSplit& split, const FactorModelFit& fit,
                  const StationaryFactorFit& sf, int h) {
    return forecast_path(split, fit, sf, h).row(h - 1).transpose();
}

Vector origin_errors(const Matrix& forecasts, const Matrix& actuals) {
    if (forecasts.rows() != actuals.rows() || forecasts.cols() != actuals.cols()) {
        throw ArgumentError("forecasts and actuals must have equal shapes");
    }
    if (forecasts.rows() == 0 || forecasts.cols() == 0) {
        throw ArgumentError("empty forecast window");
    }
    const double root_p = std::sqrt(static_cast<double>(forecasts.cols()));
    return (forecasts - actuals).rowwise().norm() / root_p;
}

double fe_h(const Matrix& forecasts, const Matrix& actuals) {
    return origin_errors(forecasts, actuals).mean();
}

double rmsfe(const Vector& forecasts, const Vector& actuals) {
    if (forecasts.size() != actuals.size()) {
        throw ArgumentError("forecasts and actuals must have equal length");
    }
    if (forecasts.size() == 0) {
        throw ArgumentError("empty forecast window");
    }
    return std::sqrt((forecasts - actuals).squaredNorm() / static_cast<double>(forecasts.size()));
}

int dm_default_bandwidth(int n) noexcept {
    return static_cast<int>(std::floor(1.2 * std::cbrt(static_cast<double>(n))));
}

DmResult dm_test(const Vector& loss_a, const Vector& loss_b, std::optional<int> bandwidth) {
    if (loss_a.size() != loss_b.size()) {
        throw ArgumentError("dm_test: loss series differ in length");
    }
    const auto n = static_cast<int>(loss_a.size());
    if (n < 8) {
        throw ArgumentError("dm_test needs at least 8 loss pairs");
    }
    DmResult out;
    out.bandwidth = bandwidth.value_or(dm_default_bandwidth(n));
    if (out.bandwidth < 0 || out.bandwidth >= n) {
        throw ArgumentError("dm_test bandwidth must lie in [0, N)");
    }
    const Vector d = loss_a - loss_b;
    const double mean = d.mean();
    const Vector c = d.array() - mean;
    double lrv = c.squaredNorm() / n;
    for (int k = 1; k <= out.bandwidth; ++k) {
        const double gk = c.tail(n - k).dot(c.head(n - k)) / n;
        lrv += 2.0 * (1.0 - static_cast<double>(k) / (out.bandwidth + 1)) * gk;
    }
    out.lrv = std::max(lrv, 0.0);
    const double scale = d.squaredNorm() / n;
    if (scale == 0.0) {
        return out;
    }
    if (out.lrv <= 1e-12 * scale) {
        out.lrv = 0.0;
        out.infinite = true;
        out.statistic = mean < 0.0 ? -std::numeric_limits<double>::infinity()
                                   : std::numeric_limits<double>::infinity();
        out.pvalue = mean < 0.0 ? 0.0 : 1.0;
        return out;
    }
    out.statistic = mean / std::sqrt(out.lrv / n);
    out.pvalue = normal_cdf(out.statistic);
    return out;
}

Matrix baseline_dfar(const Matrix& panel, int h) {
    check_steps(h);
    if (panel.rows() < 4) {
        throw ArgumentError("baseline_dfar needs at least 4 observations");
    }
    const Matrix diff = differences(panel);
    const Eigen::Index p = panel.cols();
    Matrix steps(h, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const Ar1Fit fit = fit_ar1_or_mean(diff.col(j));
        steps.col(j) = ar1_path(fit, diff(diff.rows() - 1, j), h);
    }
    return cumulate(panel.row(panel.rows() - 1).transpose(), steps);
}

Matrix PcaFit::fitted() const {
    Matrix common = factors * loadings.transpose();
    if (mode == PcaMode::Differences) {
        common = common.array().rowwise() * scale.transpose().array();
    }
    return common.rowwise() + mean.transpose();
}

PcaFit fit_pca(const Matrix& panel, int nfac, PcaMode mode) {
    const Eigen::Index p = panel.cols();
    if (nfac < 0 || nfac > p) {
        throw ArgumentError("number of principal components must lie in [0, p]");
    }
    if (panel.rows() < 3) {
        throw ArgumentError("fit_pca needs at least 3 observations");
    }
    PcaFit fit;
    fit.mode = mode;
    fit.last_level = panel.row(panel.rows() - 1).transpose();
    Matrix x = mode == PcaMode::Levels ? panel : differences(panel);
    fit.mean = x.colwise().mean().transpose();
    x.rowwise() -= fit.mean.transpose();
    fit.scale = Vector::Ones(p);
    if (mode == PcaMode::Differences) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double sd = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(x.rows()));
            if (sd > 0.0) {
                fit.scale(j) = sd;
                x.col(j) /= sd;
            }
        }
    }
    if (nfac == 0) {
        fit.loadings = Matrix(p, 0);
        fit.factors = Matrix(x.rows(), 0);
        return fit;
    }
    const Matrix cov = x.transpose() * x / static_cast<double>(x.rows());
    fit.loadings = sym_eigen(cov).vectors.leftCols(nfac);
    fit.factors = x * fit.loadings;
    return fit;
}

Matrix baseline_pca(const Matrix& panel, int nfac, PcaMode mode, int h) {
    check_steps(h);
    const PcaFit fit = fit_pca(panel, nfac, mode);
    const Eigen::Index p = panel.cols();
    const Eigen::Index k = fit.loadings.cols();
    if (mode == PcaMode::Levels) {
        Matrix common = Matrix::Zero(h, p);
        if (k > 0) {
            const Matrix& f = fit.factors;
            const Eigen::Index n = f.rows();
            const Var1Fit var = fit_var1_diff(f);
            const Vector dlast = (f.row(n - 1) - f.row(n - 2)).transpose();
            const Matrix fpath = cumulate(f.row(n - 1).transpose(), var1_path(var, dlast, h));
            common = fpath * fit.loadings.transpose();
        }
        return common.rowwise() + fit.mean.transpose();
    }
    Matrix steps = Matrix::Zero(h, p);
    if (k > 0) {
        const Var1Fit var = fit_var1(fit.factors, true);
        const Vector flast = fit.factors.row(fit.factors.rows() - 1).transpose();
        steps = var1_path(var, flast, h) * fit.loadings.transpose();
        steps = steps.array().rowwise() * fit.scale.transpose().array();
    }
    steps.rowwise() += fit.mean.transpose();
    return cumulate(fit.last_level, steps);
}

int default_window_start(int n) noexcept {
    return static_cast<int>(std::ceil(0.8 * n));
}

namespace {

enum Method { kUrf = 0, kDfar = 1, kPcaLevels = 2, kPcaDiff = 3, kMethods = 4 };

int clamp_factors(int requested, int fallback, Eigen::Index p) {
    const int k = requested >= 0 ? requested : fallback;
    if (k > p) {
        throw ArgumentError("PCA factor count " + std::to_string(k) + " exceeds p = " +
                            std::to_string(p));
    }
    return k;
}

}  // namespace

ForecastReport evaluate_forecasts(const Matrix& panel, const ForecastOptions& options) {
    const auto n = static_cast<int>(panel.rows());
    const auto p = static_cast<int>(panel.cols());
    const std::vector<int>& horizons = options.config.horizons;
    if (horizons.empty()) {
        throw ArgumentError("at least one forecast horizon is required");
    }
    PipelineConfig fit_config = options.config;
    fit_config.window_start = 0;

    ForecastReport report;
    report.horizons = horizons;
    report.methods = {"URF", "DFAR", "PCA-levels", "PCA-diff"};
    report.n = n;
    report.p = p;
    report.window_start =
        options.config.window_start > 0 ? options.config.window_start : default_window_start(n);
    const int tau0 = report.window_start;
    int h_min = horizons.front();
    int h_max = horizons.front();
    for (int h : horizons) {
        if (h < 1) {
            throw ArgumentError("forecast horizons must be positive");
        }
        h_min = std::min(h_min, h);
        h_max = std::max(h_max, h);
    }
    if (tau0 < 1 || tau0 + h_max > n) {
        throw ArgumentError("window start " + std::to_string(tau0) + " with horizon " +
                            std::to_string(h_max) + " runs past the " + std::to_string(n) +
                            " observations");
    }

    // Full-sample URF forecasts beyond the data.
    {
        const Decomposition dec = decompose(panel, fit_config);
        const FactorModelFit fit = fit_factor_models(dec.split, dec.stationary);
        const Matrix path = forecast_path(dec.split, fit, dec.stationary, h_max);
        report.forecasts.resize(static_cast<Eigen::Index>(horizons.size()), p);
        for (std::size_t k = 0; k < horizons.size(); ++k) {
            report.forecasts.row(static_cast<Eigen::Index>(k)) = path.row(horizons[k] - 1);
        }
        report.warnings = dec.warnings;
    }

    const int origins = n - h_min - tau0 + 1;
    // paths[method][origin] = h_max x p forecast path from that origin
    std::vector<std::vector<Matrix>> paths(kMethods, std::vector<Matrix>(origins));
    bool factor_warning = false;
    for (int o = 0; o < origins; ++o) {
        const int tau = tau0 + o;
        const Matrix sample = panel.topRows(tau);
        const int steps = std::min(h_max, n - tau);
        const Decomposition dec = decompose(sample, fit_config);
        if (o == 0) {
            report.pca_levels_factors = clamp_factors(options.pca_levels_factors, dec.r1_hat(), p);
            report.pca_diff_factors =
                clamp_factors(options.pca_diff_factors, dec.r1_hat() + dec.r2_hat(), p);
        }
        const FactorModelFit fit = fit_factor_models(dec.split, dec.stationary);
        factor_warning = factor_warning || fit.warning;
        paths[kUrf][o] = forecast_path(dec.split, fit, dec.stationary, steps);
        paths[kDfar][o] = baseline_dfar(sample, steps);
        paths[kPcaLevels][o] =
            baseline_pca(sample, report.pca_levels_factors, PcaMode::Levels, steps);
        paths[kPcaDiff][o] =
            baseline_pca(sample, report.pca_diff_factors, PcaMode::Differences, steps);
    }
    if (factor_warning) {
        report.warnings.emplace_back("some AR(1) factor fits were explosive or degenerate");
    }

    report.fe.assign(kMethods, {});
    report.rmsfe.assign(kMethods, {});
    report.losses.assign(kMethods, {});
    for (int method = 0; method < kMethods; ++method) {
        for (int h : horizons) {
            const int count = n - h - tau0 + 1;
            Matrix fc(count, p);
            for (int o = 0; o < count; ++o) {
                fc.row(o) = paths[method][o].row(h - 1);
            }
            const Matrix actual = panel.middleRows(tau0 + h - 1, count);
            const Vector errors = origin_errors(fc, actual);
            Vector per_series(p);
            for (int j = 0; j < p; ++j) {
                per_series(j) = rmsfe(fc.col(j), actual.col(j));
            }
            report.fe[method].push_back(errors.mean());
            report.rmsfe[method].push_back(std::move(per_series));
            report.losses[method].push_back(errors);
        }
    }
    for (std::size_t k = 0; k < horizons.size(); ++k) {
        const Vector& base = report.losses[kUrf][k];
        if (base.size() < 8) {
            report.warnings.push_back("h=" + std::to_string(horizons[k]) +
                                      ": fewer than 8 origins, Diebold-Mariano test skipped");
            continue;
        }
        for (int method = 1; method < kMethods; ++method) {
            report.dm.push_back({report.methods[0], report.methods[method], horizons[k],
                                 dm_test(base, report.losses[method][k])});
        }
    }
    return report;
}

}  // namespace urf
