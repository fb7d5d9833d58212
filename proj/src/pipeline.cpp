#include "urf/pipeline.hpp"

#include "urf/errors.hpp"

#include <string>

namespace urf {

void PipelineConfig::validate(Eigen::Index n) const {
    if (k0 < 0 || k0 > n - 2) {
        throw ArgumentError("k0 must lie in [0, n - 2]");
    }
    if (j0 < 1 || j0 > n - 2) {
        throw ArgumentError("j0 must lie in [1, n - 2]");
    }
    r1_params().validate(n);
    if (m < 1 || m > n - 2) {
        throw ArgumentError("m must lie in [1, n - 2]");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw ArgumentError("epsilon must lie in (0, 1]");
    }
    if (K_override && *K_override < 0) {
        throw ArgumentError("K must be >= 0");
    }
    for (int h : horizons) {
        if (h < 1) {
            throw ArgumentError("forecast horizons must be positive");
        }
    }
    if (window_start < 0 || window_start >= n) {
        throw ArgumentError("window start must lie in [0, n)");
    }
}

StationaryStage estimate_stationary_count(const Matrix& x2, const PipelineConfig& config) {
    StationaryStage stage;
    stage.m2_eig = sym_eigen(build_M2(x2, config.j0));
    stage.xi = x2 * stage.m2_eig.vectors;
    const auto d = static_cast<int>(x2.cols());
    if (d == 0) {
        return stage;
    }
    if (d <= config.small_p_threshold) {
        stage.r2 = estimate_r2_small(stage.xi, config.m, config.alpha, config.reorder);
    } else {
        stage.r2 = estimate_r2_large(stage.xi, config.m, config.alpha, config.reorder,
                                     config.epsilon);
        stage.used_joint_test = true;
    }
    return stage;
}

Decomposition decompose(const Matrix& panel, const PipelineConfig& config) {
    config.validate(panel.rows());
    Decomposition out;
    out.n_le_p = panel.rows() <= panel.cols();
    if (out.n_le_p) {
        out.warnings.push_back("n <= p: sample covariance is singular; joint white-noise test "
                               "truncated to the leading floor(epsilon * n) components");
    }
    out.split = estimate_r1(panel, config.k0, config.r1_params());
    if (!out.split.degenerate_components.empty()) {
        out.warnings.push_back(std::to_string(out.split.degenerate_components.size()) +
                               " constant transformed component(s) treated as stationary");
    }

    StationaryStage stage = estimate_stationary_count(out.split.x2, config);
    out.r2 = std::move(stage.r2);
    out.xi = std::move(stage.xi);
    out.used_joint_test = stage.used_joint_test;
    if (out.r2.warning) {
        out.warnings.push_back("constant component(s) counted as white noise");
    }

    StationaryOptions options;
    options.K_override = config.K_override;
    options.tau = config.prominence;
    options.max_k = config.max_k;
    if (options.K_override) {
        const int d = static_cast<int>(out.split.x2.cols());
        if (*options.K_override + out.r2.r2_hat > d) {
            throw ArgumentError("K = " + std::to_string(*options.K_override) +
                                " leaves no room for " + std::to_string(out.r2.r2_hat) +
                                " factors in dimension " + std::to_string(d));
        }
    }
    out.stationary =
        fit_stationary(out.split.x2, stage.m2_eig, out.r2.r2_hat, out.r2.order, options);
    return out;
}

Decomposition decompose(const TimeSeriesPanel& panel, const PipelineConfig& config) {
    return decompose(panel.data(), config);
}

}  // namespace urf
