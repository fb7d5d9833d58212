#pragma once

#include "urf/stationary.hpp"
#include "urf/tsstats.hpp"
#include "urf/unitroot.hpp"
#include "urf/whitenoise.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace urf {

/// Every tuning constant of the decomposition and forecasting pipeline.
struct PipelineConfig {
    int k0 = 2;
    int j0 = 2;
    double c0 = 0.3;
    int l = 3;
    int m = 10;
    double alpha = 0.05;
    double epsilon = 0.75;
    std::optional<int> K_override;
    bool absolute_acf = true;
    bool reorder = true;
    /// Dimensions d = p - r1 up to this value use the bottom-up Ljung-Box count.
    int small_p_threshold = 10;
    double prominence = kDefaultProminence;
    int max_k = kDefaultMaxK;
    std::vector<int> horizons{1, 2, 3, 4};
    int window_start = 0;  ///< 0 means "pick a default from n"
    std::uint64_t seed = 1234;

    [[nodiscard]] R1Params r1_params() const { return {c0, l, m, absolute_acf}; }

    /// Throws ArgumentError on any invalid combination for a sample of size n.
    void validate(Eigen::Index n) const;
};

/// Result of the full two-stage decomposition y_t -> (x1_t, z2_t, white noise).
struct Decomposition {
    UnitRootSplit split;
    R2Estimate r2;
    StationaryFactorFit stationary;
    Matrix xi;  ///< n x (p - r1): x2 rotated onto the eigenvectors of M2
    bool used_joint_test = false;
    bool n_le_p = false;
    std::vector<std::string> warnings;

    [[nodiscard]] int r1_hat() const noexcept { return split.r1_hat; }
    [[nodiscard]] int r2_hat() const noexcept { return stationary.r2_hat; }
    [[nodiscard]] int v_hat() const noexcept { return stationary.v_hat; }
    [[nodiscard]] int K_hat() const noexcept { return stationary.K_hat; }
};

/**
 * Runs unit-root extraction, the white-noise count and the projected PCA.
 *
 * r2 is estimated on xi = W' x2 (W the eigenvectors of M2); U1/V1 are then
 * rebuilt at the estimated r2 using the testing order, and z2 recovered.
 */
Decomposition decompose(const Matrix& panel, const PipelineConfig& config);
Decomposition decompose(const TimeSeriesPanel& panel, const PipelineConfig& config);

/// Only the r2 stage, for a given unit-root split (used by method comparisons).
struct StationaryStage {
    EigenDecomposition m2_eig;
    Matrix xi;
    R2Estimate r2;
    bool used_joint_test = false;
};
StationaryStage estimate_stationary_count(const Matrix& x2, const PipelineConfig& config);

}  // namespace urf
