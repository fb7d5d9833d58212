#pragma once

#include "urf/tsstats.hpp"

#include <optional>
#include <span>
#include <vector>

namespace urf {

/**
 * Factor/noise decomposition of the stationary block x2_t = U1 z_t + U2 e_t.
 *
 * U1 spans the dynamically dependent directions, V1 its complement (the
 * white-noise directions), and V2 the directions used to invert the factor
 * loading when recovering z2.
 */
struct StationaryFactorFit {
    int r2_hat = 0;
    int v_hat = 0;
    int K_hat = 0;
    Matrix U1;  ///< d x r2
    Matrix V1;  ///< d x v
    Matrix V2;  ///< d x r2
    Matrix z2;  ///< n x r2
    Vector M2_eigenvalues;
    Vector S_eigenvalues;
};

/// M2 = sum_{j=1..j0} Sigma2(j) Sigma2(j)' over the lagged autocovariances of x2.
Matrix build_M2(const Matrix& x2, int j0);

struct FactorNoiseBasis {
    Matrix U1;
    Matrix V1;
};

/// U1 = leading r2 eigenvectors of M2, V1 = the remainder.
FactorNoiseBasis split_U1_V1(const EigenDecomposition& m2_eig, int r2);

/// Same split but with the columns taken in a testing order (order[k] indexes eigenvectors).
FactorNoiseBasis split_U1_V1(const EigenDecomposition& m2_eig, int r2,
                             std::span<const int> order);

/// S = Sigma2 V1 V1' Sigma2, Sigma2 the lag-0 sample covariance of x2.
Matrix projected_S(const Matrix& x2, const Matrix& V1);

inline constexpr double kDefaultProminence = 10.0;
inline constexpr int kDefaultMaxK = 10;

/**
 * Number of prominent noise eigenvalues: the j in 1..max_k maximising
 * lambda_j / lambda_{j+1}, provided that ratio exceeds tau, otherwise 0.
 * Eigenvalues are floored at machine epsilon (relative to the largest).
 */
int estimate_K(std::span<const double> S_eigenvalues, int max_k,
               double tau = kDefaultProminence);

/**
 * V2 for the factor recovery. K = 0: eigenvectors of S for its r2 smallest
 * eigenvalues. K > 0: V2* = eigenvectors for the d - K smallest eigenvalues,
 * rotated by the leading r2 eigenvectors of V2*' U1 U1' V2*. When the numerical
 * null space of S is wider than that block (n <= d), V2* spans the null space.
 * Throws IllConditionedRecoveryError when V2'U1 is numerically singular.
 */
Matrix estimate_V2(const EigenDecomposition& S_eig, const Matrix& U1, int r2, int K);
Matrix estimate_V2(const Matrix& S, const Matrix& U1, int r2, int K);

/// z2_t = (V2'U1)^{-1} V2' x2_t for every row of x2.
Matrix recover_z2(const Matrix& V2, const Matrix& U1, const Matrix& x2);

/// Ratio estimator argmin_{1<=j<=R} lambda_{j+1}/lambda_j (smallest index wins ties).
int lam_yao_ratio(std::span<const double> M2_eigenvalues, int R);

/// Options for fit_stationary.
struct StationaryOptions {
    std::optional<int> K_override;
    double tau = kDefaultProminence;
    int max_k = kDefaultMaxK;
};

/**
 * Second stage for a given r2: split U1/V1 from the eigenvectors of M2 (in the
 * given order if non-empty), projected PCA, choose K and recover z2. The
 * automatic K search is capped at v - 1 so the structural gap between the
 * noise eigenvalues of S and its r2 null directions is never picked.
 */
StationaryFactorFit fit_stationary(const Matrix& x2, const EigenDecomposition& m2_eig, int r2,
                                   std::span<const int> order, const StationaryOptions& options);

inline std::vector<double> to_std(const Vector& v) {
    return {v.data(), v.data() + v.size()};
}

}  // namespace urf
