#include "urf/stationary.hpp"

#include "urf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace urf {

Matrix build_M2(const Matrix& x2, int j0) {
    if (j0 < 1 || j0 > x2.rows() - 2) {
        throw ArgumentError("j0 must lie in [1, n - 2]");
    }
    const std::vector<Matrix> gammas = centered_autocovs(center_columns(x2), j0);
    Matrix m2 = Matrix::Zero(x2.cols(), x2.cols());
    for (int j = 1; j <= j0; ++j) {
        const Matrix& g = gammas[static_cast<std::size_t>(j)];
        m2.noalias() += g * g.transpose();
    }
    return 0.5 * (m2 + m2.transpose());
}

FactorNoiseBasis split_U1_V1(const EigenDecomposition& m2_eig, int r2) {
    return split_U1_V1(m2_eig, r2, {});
}

FactorNoiseBasis split_U1_V1(const EigenDecomposition& m2_eig, int r2,
                             std::span<const int> order) {
    const Eigen::Index d = m2_eig.vectors.cols();
    if (r2 < 0 || r2 > d) {
        throw ArgumentError("r2 = " + std::to_string(r2) + " outside [0, " + std::to_string(d) +
                            "]");
    }
    if (order.empty()) {
        return {m2_eig.vectors.leftCols(r2), m2_eig.vectors.rightCols(d - r2)};
    }
    if (static_cast<Eigen::Index>(order.size()) != d) {
        throw ArgumentError("testing order length does not match M2 dimension");
    }
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    FactorNoiseBasis out{Matrix(d, r2), Matrix(d, d - r2)};
    for (Eigen::Index k = 0; k < d; ++k) {
        const int idx = order[static_cast<std::size_t>(k)];
        if (idx < 0 || idx >= d || seen[static_cast<std::size_t>(idx)]) {
            throw ArgumentError("testing order is not a permutation");
        }
        seen[static_cast<std::size_t>(idx)] = true;
        if (k < r2) {
            out.U1.col(k) = m2_eig.vectors.col(idx);
        } else {
            out.V1.col(k - r2) = m2_eig.vectors.col(idx);
        }
    }
    return out;
}

Matrix projected_S(const Matrix& x2, const Matrix& V1) {
    if (V1.rows() != x2.cols()) {
        throw ArgumentError("V1 has " + std::to_string(V1.rows()) + " rows, x2 has " +
                            std::to_string(x2.cols()) + " columns");
    }
    const Matrix sigma = sample_autocov(x2, 0).matrix;
    if (V1.cols() == 0) {
        return Matrix::Zero(x2.cols(), x2.cols());
    }
    const Matrix half = sigma * V1;
    Matrix s = half * half.transpose();
    return 0.5 * (s + s.transpose());
}

namespace {

double eigen_floor(std::span<const double> values) {
    const double top = values.empty() ? 0.0 : std::abs(values.front());
    return std::numeric_limits<double>::epsilon() * std::max(top, std::numeric_limits<double>::min());
}

}  // namespace

int estimate_K(std::span<const double> S_eigenvalues, int max_k, double tau) {
    if (max_k < 1) {
        return 0;
    }
    if (static_cast<int>(S_eigenvalues.size()) < max_k + 1) {
        throw ArgumentError("estimate_K needs at least max_k + 1 eigenvalues");
    }
    const double floor = eigen_floor(S_eigenvalues);
    int best_j = 0;
    double best_ratio = -1.0;
    for (int j = 0; j < max_k; ++j) {
        const double num = std::max(S_eigenvalues[static_cast<std::size_t>(j)], floor);
        const double den = std::max(S_eigenvalues[static_cast<std::size_t>(j) + 1], floor);
        const double ratio = num / den;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best_j = j + 1;
        }
    }
    return best_ratio > tau ? best_j : 0;
}

Matrix estimate_V2(const EigenDecomposition& S_eig, const Matrix& U1, int r2, int K) {
    const Eigen::Index d = S_eig.vectors.cols();
    if (U1.rows() != d || U1.cols() != r2) {
        throw ArgumentError("U1 must be d x r2");
    }
    if (K < 0 || r2 < 0 || K + r2 > d) {
        throw ArgumentError("estimate_V2 requires 0 <= K and K + r2 <= d");
    }
    if (r2 == 0) {
        return Matrix(d, 0);
    }
    // With n <= d the null space of S can be wider than r2; its trailing
    // eigenvectors are then an arbitrary basis, so rotate within all of it.
    const double top = S_eig.values.size() ? std::max(S_eig.values(0), 0.0) : 0.0;
    Eigen::Index null_dim = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        null_dim += S_eig.values(i) <= 1e-9 * top;
    }
    const Eigen::Index trailing = std::max<Eigen::Index>(K == 0 ? r2 : d - K, null_dim);
    Matrix v2;
    if (trailing == r2) {
        v2 = S_eig.vectors.rightCols(r2);
    } else {
        const Matrix v2_star = S_eig.vectors.rightCols(trailing);
        const Matrix proj = v2_star.transpose() * U1;
        const EigenDecomposition rot = sym_eigen(proj * proj.transpose());
        v2 = v2_star * rot.vectors.leftCols(r2);
    }
    const Eigen::JacobiSVD<Matrix> svd(v2.transpose() * U1);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 1e-10)) {
        throw IllConditionedRecoveryError("V2'U1 is singular (smallest singular value " +
                                          std::to_string(smin) + ")");
    }
    return v2;
}

Matrix estimate_V2(const Matrix& S, const Matrix& U1, int r2, int K) {
    return estimate_V2(sym_eigen(S), U1, r2, K);
}

Matrix recover_z2(const Matrix& V2, const Matrix& U1, const Matrix& x2) {
    if (V2.rows() != U1.rows() || V2.cols() != U1.cols() || x2.cols() != U1.rows()) {
        throw ArgumentError("recover_z2: dimension mismatch");
    }
    const Eigen::Index r2 = U1.cols();
    if (r2 == 0) {
        return Matrix(x2.rows(), 0);
    }
    const Matrix g = V2.transpose() * U1;
    const Eigen::JacobiSVD<Matrix> svd(g);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 1e-10)) {
        throw IllConditionedRecoveryError("V2'U1 is singular");
    }
    // z_t' = x_t' V2 (V2'U1)^{-T}
    const Matrix coords = x2 * V2;
    return g.partialPivLu().solve(coords.transpose()).transpose();
}

int lam_yao_ratio(std::span<const double> M2_eigenvalues, int R) {
    if (R < 1) {
        throw ArgumentError("Lam-Yao ratio requires R >= 1");
    }
    if (static_cast<int>(M2_eigenvalues.size()) < R + 1) {
        throw ArgumentError("Lam-Yao ratio requires R + 1 eigenvalues");
    }
    const double floor = eigen_floor(M2_eigenvalues);
    int best = 1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= R; ++j) {
        const double num = std::max(M2_eigenvalues[static_cast<std::size_t>(j)], floor);
        const double den = std::max(M2_eigenvalues[static_cast<std::size_t>(j) - 1], floor);
        const double ratio = num / den;
        if (ratio < best_ratio) {
            best_ratio = ratio;
            best = j;
        }
    }
    return best;
}

StationaryFactorFit fit_stationary(const Matrix& x2, const EigenDecomposition& m2_eig, int r2,
                                   std::span<const int> order, const StationaryOptions& options) {
    const auto d = static_cast<int>(x2.cols());
    StationaryFactorFit fit;
    fit.r2_hat = r2;
    fit.v_hat = d - r2;
    fit.M2_eigenvalues = m2_eig.values;

    FactorNoiseBasis basis = split_U1_V1(m2_eig, r2, order);
    fit.U1 = std::move(basis.U1);
    fit.V1 = std::move(basis.V1);

    const EigenDecomposition s_eig = sym_eigen(projected_S(x2, fit.V1));
    fit.S_eigenvalues = s_eig.values;

    if (options.K_override) {
        const int k = *options.K_override;
        if (k < 0 || k + r2 > d) {
            throw ArgumentError("K override " + std::to_string(k) + " incompatible with r2 = " +
                                std::to_string(r2) + " and dimension " + std::to_string(d));
        }
        fit.K_hat = k;
    } else {
        const int cap = std::min(options.max_k, fit.v_hat - 1);
        const std::vector<double> vals = to_std(s_eig.values);
        fit.K_hat = cap >= 1 ? estimate_K(vals, cap, options.tau) : 0;
    }

    fit.V2 = estimate_V2(s_eig, fit.U1, r2, fit.K_hat);
    fit.z2 = recover_z2(fit.V2, fit.U1, x2);
    return fit;
}

}  // namespace urf
