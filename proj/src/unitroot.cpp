#include "urf/unitroot.hpp"

#include "urf/errors.hpp"

#include <cmath>
#include <string>

namespace urf {

void R1Params::validate(Eigen::Index n) const {
    if (!(c0 > 0.0 && c0 < 1.0)) {
        throw ArgumentError("c0 must lie in (0, 1)");
    }
    if (gap < 1) {
        throw ArgumentError("ACF gap l must be >= 1");
    }
    if (terms < 1) {
        throw ArgumentError("number of ACF terms m must be >= 1");
    }
    if (max_lag() > n - 2) {
        throw ArgumentError("largest probed lag " + std::to_string(max_lag()) +
                            " exceeds n - 2 = " + std::to_string(n - 2));
    }
}

Matrix build_M1(const Matrix& panel, int k0) {
    if (k0 < 0 || k0 > panel.rows() - 2) {
        throw ArgumentError("k0 must lie in [0, n - 2]");
    }
    const std::vector<Matrix> gammas = centered_autocovs(center_columns(panel), k0);
    Matrix m1 = Matrix::Zero(panel.cols(), panel.cols());
    for (const Matrix& g : gammas) {
        m1.noalias() += g * g.transpose();
    }
    return 0.5 * (m1 + m1.transpose());
}

Matrix build_M1(const TimeSeriesPanel& panel, int k0) {
    return build_M1(panel.data(), k0);
}

UnitRootSplit split_spaces(const Matrix& panel, const EigenDecomposition& m1_eig, int r1) {
    const Eigen::Index p = panel.cols();
    if (m1_eig.vectors.rows() != p || m1_eig.vectors.cols() != p) {
        throw ArgumentError("eigenvector matrix does not match panel dimension");
    }
    if (r1 < 0 || r1 > p) {
        throw ArgumentError("r1 = " + std::to_string(r1) + " outside [0, " + std::to_string(p) +
                            "]");
    }
    UnitRootSplit split;
    split.r1_hat = r1;
    split.A1 = m1_eig.vectors.leftCols(r1);
    split.A2 = m1_eig.vectors.rightCols(p - r1);
    split.x1 = panel * split.A1;
    split.x2 = panel * split.A2;
    split.eigenvalues = m1_eig.values;
    return split;
}

double s_statistic(const Vector& series, const R1Params& params) {
    params.validate(series.size());
    const std::vector<double> rho = sample_acf_all(series, params.max_lag());
    double sum = 0.0;
    for (int j = 0; j < params.terms; ++j) {
        const double r = rho[static_cast<std::size_t>(1 + j * params.gap)];
        sum += params.absolute ? std::abs(r) : r;
    }
    return sum / params.terms;
}

UnitRootSplit estimate_r1(const Matrix& panel, int k0, const R1Params& params) {
    params.validate(panel.rows());
    const EigenDecomposition eig = sym_eigen(build_M1(panel, k0));
    const Matrix rotated = panel * eig.vectors;
    const Eigen::Index p = panel.cols();

    std::vector<double> s(static_cast<std::size_t>(p), 0.0);
    std::vector<int> degenerate;
    for (Eigen::Index i = 0; i < p; ++i) {
        try {
            s[static_cast<std::size_t>(i)] = s_statistic(rotated.col(i), params);
        } catch (const DegenerateSeriesError&) {
            // A constant direction carries no trend.
            degenerate.push_back(static_cast<int>(i));
        }
    }
    int r1 = static_cast<int>(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        if (s[static_cast<std::size_t>(i)] < params.c0) {
            r1 = static_cast<int>(i);
            break;
        }
    }
    UnitRootSplit split = split_spaces(panel, eig, r1);
    split.s_values = std::move(s);
    split.degenerate_components = std::move(degenerate);
    return split;
}

UnitRootSplit estimate_r1(const TimeSeriesPanel& panel, int k0, const R1Params& params) {
    return estimate_r1(panel.data(), k0, params);
}

}  // namespace urf
