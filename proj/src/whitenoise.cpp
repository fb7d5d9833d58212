#include "urf/whitenoise.hpp"

#include "urf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace urf {

OrderedComponents lb_order(const Matrix& xi, int m, bool reorder) {
    const auto d = static_cast<int>(xi.cols());
    if (m < 1 || m > xi.rows() - 2) {
        throw ArgumentError("white-noise lag m = " + std::to_string(m) + " outside [1, n - 2]");
    }
    std::vector<double> pv(static_cast<std::size_t>(d), 1.0);
    std::vector<bool> degen(static_cast<std::size_t>(d), false);
    for (int i = 0; i < d; ++i) {
        try {
            pv[static_cast<std::size_t>(i)] = ljung_box(xi.col(i), m).pvalue;
        } catch (const DegenerateSeriesError&) {
            degen[static_cast<std::size_t>(i)] = true;
        }
    }

    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    if (reorder) {
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const auto ua = static_cast<std::size_t>(a);
            const auto ub = static_cast<std::size_t>(b);
            if (degen[ua] != degen[ub]) return !degen[ua];
            return pv[ua] < pv[ub];
        });
    } else {
        std::stable_partition(order.begin(), order.end(),
                              [&](int i) { return !degen[static_cast<std::size_t>(i)]; });
    }

    OrderedComponents out;
    out.series = xi;
    out.order = order;
    for (int idx : order) {
        out.pvalues.push_back(pv[static_cast<std::size_t>(idx)]);
        out.degenerate.push_back(degen[static_cast<std::size_t>(idx)]);
        out.warning = out.warning || degen[static_cast<std::size_t>(idx)];
    }
    return out;
}

double hd_wn_threshold(int d, int m, double alpha) {
    if (d < 1 || m < 1) {
        throw ArgumentError("white-noise threshold needs d >= 1 and m >= 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    const double dd = static_cast<double>(d);
    return normal_quantile(1.0 - alpha / (2.0 * dd * dd * m));
}

namespace {

/// Columns scaled to unit sample variance; constant columns are zeroed and flagged.
Matrix standardize(const Matrix& xi, std::vector<bool>& degenerate) {
    const auto n = static_cast<double>(xi.rows());
    Matrix z = center_columns(xi);
    degenerate.assign(static_cast<std::size_t>(xi.cols()), false);
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const double var = z.col(j).squaredNorm() / n;
        const double scale = xi.col(j).cwiseAbs().maxCoeff();
        if (!(var > 0.0) || std::sqrt(var) <= 1e-13 * std::max(scale, 1e-300)) {
            z.col(j).setZero();
            degenerate[static_cast<std::size_t>(j)] = true;
        } else {
            z.col(j) /= std::sqrt(var);
        }
    }
    return z;
}

/// Cross-correlation matrices C_k(i, j) = corr(xi_{i,t}, xi_{j,t-k}) for k = 1..m.
std::vector<Matrix> cross_correlations(const Matrix& z, int m) {
    const Eigen::Index n = z.rows();
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) {
        Matrix c = z.bottomRows(n - k).transpose() * z.topRows(n - k);
        c /= static_cast<double>(n);
        out.push_back(std::move(c));
    }
    return out;
}

void check_test_args(const Matrix& xi, int m) {
    if (xi.cols() < 1) {
        throw ArgumentError("white-noise test needs at least one component");
    }
    if (m < 1 || m > xi.rows() - 2) {
        throw ArgumentError("white-noise lag m = " + std::to_string(m) + " outside [1, n - 2]");
    }
}

}  // namespace

WhiteNoiseTest hd_wn_test(const Matrix& xi, int m, double alpha) {
    check_test_args(xi, m);
    std::vector<bool> degen;
    const Matrix z = standardize(xi, degen);
    const auto included =
        static_cast<int>(std::count(degen.begin(), degen.end(), false));
    WhiteNoiseTest out;
    out.excluded = static_cast<int>(xi.cols()) - included;
    out.threshold = hd_wn_threshold(std::max(included, 1), m, alpha);
    if (included == 0) {
        return out;
    }
    double best = 0.0;
    for (const Matrix& c : cross_correlations(z, m)) {
        best = std::max(best, c.cwiseAbs().maxCoeff());
    }
    out.statistic = std::sqrt(static_cast<double>(xi.rows())) * best;
    out.reject = out.statistic > out.threshold;
    return out;
}

R2Estimate estimate_r2_small(const Matrix& xi, int m, double alpha, bool reorder) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    const auto d = static_cast<int>(xi.cols());
    R2Estimate out;
    if (d == 0) {
        return out;
    }
    const OrderedComponents oc = lb_order(xi, m, reorder);
    out.order = oc.order;
    out.pvalues = oc.pvalues;
    out.warning = oc.warning;
    out.kept = d;
    for (int pos = d - 1; pos >= 0; --pos) {
        const auto k = static_cast<std::size_t>(pos);
        if (!oc.degenerate[k] && oc.pvalues[k] < alpha) {
            out.r2_hat = pos + 1;
            break;
        }
    }
    out.v_hat = d - out.r2_hat;
    return out;
}

R2Estimate estimate_r2_large(const Matrix& xi, int m, double alpha, bool reorder,
                             double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw ArgumentError("epsilon must lie in (0, 1]");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    const auto d = static_cast<int>(xi.cols());
    R2Estimate out;
    if (d == 0) {
        return out;
    }
    check_test_args(xi, m);
    const OrderedComponents oc = lb_order(xi, m, reorder);
    out.order = oc.order;
    out.pvalues = oc.pvalues;
    out.warning = oc.warning;

    const Eigen::Index n = xi.rows();
    int kept = d;
    if (d >= n) {
        kept = std::max(1, static_cast<int>(std::floor(epsilon * static_cast<double>(n))));
        kept = std::min(kept, d);
    }
    out.kept = kept;

    Matrix ordered(n, kept);
    for (int k = 0; k < kept; ++k) {
        ordered.col(k) = xi.col(oc.order[static_cast<std::size_t>(k)]);
    }
    std::vector<bool> degen;
    const Matrix z = standardize(ordered, degen);
    const std::vector<Matrix> corr = cross_correlations(z, m);

    // suffix_max[s] = max |C_k(i, j)| over i, j >= s and all lags; one backward sweep.
    std::vector<double> suffix_max(static_cast<std::size_t>(kept) + 1, 0.0);
    std::vector<int> suffix_included(static_cast<std::size_t>(kept) + 1, 0);
    for (int s = kept - 1; s >= 0; --s) {
        double best = suffix_max[static_cast<std::size_t>(s) + 1];
        const Eigen::Index len = kept - s;
        for (const Matrix& c : corr) {
            best = std::max(best, c.row(s).tail(len).cwiseAbs().maxCoeff());
            best = std::max(best, c.col(s).tail(len).cwiseAbs().maxCoeff());
        }
        suffix_max[static_cast<std::size_t>(s)] = best;
        suffix_included[static_cast<std::size_t>(s)] =
            suffix_included[static_cast<std::size_t>(s) + 1] +
            (degen[static_cast<std::size_t>(s)] ? 0 : 1);
    }

    const double root_n = std::sqrt(static_cast<double>(n));
    int dropped = kept;
    for (int s = 0; s < kept; ++s) {
        const int included = suffix_included[static_cast<std::size_t>(s)];
        WhiteNoiseTest t;
        t.excluded = (kept - s) - included;
        t.threshold = hd_wn_threshold(std::max(included, 1), m, alpha);
        t.statistic = included > 0 ? root_n * suffix_max[static_cast<std::size_t>(s)] : 0.0;
        t.reject = t.statistic > t.threshold;
        out.tests.push_back(t);
        if (!t.reject) {
            dropped = s;
            break;
        }
    }
    out.r2_hat = dropped;
    out.v_hat = d - dropped;
    return out;
}

}  // namespace urf
