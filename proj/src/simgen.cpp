#include "urf/simgen.hpp"

#include "urf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace urf {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t rep) noexcept {
    return splitmix64(splitmix64(splitmix64(base) ^ cell) ^ (rep * 0xD1B54A32D192ED03ULL));
}

double Rng::uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

Matrix Rng::uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    Matrix m(rows, cols);
    // Row-major fill so the draw order reads naturally.
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = uniform(lo, hi);
        }
    }
    return m;
}

Vector Rng::normal_vector(Eigen::Index size) {
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        v(i) = normal();
    }
    return v;
}

Matrix random_orthonormal(Eigen::Index p, Rng& rng) {
    if (p < 1) {
        throw ArgumentError("random_orthonormal requires p >= 1");
    }
    const Matrix m = rng.uniform_matrix(p, p, -2.0, 2.0);
    const Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(p, p);
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (r(j, j) < 0.0) {
            q.col(j) *= -1.0;
        }
    }
    return q;
}

Matrix random_orthonormal(Eigen::Index p, std::uint64_t seed) {
    Rng rng(seed);
    return random_orthonormal(p, rng);
}

void DgpSpec::validate() const {
    if (p < 1 || n < 2) {
        throw ArgumentError("simulation needs p >= 1 and n >= 2");
    }
    if (r1 < 0 || r2 < 0 || r1 + r2 > p) {
        throw ArgumentError("need r1, r2 >= 0 and r1 + r2 <= p (got r1=" + std::to_string(r1) +
                            ", r2=" + std::to_string(r2) + ", p=" + std::to_string(p) + ")");
    }
    if (K < 0 || (K > 0 && K >= v())) {
        throw ArgumentError("K = " + std::to_string(K) + " must be 0 or below v = " +
                            std::to_string(v()));
    }
    if (!(delta >= 0.0 && delta < 1.0)) {
        throw ArgumentError("delta must lie in [0, 1)");
    }
    if (example != 1 && example != 2) {
        throw ArgumentError("example must be 1 or 2");
    }
    if (example == 1 && delta != 0.0) {
        throw ArgumentError("example 1 requires delta = 0");
    }
}

Matrix GroundTruth::panel() const {
    return x1 * A1.transpose() + x2 * A2.transpose();
}

namespace {

SimulatedData simulate(const DgpSpec& spec, double a_scale, double u1_scale, double u2_head_scale,
                       double u2_tail_scale) {
    spec.validate();
    Rng design_rng(spec.design_seed.value_or(spec.seed));
    Rng innovation_rng(spec.seed);
    Rng& rng = design_rng;
    Rng& noise = spec.design_seed ? innovation_rng : design_rng;
    const int p = spec.p;
    const int n = spec.n;
    const int r1 = spec.r1;
    const int r2 = spec.r2;
    const int v = spec.v();
    const int d = p - r1;

    GroundTruth g;
    // Only the unit-root loadings carry the strength factor; A2 stays
    // orthonormal since U22_1 already does for x2.
    const Matrix a = random_orthonormal(p, rng);
    g.A1 = a.leftCols(r1) * a_scale;
    g.A2 = a.rightCols(d);
    g.U22_1 = rng.uniform_matrix(d, r2, -1.0, 1.0) * u1_scale;
    g.U22_2 = rng.uniform_matrix(d, v, -1.0, 1.0);
    const int head = std::min(spec.K, v);
    g.U22_2.leftCols(head) *= u2_head_scale;
    g.U22_2.rightCols(v - head) *= u2_tail_scale;
    g.phi.resize(r2);
    for (int i = 0; i < r2; ++i) {
        g.phi(i) = rng.uniform(0.5, 0.9);
    }

    g.x1.resize(n, r1);
    g.f2.resize(n, r2);
    g.eps.resize(n, v);
    Vector level = Vector::Zero(r1);
    Vector factor = Vector::Zero(r2);
    for (int t = 0; t < n; ++t) {
        level += noise.normal_vector(r1);
        factor = g.phi.cwiseProduct(factor) + noise.normal_vector(r2);
        g.x1.row(t) = level.transpose();
        g.f2.row(t) = factor.transpose();
        g.eps.row(t) = noise.normal_vector(v).transpose();
    }
    g.x2 = g.f2 * g.U22_1.transpose() + g.eps * g.U22_2.transpose();
    Matrix y = g.panel();
    return {TimeSeriesPanel(std::move(y)), std::move(g)};
}

}  // namespace

SimulatedData gen_example1(const DgpSpec& spec) {
    if (spec.example != 1) {
        DgpSpec copy = spec;
        copy.example = 1;
        return gen_example1(copy);
    }
    const double root_p = std::sqrt(static_cast<double>(spec.p));
    return simulate(spec, 1.0, 1.0, 1.0 / root_p, 1.0 / root_p);
}

SimulatedData gen_example2(const DgpSpec& spec) {
    if (spec.example != 2) {
        DgpSpec copy = spec;
        copy.example = 2;
        return gen_example2(copy);
    }
    const auto p = static_cast<double>(spec.p);
    const double strong = std::pow(p, -spec.delta / 2.0);
    return simulate(spec, std::pow(p, (1.0 - spec.delta) / 2.0), strong, strong, 1.0 / p);
}

SimulatedData generate(const DgpSpec& spec) {
    return spec.example == 2 ? gen_example2(spec) : gen_example1(spec);
}

double metric_D(const Matrix& H1, const Matrix& H2) {
    if (H1.rows() != H2.rows() || H1.cols() != H2.cols()) {
        throw ArgumentError("metric_D requires equal shapes");
    }
    const Eigen::Index r = H1.cols();
    if (r == 0) {
        return 0.0;
    }
    const Matrix id = Matrix::Identity(r, r);
    if (!(H1.transpose() * H1).isApprox(id, 1e-6) || !(H2.transpose() * H2).isApprox(id, 1e-6)) {
        throw ArgumentError("metric_D requires half-orthonormal arguments");
    }
    const double tr = (H1.transpose() * H2).squaredNorm();
    return std::sqrt(std::max(0.0, 1.0 - tr / static_cast<double>(r)));
}

namespace {

Matrix orthonormal_basis(const Matrix& h) {
    const Eigen::ColPivHouseholderQR<Matrix> qr(h);
    if (qr.rank() != h.cols()) {
        throw ArgumentError("metric_Dbar requires full column rank");
    }
    return qr.householderQ() * Matrix::Identity(h.rows(), h.cols());
}

}  // namespace

double metric_Dbar(const Matrix& H1, const Matrix& H2) {
    if (H1.rows() != H2.rows()) {
        throw ArgumentError("metric_Dbar requires equal row counts");
    }
    const Eigen::Index dmax = std::max(H1.cols(), H2.cols());
    if (dmax == 0) {
        return 0.0;
    }
    if (H1.cols() == 0 || H2.cols() == 0) {
        return 1.0;
    }
    const Matrix q1 = orthonormal_basis(H1);
    const Matrix q2 = orthonormal_basis(H2);
    const double tr = (q1.transpose() * q2).squaredNorm();
    return std::sqrt(std::max(0.0, 1.0 - tr / static_cast<double>(dmax)));
}

double rmse_factors(const Matrix& estimate, const Matrix& truth, RmseNormalization mode) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
        throw ArgumentError("rmse_factors requires equal shapes");
    }
    const auto n = static_cast<double>(estimate.rows());
    if (n == 0) {
        throw ArgumentError("rmse_factors requires at least one time point");
    }
    double denom = n;
    if (mode == RmseNormalization::Large) {
        denom *= static_cast<double>(estimate.cols());
    }
    return std::sqrt((estimate - truth).squaredNorm() / denom);
}

}  // namespace urf
