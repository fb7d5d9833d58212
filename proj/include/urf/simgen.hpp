#pragma once

#include "urf/tsstats.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace urf {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of replication `rep` in grid cell `cell` under a base seed.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t rep) noexcept;

/**
 * Deterministic random source: std::mt19937_64 engine, uniforms from the top 53
 * bits, standard normals by the Marsaglia polar method. Draws are bit-identical
 * across platforms because no std::*_distribution is involved.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept;  ///< [0, 1)
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept;

    Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi);
    Vector normal_vector(Eigen::Index size);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Orthonormalized (QR, positive diagonal of R) p x p matrix of U(-2, 2) draws.
Matrix random_orthonormal(Eigen::Index p, Rng& rng);
Matrix random_orthonormal(Eigen::Index p, std::uint64_t seed);

/// Parameters of a simulated design.
struct DgpSpec {
    int p = 6;
    int n = 200;
    int r1 = 2;
    int r2 = 2;
    int K = 0;
    double delta = 0.0;
    int example = 1;  ///< 1: orthonormal loadings; 2: strength-scaled loadings
    std::uint64_t seed = 1234;
    /// When set, loadings and Phi come from this seed and only the innovations
    /// from `seed`, so replications share one design.
    std::optional<std::uint64_t> design_seed;

    [[nodiscard]] int v() const noexcept { return p - r1 - r2; }
    void validate() const;
};

/// Everything needed to rebuild the simulated panel.
struct GroundTruth {
    Matrix A1;     ///< p x r1 (scaled by p^{(1-delta)/2} in example 2)
    Matrix A2;     ///< p x (p - r1)
    Matrix U22_1;  ///< (p - r1) x r2
    Matrix U22_2;  ///< (p - r1) x v
    Vector phi;    ///< AR(1) coefficients of the stationary factors
    Matrix x1;     ///< n x r1 random walks
    Matrix f2;     ///< n x r2 AR(1) factors
    Matrix eps;    ///< n x v white noise
    Matrix x2;     ///< n x (p - r1) = f2 U22_1' + eps U22_2'

    /// y_t rebuilt from the components.
    [[nodiscard]] Matrix panel() const;
};

struct SimulatedData {
    TimeSeriesPanel panel;
    GroundTruth truth;
};

/**
 * Example 1: orthonormal A, U22_1 ~ U(-1,1), U22_2 ~ U(-1,1)/sqrt(p),
 * Phi diagonal ~ U(0.5, 0.9), x1 a random walk from zero, f2 diagonal AR(1)
 * from zero, all innovations N(0, 1).
 *
 * Draw order: A matrix, U22_1, U22_2, Phi, then per time point eta1, eta2, eps.
 * With a design seed the first four come from a separate stream.
 */
SimulatedData gen_example1(const DgpSpec& spec);

/**
 * Example 2: as example 1 with A1 scaled by p^{(1-delta)/2}, U22_1 divided by
 * p^{delta/2}, the first K columns of U22_2 by p^{delta/2} and the rest by p.
 */
SimulatedData gen_example2(const DgpSpec& spec);

/// Dispatches on spec.example.
SimulatedData generate(const DgpSpec& spec);

/// sqrt(1 - tr(H1 H1' H2 H2') / r) for half-orthonormal H1, H2 with equal column counts.
double metric_D(const Matrix& H1, const Matrix& H2);

/// sqrt(1 - tr(P1 P2) / max(d1, d2)) with P_i the projector onto span(H_i).
double metric_Dbar(const Matrix& H1, const Matrix& H2);

enum class RmseNormalization { Small, Large };

/// [sum_t ||est_t - truth_t||^2 / n]^{1/2}, or / (n p) in the large mode.
/// Rows are time points; both inputs are n x p.
double rmse_factors(const Matrix& estimate, const Matrix& truth, RmseNormalization mode);

}  // namespace urf
