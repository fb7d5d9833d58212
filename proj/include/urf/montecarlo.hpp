#pragma once

#include "urf/pipeline.hpp"
#include "urf/simgen.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace urf {

/// One estimation variant: a / a* for r1 crossed with w / w* for r2.
struct MethodVariant {
    bool absolute_acf = true;
    bool reorder = true;

    [[nodiscard]] std::string name() const;
    friend bool operator==(const MethodVariant&, const MethodVariant&) = default;
};

/// a*w*, aw, a*w, aw* in that order; the first is the primary method.
std::vector<MethodVariant> all_method_variants();

struct MethodEstimate {
    int r1_hat = -1;
    int r2_hat = -1;
};

/// Everything recorded for one replication.
struct ReplicationRecord {
    int rep = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    std::vector<MethodEstimate> estimates;  ///< aligned with the method list
    // Accuracy measures of the primary method.
    double dbar_A1 = 0.0;
    double dbar_A2 = 0.0;
    double dbar_A2U1 = 0.0;
    double rmse_trend = 0.0;   ///< RMSE1 (example 1) or RMSE3 (example 2)
    double rmse_factor = 0.0;  ///< RMSE2 or RMSE4
    int K_hat = 0;
    int lam_yao = 0;  ///< ratio estimate of r2 with R = floor((p - r1_hat) / 2)
};

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Linear-interpolation quantile summary; empty input gives zeros.
Quartiles quartiles(std::vector<double> values);

struct MethodSummary {
    MethodVariant method;
    double p_r1 = 0.0;
    double p_r2 = 0.0;
    double p_total = 0.0;
};

struct CellResult {
    DgpSpec spec;
    std::vector<MethodSummary> methods;
    std::vector<ReplicationRecord> reps;
    int failures = 0;
    Quartiles dbar_A1;
    Quartiles dbar_A2;
    Quartiles dbar_A2U1;
    Quartiles rmse_trend;
    Quartiles rmse_factor;
};

struct MonteCarloResult {
    std::vector<CellResult> cells;
};

struct MonteCarloOptions {
    PipelineConfig config;  ///< tuning shared by every replication (variant flags overridden)
    std::vector<MethodVariant> methods = all_method_variants();
    int reps = 100;
    std::uint64_t base_seed = 1234;
    int threads = 1;
    bool accuracy = true;  ///< compute D-bar / RMSE / Lam-Yao for the primary method
    /// Draw loadings and Phi once per dimension p (design_seed(base_seed, p)) and
    /// only the innovations per replication. Otherwise everything is redrawn.
    bool fixed_design = true;
};

/// Design seed shared by every cell of dimension p.
std::uint64_t design_seed(std::uint64_t base, int p) noexcept;

/// Runs a single replication of a cell (seed already set in spec).
ReplicationRecord run_replication(const DgpSpec& spec, const MonteCarloOptions& options);

/**
 * Runs every cell for options.reps replications. Replication r of cell c uses
 * stream_seed(base_seed, c, r) for its draws (innovations only under a fixed
 * design); failures are recorded and count as misses.
 * Results do not depend on the thread count.
 */
MonteCarloResult run_montecarlo(const std::vector<DgpSpec>& grid, const MonteCarloOptions& options);

/// Mode of the Lam-Yao estimates (smallest value wins ties).
int lam_yao_mode(const CellResult& cell);

/// One row per cell x method x statistic.
void write_montecarlo_csv(std::ostream& os, const MonteCarloResult& result);

/// Aligned table in the "primary(secondary)" layout: a*(a) and a*w*(aw).
void write_montecarlo_table(std::ostream& os, const MonteCarloResult& result);

}  // namespace urf
