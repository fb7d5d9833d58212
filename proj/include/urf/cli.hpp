#pragma once

#include "urf/errors.hpp"
#include "urf/forecast.hpp"
#include "urf/montecarlo.hpp"
#include "urf/pipeline.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace urf {

/// Malformed CSV; row and column are 1-based positions in the file.
class CsvParseError : public ArgumentError {
public:
    CsvParseError(const std::string& what, int row, int column);
    [[nodiscard]] int row() const noexcept { return row_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    int row_;
    int column_;
};

struct CsvTable {
    Matrix data;
    std::vector<std::string> header;  ///< empty when the file had none
};

/// Comma-separated, one time point per row. The first row is taken as a header
/// when any of its cells is not a number. Blank lines are skipped.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// 17 significant digits, so write then read reproduces the values.
void write_csv(std::ostream& out, const Matrix& data, const std::vector<std::string>& header = {});
void write_csv_file(const std::string& path, const Matrix& data,
                    const std::vector<std::string>& header = {});

inline constexpr int kSchemaVersion = 1;

nlohmann::ordered_json config_json(const PipelineConfig& config);
nlohmann::ordered_json decomposition_json(const Decomposition& dec, const PipelineConfig& config);
nlohmann::ordered_json forecast_json(const ForecastReport& report, const PipelineConfig& config);
/// FE_h table, one row per horizon and one column per method, followed by the
/// DM long-run variances and p-values of URF against every other method.
void write_forecast_table(std::ostream& out, const ForecastReport& report);

nlohmann::ordered_json ground_truth_json(const DgpSpec& spec, const GroundTruth& truth);

/**
 * Entry point of the urf tool: decompose, forecast, simulate, benchmark.
 * Returns 0 on success, 1 on argument errors and 2 on numerical failures.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace urf
