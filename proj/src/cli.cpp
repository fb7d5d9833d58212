#include "urf/cli.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace urf {

using json = nlohmann::ordered_json;

CsvParseError::CsvParseError(const std::string& what, int row, int column)
    : ArgumentError("CSV row " + std::to_string(row) + ", column " + std::to_string(column) + ": " +
                    what),
      row_(row),
      column_(column) {}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

bool parse_number(std::string_view cell, double& value) {
    if (cell.empty()) {
        return false;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::vector<double> values;
    std::size_t width = 0;
    Eigen::Index rows = 0;
    bool first = true;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_cells(line);
        if (first) {
            width = cells.size();
            first = false;
            double dummy = 0.0;
            bool numeric = true;
            for (auto c : cells) {
                numeric = numeric && parse_number(c, dummy);
            }
            if (!numeric) {
                for (auto c : cells) {
                    table.header.emplace_back(c);
                }
                continue;
            }
        }
        if (cells.size() != width) {
            throw CsvParseError("expected " + std::to_string(width) + " cells, found " +
                                    std::to_string(cells.size()),
                                line_no, static_cast<int>(std::min(cells.size(), width) + 1));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            double v = 0.0;
            if (!parse_number(cells[j], v)) {
                throw CsvParseError("not a number: '" + std::string(cells[j]) + "'", line_no,
                                    static_cast<int>(j + 1));
            }
            if (!std::isfinite(v)) {
                throw CsvParseError("non-finite value", line_no, static_cast<int>(j + 1));
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) {
        throw CsvParseError("no data rows", line_no + 1, 1);
    }
    const auto cols = static_cast<Eigen::Index>(width);
    table.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), rows, cols);
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("cannot open '" + path + "'");
    }
    return read_csv(in);
}

void write_csv(std::ostream& out, const Matrix& data, const std::vector<std::string>& header) {
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            out << (j ? "," : "") << header[j];
        }
        out << '\n';
    }
    const auto old = out.precision(17);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            if (j) {
                out << ',';
            }
            out << data(i, j);
        }
        out << '\n';
    }
    out.precision(old);
}

void write_csv_file(const std::string& path, const Matrix& data,
                    const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) {
        throw ArgumentError("cannot write '" + path + "'");
    }
    write_csv(out, data, header);
}

namespace {

json vec_json(const Vector& v) {
    return json(to_std(v));
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows.push_back(vec_json(m.row(i).transpose()));
    }
    return rows;
}

}  // namespace

json config_json(const PipelineConfig& c) {
    json j = {{"k0", c.k0},
              {"j0", c.j0},
              {"c0", c.c0},
              {"l", c.l},
              {"m", c.m},
              {"alpha", c.alpha},
              {"epsilon", c.epsilon},
              {"absolute_acf", c.absolute_acf},
              {"reorder", c.reorder},
              {"horizons", c.horizons},
              {"window_start", c.window_start},
              {"seed", c.seed}};
    j["K"] = c.K_override ? json(*c.K_override) : json(nullptr);
    return j;
}

json decomposition_json(const Decomposition& dec, const PipelineConfig& config) {
    const auto& split = dec.split;
    json tests = json::array();
    for (const auto& t : dec.r2.tests) {
        tests.push_back({{"statistic", t.statistic},
                         {"threshold", t.threshold},
                         {"reject", t.reject},
                         {"excluded", t.excluded}});
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "decompose";
    j["n"] = split.x1.rows();
    j["p"] = split.A1.rows();
    j["r1_hat"] = dec.r1_hat();
    j["r2_hat"] = dec.r2_hat();
    j["v_hat"] = dec.v_hat();
    j["K_hat"] = dec.K_hat();
    j["config"] = config_json(config);
    j["warnings"] = dec.warnings;
    j["unit_root"] = {{"M1_eigenvalues", vec_json(split.eigenvalues)},
                      {"s_values", split.s_values},
                      {"degenerate_components", split.degenerate_components}};
    j["white_noise"] = {{"joint_test", dec.used_joint_test},
                        {"order", dec.r2.order},
                        {"ljung_box_pvalues", dec.r2.pvalues},
                        {"kept", dec.r2.kept},
                        {"tests", tests}};
    j["stationary"] = {{"M2_eigenvalues", vec_json(dec.stationary.M2_eigenvalues)},
                       {"S_eigenvalues", vec_json(dec.stationary.S_eigenvalues)}};
    return j;
}

json forecast_json(const ForecastReport& r, const PipelineConfig& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "forecast";
    j["n"] = r.n;
    j["p"] = r.p;
    j["window_start"] = r.window_start;
    j["horizons"] = r.horizons;
    j["methods"] = r.methods;
    j["pca_levels_factors"] = r.pca_levels_factors;
    j["pca_diff_factors"] = r.pca_diff_factors;
    j["config"] = config_json(config);
    j["warnings"] = r.warnings;
    json fe = json::object();
    json rm = json::object();
    for (std::size_t m = 0; m < r.methods.size(); ++m) {
        fe[r.methods[m]] = r.fe[m];
        json per_h = json::array();
        for (const auto& v : r.rmsfe[m]) {
            per_h.push_back(vec_json(v));
        }
        rm[r.methods[m]] = per_h;
    }
    j["fe"] = fe;
    j["rmsfe"] = rm;
    json dm = json::array();
    for (const auto& e : r.dm) {
        const auto& d = e.result;
        json entry = {{"method_a", e.method_a}, {"method_b", e.method_b}, {"h", e.h},
                      {"lrv", d.lrv},           {"pvalue", d.pvalue},     {"bandwidth", d.bandwidth},
                      {"infinite", d.infinite}};
        entry["statistic"] = d.infinite ? json(d.statistic < 0 ? "-inf" : "inf") : json(d.statistic);
        dm.push_back(entry);
    }
    j["dm"] = dm;
    j["forecasts"] = matrix_json(r.forecasts);
    return j;
}

void write_forecast_table(std::ostream& out, const ForecastReport& r) {
    const auto old_flags = out.flags();
    const auto old_prec = out.precision(4);
    out << std::fixed;
    out << "Forecast errors FE_h (window start " << r.window_start << ", n " << r.n << ")\n";
    out << std::setw(6) << "Step";
    for (const auto& m : r.methods) {
        out << std::setw(14) << m;
    }
    out << '\n';
    for (std::size_t k = 0; k < r.horizons.size(); ++k) {
        out << std::setw(6) << r.horizons[k];
        for (std::size_t m = 0; m < r.methods.size(); ++m) {
            out << std::setw(14) << r.fe[m][k];
        }
        out << '\n';
    }
    if (!r.dm.empty()) {
        out << "\nDiebold-Mariano tests (p-value of a smaller loss for the first method)\n";
        out << std::setw(6) << "Step" << std::setw(24) << "pair" << std::setw(14) << "L-COV"
            << std::setw(14) << "statistic" << std::setw(14) << "p-value" << '\n';
        for (const auto& e : r.dm) {
            out << std::setw(6) << e.h << std::setw(24) << (e.method_a + "-" + e.method_b)
                << std::setw(14) << e.result.lrv << std::setw(14);
            if (e.result.infinite) {
                out << (e.result.statistic < 0 ? "-inf" : "inf");
            } else {
                out << e.result.statistic;
            }
            out << std::setw(14) << e.result.pvalue << '\n';
        }
    }
    out.flags(old_flags);
    out.precision(old_prec);
}

json ground_truth_json(const DgpSpec& spec, const GroundTruth& g) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "simulate";
    j["spec"] = {{"example", spec.example}, {"p", spec.p},         {"n", spec.n},
                 {"r1", spec.r1},           {"r2", spec.r2},       {"K", spec.K},
                 {"delta", spec.delta},     {"seed", spec.seed}};
    j["A1"] = matrix_json(g.A1);
    j["A2"] = matrix_json(g.A2);
    j["U22_1"] = matrix_json(g.U22_1);
    j["U22_2"] = matrix_json(g.U22_2);
    j["phi"] = vec_json(g.phi);
    return j;
}

namespace {

void add_pipeline_flags(CLI::App& app, PipelineConfig& c, bool& no_abs, bool& no_reorder,
                        int& K) {
    app.add_option("--k0", c.k0, "lags 0..k0 in M1")->capture_default_str();
    app.add_option("--j0", c.j0, "lags 1..j0 in M2")->capture_default_str();
    app.add_option("--c0", c.c0, "unit-root threshold on S/m")->capture_default_str();
    app.add_option("--l", c.l, "lag spacing in S")->capture_default_str();
    app.add_option("--m", c.m, "lags per white-noise test and terms in S")->capture_default_str();
    app.add_option("--alpha", c.alpha, "test level")->capture_default_str();
    app.add_option("--epsilon", c.epsilon, "kept fraction of n when p - r1 >= n")
        ->capture_default_str();
    app.add_option("--K", K, "number of prominent noise components (default: estimated)");
    app.add_flag("--no-absolute-acf", no_abs, "signed autocorrelations in S");
    app.add_flag("--no-reorder", no_reorder, "keep eigenvalue order in white-noise testing");
    app.add_option("--horizons", c.horizons, "forecast horizons")->delimiter(',')
        ->capture_default_str();
    app.add_option("--window-start", c.window_start, "first forecast origin (0: ceil(0.8 n))")
        ->capture_default_str();
    app.add_option("--seed", c.seed, "random seed")->capture_default_str();
}

void finish_config(PipelineConfig& c, bool no_abs, bool no_reorder, int K) {
    c.absolute_acf = !no_abs;
    c.reorder = !no_reorder;
    if (K >= 0) {
        c.K_override = K;
    } else if (K != -1) {
        throw ArgumentError("--K must be >= 0");
    }
}

std::filesystem::path prepare_dir(const std::string& dir) {
    std::filesystem::path path(dir);
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) {
        throw ArgumentError("cannot create '" + dir + "': " + ec.message());
    }
    return path;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw ArgumentError("cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

int fail(std::ostream& err, const char* kind, const std::exception& e, int code) {
    err << "error (" << kind << "): " << e.what() << '\n';
    return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unit-root and stationary factor decomposition of panel time series", "urf"};
    app.require_subcommand(1);

    PipelineConfig config;
    bool no_abs = false;
    bool no_reorder = false;
    int K = -1;
    std::string input;
    std::string out_dir;
    int reps = 100;
    int levels_factors = -1;
    int diff_factors = -1;

    auto* dec_cmd = app.add_subcommand("decompose", "estimate r1, r2 and the factor spaces");
    dec_cmd->add_option("input", input, "panel CSV (rows are time points)")->required();
    dec_cmd->add_option("--out-dir", out_dir, "write report.json, loadings and factor paths here");
    add_pipeline_flags(*dec_cmd, config, no_abs, no_reorder, K);

    auto* fc_cmd = app.add_subcommand("forecast", "expanding-window forecast comparison");
    fc_cmd->add_option("input", input, "panel CSV (rows are time points)")->required();
    fc_cmd->add_option("--out-dir", out_dir, "write forecast.json, fe.csv and fe.txt here");
    bool table_only = false;
    fc_cmd->add_flag("--table", table_only, "print the FE/DM table instead of JSON");
    fc_cmd->add_option("--pca-levels-factors", levels_factors,
                       "factors of the levels PCA baseline (default: r1 at the first origin)");
    fc_cmd->add_option("--pca-diff-factors", diff_factors,
                       "factors of the differences PCA baseline (default: r1 + r2)");
    add_pipeline_flags(*fc_cmd, config, no_abs, no_reorder, K);

    DgpSpec spec;
    std::string output;
    std::string truth_path;
    auto* sim_cmd = app.add_subcommand("simulate", "generate an Example 1 or 2 panel");
    sim_cmd->add_option("--example", spec.example)->capture_default_str();
    sim_cmd->add_option("--p", spec.p)->capture_default_str();
    sim_cmd->add_option("--n", spec.n)->capture_default_str();
    sim_cmd->add_option("--r1", spec.r1)->capture_default_str();
    sim_cmd->add_option("--r2", spec.r2)->capture_default_str();
    sim_cmd->add_option("--K", spec.K, "prominent noise columns (example 2)")->capture_default_str();
    sim_cmd->add_option("--delta", spec.delta)->capture_default_str();
    sim_cmd->add_option("--seed", spec.seed)->capture_default_str();
    sim_cmd->add_option("--out-dir", out_dir, "write panel.csv and truth.json here");
    sim_cmd->add_option("-o,--output", output, "panel CSV path (default: stdout)");
    sim_cmd->add_option("--truth", truth_path, "ground-truth JSON path");

    std::vector<int> grid_p{6};
    std::vector<int> grid_n{200, 500, 1000, 1500, 3000};
    std::vector<double> grid_delta{0.0};
    int threads = 1;
    bool fresh_design = false;
    auto* bench_cmd = app.add_subcommand("benchmark", "Monte Carlo tables of P(r1_hat = r1) etc.");
    bench_cmd->add_option("--example", spec.example)->capture_default_str();
    bench_cmd->add_option("--p", grid_p, "dimensions")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--n", grid_n, "sample sizes")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--delta", grid_delta, "strengths")->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--r1", spec.r1)->capture_default_str();
    bench_cmd->add_option("--r2", spec.r2)->capture_default_str();
    bench_cmd->add_option("--noise-K", spec.K, "prominent noise columns of the DGP")
        ->capture_default_str();
    bench_cmd->add_option("--reps", reps)->capture_default_str();
    bench_cmd->add_option("--threads", threads)->capture_default_str();
    bench_cmd->add_flag("--fresh-design", fresh_design, "redraw loadings in every replication");
    bench_cmd->add_option("--out-dir", out_dir, "write benchmark.csv and benchmark.txt here");
    add_pipeline_flags(*bench_cmd, config, no_abs, no_reorder, K);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (dec_cmd->parsed()) {
            finish_config(config, no_abs, no_reorder, K);
            const CsvTable table = read_csv_file(input);
            const TimeSeriesPanel panel(table.data);
            const Decomposition dec = decompose(panel, config);
            json report = decomposition_json(dec, config);
            for (const auto& w : dec.warnings) {
                err << "warning: " << w << '\n';
            }
            if (!out_dir.empty()) {
                const auto dir = prepare_dir(out_dir);
                write_json(dir / "report.json", report);
                write_csv_file((dir / "A1.csv").string(), dec.split.A1);
                write_csv_file((dir / "A2.csv").string(), dec.split.A2);
                write_csv_file((dir / "U1.csv").string(), dec.stationary.U1);
                write_csv_file((dir / "x1.csv").string(), dec.split.x1);
                write_csv_file((dir / "z2.csv").string(), dec.stationary.z2);
            }
            out << report.dump(2) << '\n';
        } else if (fc_cmd->parsed()) {
            finish_config(config, no_abs, no_reorder, K);
            const CsvTable table = read_csv_file(input);
            const TimeSeriesPanel panel(table.data);
            ForecastOptions options;
            options.config = config;
            options.pca_levels_factors = levels_factors;
            options.pca_diff_factors = diff_factors;
            const ForecastReport report = evaluate_forecasts(panel.data(), options);
            for (const auto& w : report.warnings) {
                err << "warning: " << w << '\n';
            }
            const json j = forecast_json(report, config);
            if (!out_dir.empty()) {
                const auto dir = prepare_dir(out_dir);
                write_json(dir / "forecast.json", j);
                Matrix fe(static_cast<Eigen::Index>(report.horizons.size()),
                          static_cast<Eigen::Index>(report.methods.size()) + 1);
                for (std::size_t k = 0; k < report.horizons.size(); ++k) {
                    fe(static_cast<Eigen::Index>(k), 0) = report.horizons[k];
                    for (std::size_t m = 0; m < report.methods.size(); ++m) {
                        fe(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m) + 1) =
                            report.fe[m][k];
                    }
                }
                std::vector<std::string> header{"h"};
                header.insert(header.end(), report.methods.begin(), report.methods.end());
                write_csv_file((dir / "fe.csv").string(), fe, header);
                write_csv_file((dir / "forecasts.csv").string(), report.forecasts, table.header);
                std::ofstream txt(dir / "fe.txt");
                write_forecast_table(txt, report);
            }
            if (table_only) {
                write_forecast_table(out, report);
            } else {
                out << j.dump(2) << '\n';
            }
        } else if (sim_cmd->parsed()) {
            const SimulatedData data = generate(spec);
            const json truth = ground_truth_json(spec, data.truth);
            if (!out_dir.empty()) {
                const auto dir = prepare_dir(out_dir);
                output = output.empty() ? (dir / "panel.csv").string() : output;
                truth_path = truth_path.empty() ? (dir / "truth.json").string() : truth_path;
            }
            if (output.empty()) {
                write_csv(out, data.panel.data());
            } else {
                write_csv_file(output, data.panel.data());
            }
            if (!truth_path.empty()) {
                write_json(truth_path, truth);
            }
        } else if (bench_cmd->parsed()) {
            finish_config(config, no_abs, no_reorder, K);
            if (reps < 1) {
                throw ArgumentError("--reps must be >= 1");
            }
            std::vector<DgpSpec> grid;
            for (double delta : grid_delta) {
                for (int p : grid_p) {
                    for (int n : grid_n) {
                        DgpSpec cell = spec;
                        cell.p = p;
                        cell.n = n;
                        cell.delta = delta;
                        cell.validate();
                        grid.push_back(cell);
                    }
                }
            }
            MonteCarloOptions options;
            options.config = config;
            options.reps = reps;
            options.base_seed = config.seed;
            options.threads = threads;
            options.fixed_design = !fresh_design;
            const MonteCarloResult result = run_montecarlo(grid, options);
            std::ostringstream table;
            write_montecarlo_table(table, result);
            if (!out_dir.empty()) {
                const auto dir = prepare_dir(out_dir);
                std::ofstream csv(dir / "benchmark.csv");
                write_montecarlo_csv(csv, result);
                std::ofstream txt(dir / "benchmark.txt");
                txt << table.str();
                if (!csv || !txt) {
                    throw ArgumentError("cannot write benchmark files in '" + out_dir + "'");
                }
            }
            out << table.str();
        }
    } catch (const ArgumentError& e) {
        return fail(err, "argument", e, 1);
    } catch (const std::invalid_argument& e) {
        return fail(err, "argument", e, 1);
    } catch (const DegenerateSeriesError& e) {
        return fail(err, "numerical", e, 2);
    } catch (const std::exception& e) {
        return fail(err, "numerical", e, 2);
    }
    return 0;
}

}  // namespace urf
