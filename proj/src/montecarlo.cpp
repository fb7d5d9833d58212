#include "urf/montecarlo.hpp"

#include "urf/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace urf {

std::string MethodVariant::name() const {
    std::string s = absolute_acf ? "a*" : "a";
    s += reorder ? "w*" : "w";
    return s;
}

std::uint64_t design_seed(std::uint64_t base, int p) noexcept {
    return splitmix64(splitmix64(base) ^ splitmix64(0xA5A5A5A5ULL + static_cast<std::uint64_t>(p)));
}

std::vector<MethodVariant> all_method_variants() {
    return {{true, true}, {false, false}, {true, false}, {false, true}};
}

Quartiles quartiles(std::vector<double> values) {
    if (values.empty()) {
        return {};
    }
    std::sort(values.begin(), values.end());
    const auto at = [&](double prob) {
        const double pos = prob * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    return {at(0.25), at(0.5), at(0.75)};
}

ReplicationRecord run_replication(const DgpSpec& spec, const MonteCarloOptions& options) {
    ReplicationRecord rec;
    rec.seed = spec.seed;
    rec.estimates.assign(options.methods.size(), MethodEstimate{});
    try {
        const SimulatedData data = generate(spec);
        const Matrix& y = data.panel.data();
        const GroundTruth& truth = data.truth;

        std::map<bool, UnitRootSplit> splits;
        std::map<std::pair<bool, bool>, StationaryStage> stages;
        for (std::size_t i = 0; i < options.methods.size(); ++i) {
            const MethodVariant& mv = options.methods[i];
            PipelineConfig cfg = options.config;
            cfg.absolute_acf = mv.absolute_acf;
            cfg.reorder = mv.reorder;
            auto it = splits.find(mv.absolute_acf);
            if (it == splits.end()) {
                cfg.validate(y.rows());
                it = splits.emplace(mv.absolute_acf, estimate_r1(y, cfg.k0, cfg.r1_params())).first;
            }
            const UnitRootSplit& split = it->second;
            const auto key = std::make_pair(mv.absolute_acf, mv.reorder);
            auto st = stages.emplace(key, estimate_stationary_count(split.x2, cfg)).first;
            rec.estimates[i] = {split.r1_hat, st->second.r2.r2_hat};
        }

        if (options.accuracy && !options.methods.empty()) {
            const MethodVariant& primary = options.methods.front();
            const UnitRootSplit& split = splits.at(primary.absolute_acf);
            const StationaryStage& stage = stages.at({primary.absolute_acf, primary.reorder});
            StationaryOptions so;
            so.K_override = options.config.K_override;
            so.tau = options.config.prominence;
            so.max_k = options.config.max_k;
            const StationaryFactorFit fit = fit_stationary(split.x2, stage.m2_eig,
                                                           stage.r2.r2_hat, stage.r2.order, so);
            rec.K_hat = fit.K_hat;
            rec.dbar_A1 = metric_Dbar(split.A1, truth.A1);
            rec.dbar_A2 = metric_Dbar(split.A2, truth.A2);
            rec.dbar_A2U1 = metric_Dbar(split.A2 * fit.U1, truth.A2 * truth.U22_1);

            const RmseNormalization mode =
                spec.example == 1 ? RmseNormalization::Small : RmseNormalization::Large;
            rec.rmse_trend = rmse_factors(split.x1 * split.A1.transpose(),
                                          truth.x1 * truth.A1.transpose(), mode);
            rec.rmse_factor = rmse_factors(fit.z2 * (split.A2 * fit.U1).transpose(),
                                           truth.f2 * (truth.A2 * truth.U22_1).transpose(), mode);

            const auto d = static_cast<int>(split.x2.cols());
            const int R = d / 2;
            if (R >= 1 && R + 1 <= d) {
                rec.lam_yao = lam_yao_ratio(to_std(stage.m2_eig.values), R);
            }
        }
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
    }
    return rec;
}

namespace {

CellResult summarize(const DgpSpec& spec, const MonteCarloOptions& options,
                     std::vector<ReplicationRecord> reps) {
    CellResult cell;
    cell.spec = spec;
    const auto total = static_cast<double>(reps.size());
    for (std::size_t i = 0; i < options.methods.size(); ++i) {
        MethodSummary ms;
        ms.method = options.methods[i];
        int hit1 = 0;
        int hit2 = 0;
        int hit_total = 0;
        for (const ReplicationRecord& r : reps) {
            if (r.failed) continue;
            const MethodEstimate& e = r.estimates[i];
            hit1 += e.r1_hat == spec.r1;
            hit2 += e.r2_hat == spec.r2;
            hit_total += e.r1_hat + e.r2_hat == spec.r1 + spec.r2;
        }
        if (total > 0) {
            ms.p_r1 = hit1 / total;
            ms.p_r2 = hit2 / total;
            ms.p_total = hit_total / total;
        }
        cell.methods.push_back(ms);
    }
    std::vector<double> a1, a2, a2u1, rt, rf;
    for (const ReplicationRecord& r : reps) {
        if (r.failed) {
            ++cell.failures;
            continue;
        }
        a1.push_back(r.dbar_A1);
        a2.push_back(r.dbar_A2);
        a2u1.push_back(r.dbar_A2U1);
        rt.push_back(r.rmse_trend);
        rf.push_back(r.rmse_factor);
    }
    if (options.accuracy) {
        cell.dbar_A1 = quartiles(a1);
        cell.dbar_A2 = quartiles(a2);
        cell.dbar_A2U1 = quartiles(a2u1);
        cell.rmse_trend = quartiles(rt);
        cell.rmse_factor = quartiles(rf);
    }
    cell.reps = std::move(reps);
    return cell;
}

}  // namespace

MonteCarloResult run_montecarlo(const std::vector<DgpSpec>& grid,
                                const MonteCarloOptions& options) {
    if (options.reps < 1) {
        throw ArgumentError("reps must be >= 1");
    }
    if (options.methods.empty()) {
        throw ArgumentError("at least one method variant is required");
    }
    for (const DgpSpec& spec : grid) {
        spec.validate();
    }
    const std::size_t per_cell = static_cast<std::size_t>(options.reps);
    const std::size_t jobs = grid.size() * per_cell;
    std::vector<ReplicationRecord> records(jobs);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const std::size_t c = job / per_cell;
            const std::size_t r = job % per_cell;
            DgpSpec spec = grid[c];
            spec.seed = stream_seed(options.base_seed, c, r);
            if (options.fixed_design) {
                spec.design_seed = design_seed(options.base_seed, spec.p);
            }
            records[job] = run_replication(spec, options);
            records[job].rep = static_cast<int>(r);
        }
    };
    const int threads = std::max(1, options.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    MonteCarloResult result;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        std::vector<ReplicationRecord> reps(
            std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(c * per_cell)),
            std::make_move_iterator(records.begin() +
                                    static_cast<std::ptrdiff_t>((c + 1) * per_cell)));
        result.cells.push_back(summarize(grid[c], options, std::move(reps)));
    }
    return result;
}

int lam_yao_mode(const CellResult& cell) {
    std::map<int, int> counts;
    for (const ReplicationRecord& r : cell.reps) {
        if (!r.failed && r.lam_yao > 0) {
            ++counts[r.lam_yao];
        }
    }
    int best = 0;
    int best_count = 0;
    for (const auto& [value, count] : counts) {
        if (count > best_count) {
            best = value;
            best_count = count;
        }
    }
    return best;
}

void write_montecarlo_csv(std::ostream& os, const MonteCarloResult& result) {
    os << "cell,example,p,n,r1,r2,K,delta,method,statistic,value\n";
    const auto prefix = [&](std::size_t c, const DgpSpec& s) {
        std::ostringstream ss;
        ss << c << ',' << s.example << ',' << s.p << ',' << s.n << ',' << s.r1 << ',' << s.r2
           << ',' << s.K << ',' << s.delta << ',';
        return ss.str();
    };
    os << std::setprecision(10);
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const CellResult& cell = result.cells[c];
        const std::string pre = prefix(c, cell.spec);
        for (const MethodSummary& ms : cell.methods) {
            os << pre << ms.method.name() << ",P(r1_hat=r1)," << ms.p_r1 << '\n';
            os << pre << ms.method.name() << ",P(r2_hat=r2)," << ms.p_r2 << '\n';
            os << pre << ms.method.name() << ",P(r1_hat+r2_hat=r)," << ms.p_total << '\n';
        }
        const std::string primary = cell.methods.empty() ? "" : cell.methods.front().method.name();
        const auto q = [&](const char* stat, const Quartiles& v) {
            os << pre << primary << ',' << stat << "_q1," << v.q1 << '\n';
            os << pre << primary << ',' << stat << "_median," << v.median << '\n';
            os << pre << primary << ',' << stat << "_q3," << v.q3 << '\n';
        };
        q("Dbar(A1)", cell.dbar_A1);
        q("Dbar(A2)", cell.dbar_A2);
        q("Dbar(A2U1)", cell.dbar_A2U1);
        q(cell.spec.example == 1 ? "RMSE1" : "RMSE3", cell.rmse_trend);
        q(cell.spec.example == 1 ? "RMSE2" : "RMSE4", cell.rmse_factor);
        os << pre << primary << ",lam_yao_mode," << lam_yao_mode(cell) << '\n';
        os << pre << primary << ",failures," << cell.failures << '\n';
    }
}

namespace {

std::string fmt3(double v) {
    std::ostringstream ss;
    if (v == 1.0) {
        ss << '1';
    } else {
        ss << std::fixed << std::setprecision(3) << v;
    }
    return ss.str();
}

const MethodSummary* find_method(const CellResult& cell, MethodVariant mv) {
    for (const MethodSummary& ms : cell.methods) {
        if (ms.method == mv) return &ms;
    }
    return nullptr;
}

}  // namespace

void write_montecarlo_table(std::ostream& os, const MonteCarloResult& result) {
    os << std::left << std::setw(8) << "example" << std::setw(7) << "delta" << std::setw(6)
       << "p" << std::setw(7) << "n" << std::setw(22) << "EP" << std::setw(10) << "methods"
       << "value\n";
    for (const CellResult& cell : result.cells) {
        const MethodSummary* star = find_method(cell, {true, true});
        const MethodSummary* plain = find_method(cell, {false, false});
        const MethodSummary* first = star ? star : (cell.methods.empty() ? nullptr : &cell.methods[0]);
        if (first == nullptr) continue;
        const auto pair = [&](double a, double b, bool has_b) {
            return has_b ? fmt3(a) + "(" + fmt3(b) + ")" : fmt3(a);
        };
        const bool both = star != nullptr && plain != nullptr;
        const auto row = [&](const char* ep, const char* methods, const std::string& value) {
            std::ostringstream delta;
            delta << cell.spec.delta;
            os << std::left << std::setw(8) << cell.spec.example << std::setw(7) << delta.str()
               << std::setw(6) << cell.spec.p << std::setw(7) << cell.spec.n << std::setw(22)
               << ep << std::setw(10) << methods << value << '\n';
        };
        row("P(r1_hat=r1)", both ? "a*(a)" : "", pair(first->p_r1, both ? plain->p_r1 : 0, both));
        row("P(r2_hat=r2)", both ? "a*w*(aw)" : "", pair(first->p_r2, both ? plain->p_r2 : 0, both));
        row("P(r1_hat+r2_hat=r)", both ? "a*w*(aw)" : "",
            pair(first->p_total, both ? plain->p_total : 0, both));
    }
}

}  // namespace urf
