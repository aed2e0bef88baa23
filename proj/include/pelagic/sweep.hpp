#pragma once

#include <chrono>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pelagic/config.hpp"
#include "pelagic/csv.hpp"
#include "pelagic/errors.hpp"
#include "pelagic/planner.hpp"
#include "pelagic/scenario.hpp"

// Parameter sweeps over (P_max, E, I): each tuple runs the joint planner plus
// the shore and terrestrial baselines and lands as CSV rows. Tuples are
// independent, so they may run on a thread pool; output order and bytes do
// not depend on the job count.

namespace pelagic {

struct SweepLists {
    std::vector<double> p_max_dbm = {22, 24, 26, 28, 30, 32, 34, 36, 38, 40};
    std::vector<double> energy_j = {1.5e3, 3.0e4};
    std::vector<double> interference_dbm = {-55.0, -40.0};
};

struct ExperimentConfig {
    Scenario scenario;
    SweepLists sweep;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    void validate() const {
        scenario.validate();
        if (sweep.p_max_dbm.empty() || sweep.energy_j.empty() || sweep.interference_dbm.empty())
            throw ConfigError("sweep lists must be non-empty");
        for (double p : sweep.p_max_dbm)
            if (!(p >= 0.0) || !(p <= 60.0))
                throw ConfigError("sweep p_max_dbm outside the physical range [0, 60] dBm");
        for (double e : sweep.energy_j)
            if (!(e > 0.0) || !(e <= 1e9))
                throw ConfigError("sweep energy_j outside the physical range (0, 1e9] J");
        for (double i : sweep.interference_dbm)
            if (!(i >= -150.0) || !(i <= 50.0))
                throw ConfigError("sweep interference_dbm outside the physical range [-150, 50]");
    }
};

inline ExperimentConfig experiment_from_config(const config::Table& tbl) {
    // Scenario subtree is validated by scenario_from_config; check the rest.
    std::set<std::string> known = {"seed", "output_dir", "sweep.p_max_dbm", "sweep.energy_j",
                                   "sweep.interference_dbm"};
    for (const auto& [key, value] : tbl.entries) {
        if (key.compare(0, 9, "scenario.") == 0) continue;
        if (known.count(key) == 0) throw ConfigError("unknown config key '" + key + "'");
    }
    ExperimentConfig cfg;
    cfg.scenario = scenario_from_config(tbl);
    cfg.sweep.p_max_dbm = tbl.get_double_list("sweep.p_max_dbm", cfg.sweep.p_max_dbm);
    cfg.sweep.energy_j = tbl.get_double_list("sweep.energy_j", cfg.sweep.energy_j);
    cfg.sweep.interference_dbm =
        tbl.get_double_list("sweep.interference_dbm", cfg.sweep.interference_dbm);
    const double seed = tbl.get_double("seed", double(cfg.seed));
    if (!(seed >= 0.0)) throw ConfigError("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.output_dir = tbl.get_string("output_dir", cfg.output_dir);
    cfg.validate();
    return cfg;
}

inline ExperimentConfig experiment_from_file(const std::string& path) {
    return experiment_from_config(config::parse_file(path));
}

struct SweepTuple {
    double p_max_dbm;
    double energy_j;
    double interference_dbm;
};

inline std::vector<SweepTuple> enumerate_tuples(const ExperimentConfig& cfg) {
    std::vector<SweepTuple> tuples;
    for (double p : cfg.sweep.p_max_dbm)
        for (double e : cfg.sweep.energy_j)
            for (double i : cfg.sweep.interference_dbm) tuples.push_back({p, e, i});
    return tuples;
}

struct SweepRow {
    std::string algorithm; // joint | terrestrial | shore
    double p_max_dbm = 0.0;
    double energy_j = 0.0;
    double interference_dbm = 0.0;
    double min_rate_bpshz = 0.0; // nan when infeasible
    double energy_used_j = 0.0;
    double runtime_s = 0.0;
};

inline constexpr const char* kSweepCsvHeader =
    "algorithm,p_max_dbm,energy_j,interference_dbm,min_rate_bpshz,energy_used_j,runtime_s";

/// Runs every (P_max, E, I) tuple through the three algorithms. Rows come out
/// in tuple-major, algorithm-minor order regardless of `jobs`. Planner
/// infeasibility lands in-row as NaN rates and the sweep continues. With
/// `timing` false (the default) runtime_s is written as 0 so that repeated
/// runs are byte-identical; pass true to record wall-clock seconds.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int jobs = 1,
                                       bool timing = false) {
    cfg.validate();
    const std::vector<SweepTuple> tuples = enumerate_tuples(cfg);
    std::vector<std::vector<SweepRow>> per_tuple(tuples.size());

    auto run_tuple = [&](std::size_t idx) {
        const SweepTuple& t = tuples[idx];
        ConstraintSet constraints = ConstraintSet::from_scenario(cfg.scenario);
        constraints.p_max_dbm = t.p_max_dbm;
        constraints.energy_j = t.energy_j;
        constraints.interference_limit_dbm = t.interference_dbm;

        auto timed = [&](const std::string& algorithm, auto&& fn) {
            SweepRow row{algorithm, t.p_max_dbm, t.energy_j, t.interference_dbm,
                         std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN(), 0.0};
            const auto start = std::chrono::steady_clock::now();
            try {
                fn(row);
            } catch (const InfeasibleError&) {
                // recorded as NaN
            }
            if (timing) {
                row.runtime_s =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
            }
            return row;
        };

        per_tuple[idx].push_back(timed("joint", [&](SweepRow& row) {
            const TrajectoryPlan plan = plan_trajectory(cfg.scenario, constraints);
            row.min_rate_bpshz = plan.min_rate;
            row.energy_used_j = plan.energy_used_j;
        }));
        per_tuple[idx].push_back(timed("terrestrial", [&](SweepRow& row) {
            const TrajectoryPlan plan = baseline_terrestrial(cfg.scenario, constraints);
            row.min_rate_bpshz = plan.min_rate;
            row.energy_used_j = plan.energy_used_j;
        }));
        per_tuple[idx].push_back(timed("shore", [&](SweepRow& row) {
            row.min_rate_bpshz = baseline_shore(cfg.scenario);
            row.energy_used_j = 0.0;
        }));
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < tuples.size(); ++i) run_tuple(i);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex mtx;
        const int workers = std::min<std::size_t>(jobs, tuples.size());
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t idx;
                    {
                        std::lock_guard<std::mutex> lock(mtx);
                        if (next >= tuples.size()) return;
                        idx = next++;
                    }
                    run_tuple(idx);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    std::vector<SweepRow> rows;
    rows.reserve(tuples.size() * 3);
    for (const auto& group : per_tuple) rows.insert(rows.end(), group.begin(), group.end());
    return rows;
}

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
    os << kSweepCsvHeader << "\n";
    for (const SweepRow& r : rows)
        os << r.algorithm << "," << csv::format_double(r.p_max_dbm) << ","
           << csv::format_double(r.energy_j) << "," << csv::format_double(r.interference_dbm)
           << "," << csv::format_double(r.min_rate_bpshz) << ","
           << csv::format_double(r.energy_used_j) << "," << csv::format_double(r.runtime_s)
           << "\n";
}

inline std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("sweep CSV: missing header");
    csv::expect_header(line, kSweepCsvHeader, "sweep CSV");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        line = csv::strip_cr(line);
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 7) throw ConfigError("sweep CSV: malformed row '" + line + "'");
        SweepRow row;
        row.algorithm = f[0];
        const auto p = csv::parse_double(f[1]);
        const auto e = csv::parse_double(f[2]);
        const auto i = csv::parse_double(f[3]);
        const auto r = csv::parse_double(f[4]);
        const auto u = csv::parse_double(f[5]);
        const auto t = csv::parse_double(f[6]);
        if (!p || !e || !i || !r || !u || !t)
            throw ConfigError("sweep CSV: malformed row '" + line + "'");
        row.p_max_dbm = *p;
        row.energy_j = *e;
        row.interference_dbm = *i;
        row.min_rate_bpshz = *r;
        row.energy_used_j = *u;
        row.runtime_s = *t;
        rows.push_back(std::move(row));
    }
    return rows;
}

/// gnuplot companion reproducing the min-rate-vs-P_max axes from the results
/// CSV, one curve per (algorithm, E, I) combination.
inline void write_gnuplot_companion(std::ostream& os, const ExperimentConfig& cfg,
                                    const std::string& csv_name) {
    os << "# gnuplot script for the sweep results\n";
    os << "set datafile separator ','\n";
    os << "set xlabel 'P_max (dBm)'\n";
    os << "set ylabel 'min ergodic rate (bps/Hz)'\n";
    os << "set key outside\n";
    os << "set grid\n";
    os << "plot \\\n";
    bool first = true;
    for (const char* alg : {"joint", "terrestrial", "shore"}) {
        for (double e : cfg.sweep.energy_j) {
            for (double i : cfg.sweep.interference_dbm) {
                if (!first) os << ", \\\n";
                first = false;
                os << "  '" << csv_name << "' using ($2):(strcol(1) eq '" << alg
                   << "' && $3 == " << csv::format_double(e)
                   << " && $4 == " << csv::format_double(i)
                   << " ? $5 : NaN) with linespoints title '" << alg
                   << " E=" << csv::format_double(e) << "J I=" << csv::format_double(i)
                   << "dBm'";
            }
        }
    }
    os << "\n";
}

} // namespace pelagic
