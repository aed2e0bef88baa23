#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pelagic/ais.hpp"
#include "pelagic/errors.hpp"
#include "pelagic/log.hpp"
#include "pelagic/planner.hpp"
#include "pelagic/platform.hpp"
#include "pelagic/radio_map.hpp"
#include "pelagic/sweep.hpp"

// Command-line surface. Exit codes: 0 success, 1 planner infeasibility,
// 2 config/format errors (including CLI misuse).

namespace pelagic::cli {

namespace detail {

inline ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return ExperimentConfig{}; // flagship defaults
    return experiment_from_file(path);
}

inline std::filesystem::path ensure_out_dir(const std::string& flag_value,
                                            const ExperimentConfig& cfg) {
    const std::filesystem::path dir = flag_value.empty() ? cfg.output_dir : flag_value;
    std::filesystem::create_directories(dir);
    return dir;
}

inline int run_plan(const std::string& config_path, const std::string& out_flag,
                    const std::string& init_name) {
    const ExperimentConfig cfg = load_config(config_path);
    TrajectoryInit init = TrajectoryInit::overhead_loiter;
    if (init_name == "chase")
        init = TrajectoryInit::straight_chase;
    else if (init_name != "loiter")
        throw ConfigError("--init must be 'loiter' or 'chase'");

    const ConstraintSet constraints = ConstraintSet::from_scenario(cfg.scenario);
    const TrajectoryPlan plan = plan_trajectory(cfg.scenario, constraints, init);

    const auto dir = ensure_out_dir(out_flag, cfg);
    const auto path = dir / "plan.csv";
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    write_plan_csv(os, plan, constraints.slot_s);
    std::cout << "min_rate_bpshz=" << csv::format_double(plan.min_rate)
              << " energy_used_j=" << csv::format_double(plan.energy_used_j) << " -> "
              << path.string() << "\n";
    return 0;
}

inline int run_sweep_cmd(const std::string& config_path, const std::string& out_flag, int jobs,
                         bool timing) {
    const ExperimentConfig cfg = load_config(config_path);
    const std::vector<SweepRow> rows = run_sweep(cfg, jobs, timing);

    const auto dir = ensure_out_dir(out_flag, cfg);
    const auto csv_path = dir / "results.csv";
    {
        std::ofstream os(csv_path);
        if (!os) throw ConfigError("cannot write '" + csv_path.string() + "'");
        write_sweep_csv(os, rows);
    }
    {
        std::ofstream os(dir / "results.gp");
        write_gnuplot_companion(os, cfg, "results.csv");
    }
    std::cout << rows.size() << " rows -> " << csv_path.string() << "\n";
    return 0;
}

inline int run_heatmap(const std::string& ais_path, bool synthetic, std::uint64_t seed,
                       const std::string& coastline_path, HeatmapSpec spec,
                       const std::string& out_flag) {
    std::vector<AisTrack> tracks;
    if (synthetic) {
        SyntheticTrafficSpec traffic;
        traffic.seed = seed;
        const std::vector<AisRecord> records = synthesize_ais_traffic(traffic);
        std::stringstream buf;
        buf << kAisCsvHeader << "\n";
        for (const AisRecord& r : records)
            buf << r.vessel_id << "," << csv::format_double(r.timestamp) << ","
                << csv::format_double(r.lat_deg) << "," << csv::format_double(r.lon_deg) << ","
                << csv::format_double(r.speed_kn) << "," << csv::format_double(r.heading_deg)
                << "\n";
        tracks = ais_ingest(buf).tracks;
    } else {
        if (ais_path.empty()) throw ConfigError("heatmap needs --ais FILE or --synthetic");
        std::ifstream in(ais_path);
        if (!in) throw ConfigError("cannot open '" + ais_path + "'");
        const AisIngestResult result = ais_ingest(in);
        if (result.skipped_rows > 0)
            log::info("skipped %zu malformed AIS rows", result.skipped_rows);
        tracks = result.tracks;
    }

    Coastline coast = default_coastline();
    if (!coastline_path.empty()) {
        std::ifstream in(coastline_path);
        if (!in) throw ConfigError("cannot open '" + coastline_path + "'");
        std::string line;
        std::getline(in, line);
        csv::expect_header(line, "lat,lon", "coastline CSV");
        coast.points.clear();
        while (std::getline(in, line)) {
            line = csv::strip_cr(line);
            if (line.empty()) continue;
            const auto f = csv::split(line);
            const auto lat = f.size() == 2 ? csv::parse_double(f[0]) : std::nullopt;
            const auto lon = f.size() == 2 ? csv::parse_double(f[1]) : std::nullopt;
            if (!lat || !lon) throw ConfigError("coastline CSV: malformed row '" + line + "'");
            coast.points.push_back({*lat, *lon});
        }
        if (coast.points.empty()) throw ConfigError("coastline CSV: no points");
    }

    const DensityHeatmap map = density_heatmap(tracks, spec, coast);
    ExperimentConfig defaults;
    const auto dir = ensure_out_dir(out_flag, defaults);
    const auto path = dir / "heatmap.csv";
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    map.write_csv(os);
    std::cout << map.total() << " vessel-cell-window counts ("
              << map.dropped_records() << " records outside grid) -> " << path.string() << "\n";
    return 0;
}

inline int run_endurance(double round_trip_km, const std::string& models_path) {
    std::vector<UAVSpec> specs;
    if (models_path.empty()) {
        specs = builtin_uav_models();
    } else {
        std::ifstream in(models_path);
        if (!in) throw ConfigError("cannot open '" + models_path + "'");
        specs = load_uav_models(in);
    }
    std::printf("%-12s %-12s  %9s %8s %9s  %s\n", "company", "model", "speed_kmh", "hours",
                "range_km", "verdict");
    for (const UAVSpec& spec : specs) {
        const EnduranceResult r = endurance_feasible(spec, round_trip_km);
        if (!r.has_speed) {
            std::printf("%-12s %-12s  %9s %8.1f %9s  %s\n", spec.company.c_str(),
                        spec.model.c_str(), "-", spec.max_flight_h.hi, "-", "unknown");
        } else {
            std::printf("%-12s %-12s  %9.1f %8.1f %9.1f  %s\n", spec.company.c_str(),
                        spec.model.c_str(), r.speed_kmh, r.flight_h, r.range_km,
                        r.feasible ? "feasible" : "infeasible");
        }
    }
    return 0;
}

inline int run_radiomap(const std::string& samples_path, const std::string& map_prefix,
                        const std::string& query, double origin_x, double origin_y,
                        double cell_m, std::size_t nx, std::size_t ny,
                        const std::string& out_prefix) {
    if (!query.empty()) {
        if (map_prefix.empty()) throw ConfigError("--query needs --map PREFIX");
        const RadioMap map = RadioMap::load(map_prefix);
        const auto f = csv::split(query);
        const auto x = f.size() == 2 ? csv::parse_double(f[0]) : std::nullopt;
        const auto y = f.size() == 2 ? csv::parse_double(f[1]) : std::nullopt;
        if (!x || !y) throw ConfigError("--query expects 'X,Y' in meters");
        std::cout << csv::format_double(map.lookup(*x, *y)) << "\n";
        return 0;
    }
    if (samples_path.empty()) throw ConfigError("radiomap needs --samples FILE or --query X,Y");
    std::ifstream in(samples_path);
    if (!in) throw ConfigError("cannot open '" + samples_path + "'");
    std::string line;
    std::getline(in, line);
    csv::expect_header(line, "x_m,y_m,excess_db", "radio map samples");
    std::vector<RadioMapSample> samples;
    while (std::getline(in, line)) {
        line = csv::strip_cr(line);
        if (line.empty()) continue;
        const auto f = csv::split(line);
        const auto x = f.size() == 3 ? csv::parse_double(f[0]) : std::nullopt;
        const auto y = f.size() == 3 ? csv::parse_double(f[1]) : std::nullopt;
        const auto e = f.size() == 3 ? csv::parse_double(f[2]) : std::nullopt;
        if (!x || !y || !e) throw ConfigError("radio map samples: malformed row '" + line + "'");
        samples.push_back({*x, *y, *e});
    }
    std::size_t rejected = 0;
    const RadioMap map = RadioMap::build(samples, origin_x, origin_y, cell_m, nx, ny, &rejected);
    const std::string prefix = out_prefix.empty() ? "radiomap" : out_prefix;
    map.save(prefix);
    std::cout << samples.size() - rejected << " samples gridded (" << rejected
              << " outside extent) -> " << prefix << ".csv\n";
    return 0;
}

} // namespace detail

/// Full argv dispatch; returns the process exit code.
inline int cli_dispatch(int argc, const char* const* argv) {
    CLI::App app{"pelagic: maritime UAV coverage planning toolkit"};
    app.require_subcommand(1);

    // plan
    auto* plan = app.add_subcommand("plan", "optimize one UAV service plan and export CSV");
    std::string plan_config, plan_out, plan_init = "loiter";
    std::uint64_t plan_seed = 1;
    plan->add_option("--config", plan_config, "experiment config file (TOML)");
    plan->add_option("--out", plan_out, "output directory");
    plan->add_option("--seed", plan_seed, "rng seed (planning itself is deterministic)");
    plan->add_option("--init", plan_init, "initial trajectory: loiter|chase");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run the (P_max, E, I) parameter sweep");
    std::string sweep_config, sweep_out;
    std::uint64_t sweep_seed = 1;
    int sweep_jobs = 1;
    bool sweep_timing = false;
    sweep->add_option("--config", sweep_config, "experiment config file (TOML)");
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_option("--seed", sweep_seed, "rng seed recorded with the run");
    sweep->add_option("--jobs", sweep_jobs, "parallel tuples (output independent of this)");
    sweep->add_flag("--timing", sweep_timing,
                    "record wall-clock runtime_s (off by default for reproducible bytes)");

    // heatmap
    auto* heatmap = app.add_subcommand("heatmap", "vessel-density heatmap from AIS traces");
    std::string hm_ais, hm_coast, hm_out;
    bool hm_synthetic = false;
    std::uint64_t hm_seed = 1;
    HeatmapSpec hm_spec;
    heatmap->add_option("--ais", hm_ais, "AIS CSV input");
    heatmap->add_flag("--synthetic", hm_synthetic, "use the synthetic lane-traffic generator");
    heatmap->add_option("--seed", hm_seed, "seed for --synthetic");
    heatmap->add_option("--coastline", hm_coast, "coastline polyline CSV (lat,lon)");
    heatmap->add_option("--lat-min", hm_spec.lat_min_deg, "grid south edge (deg)");
    heatmap->add_option("--lat-max", hm_spec.lat_max_deg, "grid north edge (deg)");
    heatmap->add_option("--lat-bin", hm_spec.lat_bin_deg, "latitude bin (deg)");
    heatmap->add_option("--offshore-max-km", hm_spec.offshore_max_km, "offshore extent (km)");
    heatmap->add_option("--offshore-bin-km", hm_spec.offshore_bin_km, "offshore bin (km)");
    heatmap->add_option("--window-s", hm_spec.window_s, "time window (s)");
    heatmap->add_option("--out", hm_out, "output directory");

    // endurance
    auto* endurance = app.add_subcommand("endurance", "round-trip feasibility of UAV platforms");
    double ed_round_trip = 740.0;
    std::string ed_models;
    endurance->add_option("--round-trip-km", ed_round_trip, "round trip to screen (km)");
    endurance->add_option("--models", ed_models, "UAV catalog CSV (default: built-in)");

    // radiomap
    auto* radiomap = app.add_subcommand("radiomap", "build or query a radio map");
    std::string rm_samples, rm_map, rm_query, rm_out;
    double rm_origin_x = 0.0, rm_origin_y = 0.0, rm_cell = 1000.0;
    std::size_t rm_nx = 32, rm_ny = 32;
    radiomap->add_option("--samples", rm_samples, "measurement CSV (x_m,y_m,excess_db)");
    radiomap->add_option("--origin-x", rm_origin_x, "grid origin x (m)");
    radiomap->add_option("--origin-y", rm_origin_y, "grid origin y (m)");
    radiomap->add_option("--cell-m", rm_cell, "cell size (m)");
    radiomap->add_option("--nx", rm_nx, "cells in x");
    radiomap->add_option("--ny", rm_ny, "cells in y");
    radiomap->add_option("--map", rm_map, "map prefix for --query");
    radiomap->add_option("--query", rm_query, "lookup 'X,Y' (m) instead of building");
    radiomap->add_option("--out", rm_out, "output prefix (default: radiomap)");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (plan->parsed()) return detail::run_plan(plan_config, plan_out, plan_init);
        if (sweep->parsed())
            return detail::run_sweep_cmd(sweep_config, sweep_out, sweep_jobs, sweep_timing);
        if (heatmap->parsed())
            return detail::run_heatmap(hm_ais, hm_synthetic, hm_seed, hm_coast, hm_spec, hm_out);
        if (endurance->parsed()) return detail::run_endurance(ed_round_trip, ed_models);
        if (radiomap->parsed())
            return detail::run_radiomap(rm_samples, rm_map, rm_query, rm_origin_x, rm_origin_y,
                                        rm_cell, rm_nx, rm_ny, rm_out);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace pelagic::cli
