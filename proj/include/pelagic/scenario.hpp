#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pelagic/channel.hpp"
#include "pelagic/config.hpp"
#include "pelagic/errors.hpp"
#include "pelagic/geometry.hpp"
#include "pelagic/radio_map.hpp"

// World model for planning: entity geometry, the lane-bound vessel track, UAV
// kinematic limits and the per-link-class channel parameters. Positions are in
// the local Cartesian frame (meters).

namespace pelagic {

struct TimedPoint {
    double t_s = 0.0;
    Vec3 position;
};

/// Lane-bound vessel motion: piecewise-linear waypoints with strictly
/// increasing times and constant altitude.
struct VesselTrack {
    std::vector<TimedPoint> waypoints;
    double speed_ms = 10.0;

    double start_time() const { return waypoints.front().t_s; }
    double end_time() const { return waypoints.back().t_s; }
    double span_s() const { return end_time() - start_time(); }

    void validate() const {
        if (waypoints.size() < 2) throw std::invalid_argument("vessel track needs >= 2 waypoints");
        for (std::size_t i = 1; i < waypoints.size(); ++i) {
            if (!(waypoints[i].t_s > waypoints[i - 1].t_s))
                throw std::invalid_argument("vessel track times must be strictly increasing");
            if (waypoints[i].position.z != waypoints[0].position.z)
                throw std::invalid_argument("vessel track altitude must be constant");
        }
    }
};

/// Piecewise-linear interpolation along the track. Times outside the span are
/// an error rather than an extrapolation.
inline Vec3 vessel_position(const VesselTrack& track, double t_s) {
    track.validate();
    if (t_s < track.start_time() || t_s > track.end_time())
        throw std::out_of_range("vessel_position: time outside track span");
    for (std::size_t i = 1; i < track.waypoints.size(); ++i) {
        const TimedPoint& a = track.waypoints[i - 1];
        const TimedPoint& b = track.waypoints[i];
        if (t_s <= b.t_s) {
            const double f = (t_s - a.t_s) / (b.t_s - a.t_s);
            return a.position + (b.position - a.position) * f;
        }
    }
    return track.waypoints.back().position;
}

/// Fixed-wing flight envelope.
struct UAVLimits {
    double v_min_ms = 20.0;
    double v_max_ms = 36.0;
    double a_max_ms2 = 5.0;
    double alt_min_m = 2600.0;
    double alt_max_m = 5000.0;

    void validate() const {
        if (!(v_min_ms > 0.0) || !(v_min_ms <= v_max_ms))
            throw std::invalid_argument("UAV limits require 0 < v_min <= v_max");
        if (!(a_max_ms2 >= 0.0)) throw std::invalid_argument("a_max must be >= 0");
        if (!(alt_min_m <= alt_max_m)) throw std::invalid_argument("alt_min must be <= alt_max");
    }
};

/// Full planning world. Defaults reproduce the flagship maritime case study:
/// a vessel sailing (5.0e4, 0, 10) -> (6.8e4, 0, 10) m at 10 m/s, a shore TBS
/// at 100 m altitude, a protected satellite user mid-lane 5 km abeam, and the
/// four link classes (access, backhaul, direct, interference).
struct Scenario {
    Vec3 tbs_position{0.0, 0.0, 100.0};
    Vec3 sat_user_position{59000.0, 5000.0, 10.0};
    VesselTrack vessel_track{{{0.0, {50000.0, 0.0, 10.0}}, {1800.0, {68000.0, 0.0, 10.0}}}, 10.0};
    UAVLimits uav_limits;
    double p_max_dbm = 40.0;
    double tbs_power_dbm = 40.0;
    double energy_j = 3.0e4;
    double interference_limit_dbm = -40.0;
    double slot_s = 10.0;

    // UAV -> vessel. No horizon penalty at planning altitudes.
    ChannelParams access_link{116.7, 2600.0, 15.0, 10.0, 8.0, 8.0, 10e6, 5.0, 0.0};
    // TBS -> UAV feeder.
    ChannelParams backhaul_link{116.7, 2600.0, 15.0, 10.0, 12.0, 8.0, 10e6, 5.0, 2.0};
    // TBS -> vessel, the shore-service baseline; beyond-horizon penalty on.
    ChannelParams direct_link{116.7, 2600.0, 15.0, 10.0, 12.0, 8.0, 10e6, 5.0, 2.0};
    // UAV -> satellite user's vessel (30 dBi dish), spectrum-sharing victim.
    ChannelParams interference_link{116.7, 2600.0, 15.0, 10.0, 8.0, 30.0, 10e6, 5.0, 0.0};

    RadioMap radio_map; // empty -> zero excess everywhere

    std::size_t slot_count() const {
        return static_cast<std::size_t>(std::llround(vessel_track.span_s() / slot_s));
    }

    void validate() const {
        vessel_track.validate();
        uav_limits.validate();
        if (!(slot_s > 0.0)) throw std::invalid_argument("slot_s must be > 0");
        if (!(energy_j > 0.0)) throw std::invalid_argument("energy_j must be > 0");
        const double slots = vessel_track.span_s() / slot_s;
        if (std::abs(slots - std::llround(slots)) > 1e-9)
            throw std::invalid_argument("service duration must divide into whole slots");
        access_link.validate();
        backhaul_link.validate();
        direct_link.validate();
        interference_link.validate();
    }

    static Scenario flagship() { return Scenario{}; }
};

namespace detail {

inline void read_link(const config::Table& tbl, const std::string& section, ChannelParams& p) {
    p.ref_loss_db = tbl.get_double(section + ".ref_loss_db", p.ref_loss_db);
    p.ref_distance_m = tbl.get_double(section + ".ref_distance_m", p.ref_distance_m);
    p.pl_exponent_coeff = tbl.get_double(section + ".pl_exponent_coeff", p.pl_exponent_coeff);
    p.rician_k = tbl.get_double(section + ".rician_k", p.rician_k);
    p.tx_gain_dbi = tbl.get_double(section + ".tx_gain_dbi", p.tx_gain_dbi);
    p.rx_gain_dbi = tbl.get_double(section + ".rx_gain_dbi", p.rx_gain_dbi);
    p.bandwidth_hz = tbl.get_double(section + ".bandwidth_hz", p.bandwidth_hz);
    p.noise_figure_db = tbl.get_double(section + ".noise_figure_db", p.noise_figure_db);
    p.horizon_excess_db_per_km =
        tbl.get_double(section + ".horizon_excess_db_per_km", p.horizon_excess_db_per_km);
}

inline std::set<std::string> link_keys(const std::string& section) {
    return {section + ".ref_loss_db",      section + ".ref_distance_m",
            section + ".pl_exponent_coeff", section + ".rician_k",
            section + ".tx_gain_dbi",       section + ".rx_gain_dbi",
            section + ".bandwidth_hz",      section + ".noise_figure_db",
            section + ".horizon_excess_db_per_km"};
}

inline std::set<std::string> scenario_keys() {
    std::set<std::string> keys = {
        "scenario.tbs_position_m",     "scenario.sat_user_position_m",
        "scenario.p_max_dbm",          "scenario.tbs_power_dbm",
        "scenario.energy_j",           "scenario.interference_limit_dbm",
        "scenario.slot_s",             "scenario.radio_map_prefix",
        "scenario.vessel.start_m",     "scenario.vessel.end_m",
        "scenario.vessel.speed_ms",
        "scenario.uav.v_min_ms",       "scenario.uav.v_max_ms",
        "scenario.uav.a_max_ms2",      "scenario.uav.alt_min_m",
        "scenario.uav.alt_max_m"};
    for (const char* link : {"scenario.link.access", "scenario.link.backhaul",
                             "scenario.link.direct", "scenario.link.interference"}) {
        auto lk = link_keys(link);
        keys.insert(lk.begin(), lk.end());
    }
    return keys;
}

} // namespace detail

/// Builds a Scenario from the `[scenario]` subtree of a parsed config; any key
/// not in the schema is rejected. Absent keys keep flagship defaults.
inline Scenario scenario_from_config(const config::Table& tbl) {
    tbl.reject_unknown("scenario.", detail::scenario_keys());
    Scenario sc;
    if (auto v = tbl.get_vec3("scenario.tbs_position_m"))
        sc.tbs_position = {(*v)[0], (*v)[1], (*v)[2]};
    if (auto v = tbl.get_vec3("scenario.sat_user_position_m"))
        sc.sat_user_position = {(*v)[0], (*v)[1], (*v)[2]};
    sc.p_max_dbm = tbl.get_double("scenario.p_max_dbm", sc.p_max_dbm);
    sc.tbs_power_dbm = tbl.get_double("scenario.tbs_power_dbm", sc.tbs_power_dbm);
    sc.energy_j = tbl.get_double("scenario.energy_j", sc.energy_j);
    sc.interference_limit_dbm =
        tbl.get_double("scenario.interference_limit_dbm", sc.interference_limit_dbm);
    sc.slot_s = tbl.get_double("scenario.slot_s", sc.slot_s);

    Vec3 start = sc.vessel_track.waypoints.front().position;
    Vec3 end = sc.vessel_track.waypoints.back().position;
    if (auto v = tbl.get_vec3("scenario.vessel.start_m")) start = {(*v)[0], (*v)[1], (*v)[2]};
    if (auto v = tbl.get_vec3("scenario.vessel.end_m")) end = {(*v)[0], (*v)[1], (*v)[2]};
    const double speed = tbl.get_double("scenario.vessel.speed_ms", sc.vessel_track.speed_ms);
    if (!(speed > 0.0)) throw ConfigError("scenario.vessel.speed_ms must be > 0");
    const double span = distance(start, end) / speed;
    sc.vessel_track = VesselTrack{{{0.0, start}, {span, end}}, speed};

    sc.uav_limits.v_min_ms = tbl.get_double("scenario.uav.v_min_ms", sc.uav_limits.v_min_ms);
    sc.uav_limits.v_max_ms = tbl.get_double("scenario.uav.v_max_ms", sc.uav_limits.v_max_ms);
    sc.uav_limits.a_max_ms2 = tbl.get_double("scenario.uav.a_max_ms2", sc.uav_limits.a_max_ms2);
    sc.uav_limits.alt_min_m = tbl.get_double("scenario.uav.alt_min_m", sc.uav_limits.alt_min_m);
    sc.uav_limits.alt_max_m = tbl.get_double("scenario.uav.alt_max_m", sc.uav_limits.alt_max_m);

    detail::read_link(tbl, "scenario.link.access", sc.access_link);
    detail::read_link(tbl, "scenario.link.backhaul", sc.backhaul_link);
    detail::read_link(tbl, "scenario.link.direct", sc.direct_link);
    detail::read_link(tbl, "scenario.link.interference", sc.interference_link);

    const std::string map_prefix = tbl.get_string("scenario.radio_map_prefix", "");
    if (!map_prefix.empty()) sc.radio_map = RadioMap::load(map_prefix);

    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid scenario: ") + e.what());
    }
    return sc;
}

} // namespace pelagic
