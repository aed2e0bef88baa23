#pragma once

#include <cmath>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pelagic/channel.hpp"
#include "pelagic/csv.hpp"
#include "pelagic/errors.hpp"
#include "pelagic/geometry.hpp"
#include "pelagic/scenario.hpp"

// Commercial UAV capability data, endurance/range screening for offshore
// round trips, kinematic feasibility of slot-discretized trajectories and
// communication-energy accounting.

namespace pelagic {

/// Closed numeric range; catalog cells like "4-8" parse into one of these,
/// single values collapse to lo == hi.
struct ClosedRange {
    double lo = 0.0;
    double hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
};

/// One catalog row of a commercial UAV platform. Missing catalog entries
/// ("/" cells) stay nullopt.
struct UAVSpec {
    std::string company;
    std::string model;
    std::string type;
    std::optional<ClosedRange> wind_resist_ms;
    std::optional<ClosedRange> cruise_kmh;
    std::optional<ClosedRange> max_kmh;
    ClosedRange max_flight_h{0.0, 0.0};
    enum class Drive { electric, oil, hybrid } drive = Drive::electric;
};

struct EnduranceResult {
    bool has_speed = false; // false -> indeterminate, never feasible
    bool feasible = false;
    double speed_kmh = 0.0;
    double flight_h = 0.0;
    double range_km = 0.0;
};

/// Screens a platform against a round trip. Speed is the cruise figure when
/// published (midpoint of a catalog range), otherwise the maximum speed;
/// flight time takes the upper endpoint of the catalog's maximum-duration
/// range, since that column already states a maximum. No speed figure at all
/// makes the result indeterminate.
inline EnduranceResult endurance_feasible(const UAVSpec& spec, double round_trip_km) {
    if (round_trip_km < 0.0) throw std::invalid_argument("round trip must be >= 0");
    EnduranceResult r;
    if (spec.cruise_kmh) {
        r.speed_kmh = spec.cruise_kmh->mid();
    } else if (spec.max_kmh) {
        r.speed_kmh = spec.max_kmh->mid();
    } else {
        return r;
    }
    r.has_speed = true;
    r.flight_h = spec.max_flight_h.hi;
    r.range_km = r.speed_kmh * r.flight_h;
    r.feasible = r.range_km >= round_trip_km;
    return r;
}

inline constexpr const char* kUavModelsCsvHeader =
    "company,model,type,wind_resist_ms,cruise_kmh,max_kmh,max_flight_h,drive";

// Catalog of typical UAV products (the data file data/uav_models.csv ships
// the same table).
inline constexpr const char* kBuiltinUavModelsCsv =
    "company,model,type,wind_resist_ms,cruise_kmh,max_kmh,max_flight_h,drive\n"
    "DJI,Inspire 2,gyroplane,10,/,94,0.5,electric\n"
    "CEEWA,X-9,gyroplane,12,/,72,1,electric\n"
    "Rising fly,MixOne,gyroplane,/,/,/,5,hybrid\n"
    "JOUAV,CW10,vtol_fixed_wing,10.8-13.8,72,/,1.5,electric\n"
    "ZEROTECH,ZT-30V,vtol_fixed_wing,10.8-13.8,90,130,7,hybrid\n"
    "JOUAV,CW100,vtol_fixed_wing,13.9-17.1,100,/,4-8,oil\n"
    "Ziyan UAV,Blowfish A2,helicopter,17,70-90,130,1,electric\n"
    "AEE,AU300,helicopter,/,130,/,4,oil\n";

namespace detail {

inline std::optional<ClosedRange> parse_range_cell(const std::string& cell) {
    if (cell.empty() || cell == "/") return std::nullopt;
    const std::size_t dash = cell.find('-', 1); // skip a leading minus sign
    if (dash == std::string::npos) {
        const auto v = csv::parse_double(cell);
        if (!v) throw ConfigError("UAV catalog: bad numeric cell '" + cell + "'");
        return ClosedRange{*v, *v};
    }
    const auto lo = csv::parse_double(cell.substr(0, dash));
    const auto hi = csv::parse_double(cell.substr(dash + 1));
    if (!lo || !hi || *lo > *hi) throw ConfigError("UAV catalog: bad range cell '" + cell + "'");
    return ClosedRange{*lo, *hi};
}

inline UAVSpec::Drive parse_drive(const std::string& cell) {
    if (cell == "electric") return UAVSpec::Drive::electric;
    if (cell == "oil") return UAVSpec::Drive::oil;
    if (cell == "hybrid" || cell == "oil-electric hybrid") return UAVSpec::Drive::hybrid;
    throw ConfigError("UAV catalog: unknown drive '" + cell + "'");
}

} // namespace detail

inline std::vector<UAVSpec> load_uav_models(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("UAV catalog: missing header");
    csv::expect_header(line, kUavModelsCsvHeader, "UAV catalog");
    std::vector<UAVSpec> specs;
    while (std::getline(in, line)) {
        line = csv::strip_cr(line);
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 8) throw ConfigError("UAV catalog: malformed row '" + line + "'");
        UAVSpec spec;
        spec.company = f[0];
        spec.model = f[1];
        spec.type = f[2];
        spec.wind_resist_ms = detail::parse_range_cell(f[3]);
        spec.cruise_kmh = detail::parse_range_cell(f[4]);
        spec.max_kmh = detail::parse_range_cell(f[5]);
        const auto dur = detail::parse_range_cell(f[6]);
        if (!dur || !(dur->hi > 0.0))
            throw ConfigError("UAV catalog: flight duration required for '" + spec.model + "'");
        spec.max_flight_h = *dur;
        if (spec.cruise_kmh && spec.max_kmh && spec.cruise_kmh->mid() > spec.max_kmh->mid())
            throw ConfigError("UAV catalog: cruise exceeds max speed for '" + spec.model + "'");
        spec.drive = detail::parse_drive(f[7]);
        specs.push_back(std::move(spec));
    }
    return specs;
}

inline std::vector<UAVSpec> builtin_uav_models() {
    std::istringstream in(kBuiltinUavModelsCsv);
    return load_uav_models(in);
}

/// Communication (transmit) energy bookkeeping; propulsion endurance is
/// screened separately by endurance_feasible.
struct EnergyBudget {
    double total_j = 0.0;
    double used_j = 0.0;
    double residual_j() const { return total_j - used_j; }
    bool valid() const { return used_j >= 0.0 && used_j <= total_j; }
};

/// Transmit energy of a per-slot power profile: sum of 10^((p-30)/10) watts
/// over slot_s seconds. -inf dBm ("off") contributes zero.
inline double energy_used_j(std::span<const double> powers_dbm, double slot_s) {
    if (!(slot_s > 0.0)) throw std::invalid_argument("energy_used: slot_s must be > 0");
    double joules = 0.0;
    for (double p : powers_dbm) joules += dbm_to_watt(p) * slot_s;
    return joules;
}

struct KinematicsReport {
    enum class Violation { none, speed_low, speed_high, acceleration, altitude };
    bool ok = true;
    Violation violation = Violation::none;
    std::size_t slot = 0;   // slot (or waypoint, for altitude) index
    double value = 0.0;     // offending magnitude
    std::string message;
};

/// Finite-difference feasibility of a slot-discretized path: per-slot speed in
/// [v_min, v_max], per-slot acceleration magnitude <= a_max, every waypoint
/// altitude inside [alt_min, alt_max]. Reports the first violation in slot
/// order. Violations are results, not errors.
inline KinematicsReport kinematics_check(std::span<const Vec3> waypoints, double slot_s,
                                         const UAVLimits& limits) {
    if (waypoints.size() < 2) throw std::invalid_argument("kinematics_check: need >= 2 waypoints");
    if (!(slot_s > 0.0)) throw std::invalid_argument("kinematics_check: slot_s must be > 0");

    // Float-noise guard on boundary comparisons; plans sitting exactly on a
    // limit must pass.
    const double eps = 1e-9;
    KinematicsReport report;
    auto fail = [&](KinematicsReport::Violation kind, std::size_t slot, double value,
                    std::string message) {
        report.ok = false;
        report.violation = kind;
        report.slot = slot;
        report.value = value;
        report.message = std::move(message);
    };

    auto check_altitude = [&](std::size_t idx) {
        const double alt = waypoints[idx].z;
        if (alt < limits.alt_min_m - eps || alt > limits.alt_max_m + eps) {
            fail(KinematicsReport::Violation::altitude, idx, alt,
                 "altitude " + std::to_string(alt) + " m outside [" +
                     std::to_string(limits.alt_min_m) + ", " + std::to_string(limits.alt_max_m) +
                     "] at waypoint " + std::to_string(idx));
            return false;
        }
        return true;
    };

    if (!check_altitude(0)) return report;
    Vec3 prev_velocity;
    for (std::size_t n = 0; n + 1 < waypoints.size(); ++n) {
        const Vec3 velocity = (waypoints[n + 1] - waypoints[n]) / slot_s;
        const double speed = velocity.norm();
        if (speed < limits.v_min_ms - eps) {
            fail(KinematicsReport::Violation::speed_low, n, speed,
                 "speed " + std::to_string(speed) + " m/s below v_min at slot " +
                     std::to_string(n));
            return report;
        }
        if (speed > limits.v_max_ms + eps) {
            fail(KinematicsReport::Violation::speed_high, n, speed,
                 "speed " + std::to_string(speed) + " m/s above v_max at slot " +
                     std::to_string(n));
            return report;
        }
        if (n > 0) {
            const double accel = (velocity - prev_velocity).norm() / slot_s;
            if (accel > limits.a_max_ms2 + eps) {
                fail(KinematicsReport::Violation::acceleration, n, accel,
                     "acceleration " + std::to_string(accel) + " m/s^2 above a_max at slot " +
                         std::to_string(n));
                return report;
            }
        }
        prev_velocity = velocity;
        if (!check_altitude(n + 1)) return report;
    }
    return report;
}

} // namespace pelagic
