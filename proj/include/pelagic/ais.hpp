#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pelagic/csv.hpp"
#include "pelagic/errors.hpp"
#include "pelagic/geometry.hpp"

// AIS-style trace ingestion and the sparsity analytics behind the sea-lane
// argument: vessels cluster on a few lanes and are otherwise rare, so
// coverage demand is predictable. Geographic math is spherical (R = 6371 km).

namespace pelagic {

struct AisRecord {
    std::string vessel_id;
    double timestamp = 0.0; // unix seconds
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double speed_kn = 0.0;
    double heading_deg = 0.0;
};

struct AisTrack {
    std::string vessel_id;
    std::vector<AisRecord> records; // time-ordered after ingest
};

struct AisIngestResult {
    std::vector<AisTrack> tracks; // sorted by vessel_id
    std::size_t skipped_rows = 0;
};

inline constexpr const char* kAisCsvHeader = "vessel_id,timestamp,lat,lon,speed_kn,heading_deg";

/// Groups records by vessel and time-orders them. Malformed rows (wrong field
/// count, non-numeric values, out-of-range coordinates) are skipped and
/// counted. A missing or wrong header is a format error; an empty body is an
/// empty result.
inline AisIngestResult ais_ingest(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("AIS stream: missing header");
    csv::expect_header(line, kAisCsvHeader, "AIS stream");

    AisIngestResult result;
    std::map<std::string, std::vector<AisRecord>> by_vessel;
    while (std::getline(in, line)) {
        line = csv::strip_cr(line);
        if (line.empty()) continue;
        const auto fields = csv::split(line);
        if (fields.size() != 6 || fields[0].empty()) {
            ++result.skipped_rows;
            continue;
        }
        const auto ts = csv::parse_double(fields[1]);
        const auto lat = csv::parse_double(fields[2]);
        const auto lon = csv::parse_double(fields[3]);
        const auto spd = csv::parse_double(fields[4]);
        const auto hdg = csv::parse_double(fields[5]);
        if (!ts || !lat || !lon || !spd || !hdg || *lat < -90.0 || *lat > 90.0 ||
            *lon < -180.0 || *lon > 180.0) {
            ++result.skipped_rows;
            continue;
        }
        by_vessel[fields[0]].push_back({fields[0], *ts, *lat, *lon, *spd, *hdg});
    }
    for (auto& [id, records] : by_vessel) {
        std::stable_sort(records.begin(), records.end(),
                         [](const AisRecord& a, const AisRecord& b) {
                             return a.timestamp < b.timestamp;
                         });
        result.tracks.push_back({id, std::move(records)});
    }
    return result;
}

inline void ais_write(std::ostream& os, std::span<const AisTrack> tracks) {
    os << kAisCsvHeader << "\n";
    for (const AisTrack& track : tracks)
        for (const AisRecord& r : track.records)
            os << r.vessel_id << "," << csv::format_double(r.timestamp) << ","
               << csv::format_double(r.lat_deg) << "," << csv::format_double(r.lon_deg) << ","
               << csv::format_double(r.speed_kn) << "," << csv::format_double(r.heading_deg)
               << "\n";
}

/// Reference coastline as a lat/lon polyline.
struct Coastline {
    std::vector<LatLon> points;
};

namespace detail {

struct Unit3 {
    double x, y, z;
};

inline Unit3 to_unit(const LatLon& p) {
    const double lat = p.lat_deg * kDegToRad, lon = p.lon_deg * kDegToRad;
    return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

inline Unit3 cross(const Unit3& a, const Unit3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double dot(const Unit3& a, const Unit3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline double norm(const Unit3& a) { return std::sqrt(dot(a, a)); }

inline double angle_between(const Unit3& a, const Unit3& b) {
    return std::atan2(norm(cross(a, b)), dot(a, b));
}

// Great-circle distance from point P to the arc AB, in radians.
inline double point_to_arc_rad(const Unit3& p, const Unit3& a, const Unit3& b) {
    const Unit3 n = cross(a, b);
    const double n_len = norm(n);
    const double endpoint = std::min(angle_between(p, a), angle_between(p, b));
    if (n_len < 1e-12) return endpoint; // degenerate segment
    // Project P onto the great circle through A,B and test whether the foot
    // lies on the arc.
    const Unit3 nn{n.x / n_len, n.y / n_len, n.z / n_len};
    const double off = dot(p, nn);
    Unit3 foot{p.x - off * nn.x, p.y - off * nn.y, p.z - off * nn.z};
    const double f_len = norm(foot);
    if (f_len < 1e-12) return endpoint; // P at the circle's pole
    foot = {foot.x / f_len, foot.y / f_len, foot.z / f_len};
    const bool inside = dot(cross(a, foot), nn) >= -1e-12 && dot(cross(foot, b), nn) >= -1e-12;
    return inside ? angle_between(p, foot) : endpoint;
}

} // namespace detail

/// Minimum great-circle distance from a point to the coastline polyline.
inline double offshore_distance_km(double lat_deg, double lon_deg, const Coastline& coast) {
    if (coast.points.empty()) throw std::invalid_argument("offshore_distance: empty coastline");
    const detail::Unit3 p = detail::to_unit({lat_deg, lon_deg});
    if (coast.points.size() == 1)
        return detail::angle_between(p, detail::to_unit(coast.points[0])) * kEarthRadiusKm;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < coast.points.size(); ++i) {
        const double d = detail::point_to_arc_rad(p, detail::to_unit(coast.points[i - 1]),
                                                  detail::to_unit(coast.points[i]));
        best = std::min(best, d);
    }
    return best * kEarthRadiusKm;
}

/// Gridding for the vessel-density analysis: latitude strips crossed with
/// offshore-distance bands, counted per time window.
struct HeatmapSpec {
    double lat_min_deg = 22.5;
    double lat_max_deg = 37.3;
    double lat_bin_deg = 0.1;
    double offshore_max_km = 30.0;
    double offshore_bin_km = 10.0;
    double window_s = 3600.0;

    void validate() const {
        if (!(lat_bin_deg > 0.0) || !(offshore_bin_km > 0.0) || !(window_s > 0.0))
            throw std::invalid_argument("heatmap bins and window must be positive");
        if (!(lat_max_deg > lat_min_deg) || !(offshore_max_km > 0.0))
            throw std::invalid_argument("heatmap extent must be positive");
    }
};

/// Distinct-vessel counts per (lat bin, offshore bin, window). A vessel counts
/// once per cell per window no matter how often it reports there.
class DensityHeatmap {
public:
    DensityHeatmap() = default;
    DensityHeatmap(std::size_t lat_bins, std::size_t offshore_bins, std::size_t windows,
                   double t0)
        : lat_bins_(lat_bins), offshore_bins_(offshore_bins), windows_(windows), t0_(t0),
          counts_(lat_bins * offshore_bins * windows, 0) {}

    std::size_t lat_bins() const { return lat_bins_; }
    std::size_t offshore_bins() const { return offshore_bins_; }
    std::size_t windows() const { return windows_; }
    double window_origin() const { return t0_; }
    std::size_t dropped_records() const { return dropped_; }

    int at(std::size_t i, std::size_t j, std::size_t w) const {
        return counts_[(w * offshore_bins_ + j) * lat_bins_ + i];
    }

    long long total() const {
        long long sum = 0;
        for (int c : counts_) sum += c;
        return sum;
    }

    friend DensityHeatmap density_heatmap(std::span<const AisTrack>, const HeatmapSpec&,
                                          const Coastline&);

    static constexpr const char* kCsvHeader = "lat_bin,offshore_bin,window_index,count";

    /// Non-zero cells, ordered by (lat_bin, offshore_bin, window).
    void write_csv(std::ostream& os) const {
        os << kCsvHeader << "\n";
        for (std::size_t i = 0; i < lat_bins_; ++i)
            for (std::size_t j = 0; j < offshore_bins_; ++j)
                for (std::size_t w = 0; w < windows_; ++w)
                    if (at(i, j, w) != 0)
                        os << i << "," << j << "," << w << "," << at(i, j, w) << "\n";
    }

private:
    std::size_t lat_bins_ = 0, offshore_bins_ = 0, windows_ = 0;
    double t0_ = 0.0;
    std::vector<int> counts_;
    std::size_t dropped_ = 0;
};

inline DensityHeatmap density_heatmap(std::span<const AisTrack> tracks, const HeatmapSpec& spec,
                                      const Coastline& coast) {
    spec.validate();
    double t_min = std::numeric_limits<double>::infinity();
    double t_max = -std::numeric_limits<double>::infinity();
    for (const AisTrack& track : tracks)
        for (const AisRecord& r : track.records) {
            t_min = std::min(t_min, r.timestamp);
            t_max = std::max(t_max, r.timestamp);
        }
    if (!(t_min <= t_max)) return DensityHeatmap(0, 0, 0, 0.0);

    const std::size_t lat_bins =
        static_cast<std::size_t>(std::ceil((spec.lat_max_deg - spec.lat_min_deg) / spec.lat_bin_deg));
    const std::size_t off_bins =
        static_cast<std::size_t>(std::ceil(spec.offshore_max_km / spec.offshore_bin_km));
    const std::size_t windows =
        static_cast<std::size_t>(std::floor((t_max - t_min) / spec.window_s)) + 1;

    DensityHeatmap map(lat_bins, off_bins, windows, t_min);
    for (const AisTrack& track : tracks) {
        std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
        for (const AisRecord& r : track.records) {
            const double lat_off = (r.lat_deg - spec.lat_min_deg) / spec.lat_bin_deg;
            const double offshore = offshore_distance_km(r.lat_deg, r.lon_deg, coast);
            const double off_off = offshore / spec.offshore_bin_km;
            if (lat_off < 0.0 || lat_off >= double(lat_bins) || off_off >= double(off_bins)) {
                ++map.dropped_;
                continue;
            }
            seen.emplace(static_cast<std::size_t>(lat_off), static_cast<std::size_t>(off_off),
                         static_cast<std::size_t>((r.timestamp - t_min) / spec.window_s));
        }
        for (const auto& [i, j, w] : seen)
            ++map.counts_[(w * off_bins + j) * lat_bins + i];
    }
    return map;
}

/// Default reference coastline: a meridian segment west of the default lane.
inline Coastline default_coastline() {
    return Coastline{{{26.0, 120.95}, {34.0, 120.95}}};
}

/// Synthetic stand-in for real coastal AIS data: most vessels follow the given
/// lanes with small cross-lane jitter, a handful wander randomly. Generates
/// the sparse-plus-lane structure the analytics expect. Deterministic per
/// seed. The default lane runs roughly coast-parallel 20-30 km offshore of
/// default_coastline().
struct SyntheticTrafficSpec {
    std::vector<std::vector<LatLon>> lanes = {
        {{29.0, 121.18}, {29.7, 121.21}, {30.3, 121.25}, {31.0, 121.3}}};
    int lane_vessels = 40;
    int random_vessels = 8;
    double speed_kn_min = 8.0;
    double speed_kn_max = 16.0;
    double lane_jitter_deg = 0.008;
    double report_interval_s = 60.0;
    double duration_s = 3.0 * 3600.0;
    double start_unix_s = 1443657600.0; // 2015-10-01T00:00Z
    LatLon area_min{29.0, 121.0};
    LatLon area_max{31.0, 121.6};
    std::uint64_t seed = 1;
};

inline std::vector<AisRecord> synthesize_ais_traffic(const SyntheticTrafficSpec& spec) {
    if (spec.lanes.empty() || spec.report_interval_s <= 0.0 || spec.duration_s <= 0.0)
        throw std::invalid_argument("synthetic traffic: bad spec");
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<AisRecord> out;

    const int reports = static_cast<int>(spec.duration_s / spec.report_interval_s);

    // Cumulative lane lengths for arc-length parameterization.
    struct Lane {
        std::vector<LatLon> pts;
        std::vector<double> cum_km;
    };
    std::vector<Lane> lanes;
    for (const auto& pts : spec.lanes) {
        Lane lane{pts, {0.0}};
        for (std::size_t i = 1; i < pts.size(); ++i)
            lane.cum_km.push_back(lane.cum_km.back() + great_circle_km(pts[i - 1], pts[i]));
        lanes.push_back(std::move(lane));
    }

    auto lane_point = [](const Lane& lane, double s_km) {
        const double total = lane.cum_km.back();
        // Ping-pong so vessels stay on the lane for arbitrarily long runs.
        double s = std::fmod(std::abs(s_km), 2.0 * total);
        if (s > total) s = 2.0 * total - s;
        for (std::size_t i = 1; i < lane.cum_km.size(); ++i) {
            if (s <= lane.cum_km[i]) {
                const double f = (s - lane.cum_km[i - 1]) / (lane.cum_km[i] - lane.cum_km[i - 1]);
                const LatLon& a = lane.pts[i - 1];
                const LatLon& b = lane.pts[i];
                return LatLon{a.lat_deg + f * (b.lat_deg - a.lat_deg),
                              a.lon_deg + f * (b.lon_deg - a.lon_deg)};
            }
        }
        return lane.pts.back();
    };

    char id[16];
    for (int v = 0; v < spec.lane_vessels; ++v) {
        std::snprintf(id, sizeof(id), "LANE%03d", v);
        const Lane& lane = lanes[std::size_t(v) % lanes.size()];
        const double speed_kn =
            spec.speed_kn_min + (spec.speed_kn_max - spec.speed_kn_min) * uni(rng);
        const double kmps = speed_kn * 1.852 / 3600.0;
        double s_km = lane.cum_km.back() * uni(rng);
        const double dir = uni(rng) < 0.5 ? -1.0 : 1.0;
        const double across = spec.lane_jitter_deg * gauss(rng); // per-vessel lane offset
        for (int n = 0; n < reports; ++n) {
            const double t = spec.start_unix_s + n * spec.report_interval_s;
            const LatLon base = lane_point(lane, s_km + dir * kmps * n * spec.report_interval_s);
            const double wobble = 0.15 * spec.lane_jitter_deg;
            out.push_back({id, t, base.lat_deg + across + wobble * gauss(rng),
                           base.lon_deg + wobble * gauss(rng), speed_kn,
                           dir > 0 ? 90.0 : 270.0});
        }
    }

    for (int v = 0; v < spec.random_vessels; ++v) {
        std::snprintf(id, sizeof(id), "RND%03d", v);
        double lat = spec.area_min.lat_deg +
                     (spec.area_max.lat_deg - spec.area_min.lat_deg) * uni(rng);
        double lon = spec.area_min.lon_deg +
                     (spec.area_max.lon_deg - spec.area_min.lon_deg) * uni(rng);
        double heading = 360.0 * uni(rng);
        const double speed_kn =
            spec.speed_kn_min + (spec.speed_kn_max - spec.speed_kn_min) * uni(rng);
        const double step_deg = speed_kn * 1.852 / 3600.0 * spec.report_interval_s / 111.19;
        for (int n = 0; n < reports; ++n) {
            const double t = spec.start_unix_s + n * spec.report_interval_s;
            out.push_back({id, t, lat, lon, speed_kn, heading});
            heading += 25.0 * gauss(rng);
            lat += step_deg * std::cos(heading * kDegToRad);
            lon += step_deg * std::sin(heading * kDegToRad) /
                   std::max(0.2, std::cos(lat * kDegToRad));
            lat = std::clamp(lat, spec.area_min.lat_deg, spec.area_max.lat_deg);
            lon = std::clamp(lon, spec.area_min.lon_deg, spec.area_max.lon_deg);
        }
    }
    return out;
}

} // namespace pelagic
