#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "pelagic/ais.hpp"

using namespace pelagic;

namespace {
std::string records_to_csv(std::vector<AisRecord> records) {
    std::ostringstream os;
    os << kAisCsvHeader << "\n";
    for (const AisRecord& r : records)
        os << r.vessel_id << "," << csv::format_double(r.timestamp) << ","
           << csv::format_double(r.lat_deg) << "," << csv::format_double(r.lon_deg) << ","
           << csv::format_double(r.speed_kn) << "," << csv::format_double(r.heading_deg) << "\n";
    return os.str();
}
} // namespace

TEST_CASE("ingest empty body") {
    std::istringstream in(std::string(kAisCsvHeader) + "\n");
    const AisIngestResult r = ais_ingest(in);
    CHECK(r.tracks.empty());
    CHECK(r.skipped_rows == 0);
}

TEST_CASE("missing header is a format error") {
    std::istringstream empty("");
    CHECK_THROWS_AS(ais_ingest(empty), ConfigError);
    std::istringstream wrong("id,time\n1,2\n");
    CHECK_THROWS_AS(ais_ingest(wrong), ConfigError);
}

TEST_CASE("shuffled timestamps come out sorted") {
    std::istringstream in(std::string(kAisCsvHeader) + "\n" +
                          "V1,300,30.0,122.0,10,90\n"
                          "V1,100,30.1,122.1,10,90\n"
                          "V1,200,30.2,122.2,10,90\n");
    const AisIngestResult r = ais_ingest(in);
    REQUIRE(r.tracks.size() == 1);
    REQUIRE(r.tracks[0].records.size() == 3);
    CHECK(r.tracks[0].records[0].timestamp == 100.0);
    CHECK(r.tracks[0].records[1].timestamp == 200.0);
    CHECK(r.tracks[0].records[2].timestamp == 300.0);
}

TEST_CASE("interleaved vessels are grouped and ordered") {
    std::istringstream in(std::string(kAisCsvHeader) + "\n" +
                          "B,50,30.0,122.0,10,90\n"
                          "A,20,30.5,122.5,12,180\n"
                          "B,10,30.1,122.1,10,90\n"
                          "A,80,30.6,122.6,12,180\n");
    const AisIngestResult r = ais_ingest(in);
    REQUIRE(r.tracks.size() == 2);
    CHECK(r.tracks[0].vessel_id == "A"); // lexicographic output order
    CHECK(r.tracks[1].vessel_id == "B");
    CHECK(r.tracks[0].records[0].timestamp == 20.0);
    CHECK(r.tracks[0].records[1].timestamp == 80.0);
    CHECK(r.tracks[1].records[0].timestamp == 10.0);
    CHECK(r.tracks[1].records[1].timestamp == 50.0);
}

TEST_CASE("malformed rows are skipped and counted") {
    std::istringstream in(std::string(kAisCsvHeader) + "\n" +
                          "V1,100,30.0,122.0,10,90\n"
                          "V1,not_a_number,30.0,122.0,10,90\n"
                          "V1,200,95.0,122.0,10,90\n"   // latitude out of range
                          "V1,300,30.0,190.0,10,90\n"   // longitude out of range
                          "V1,400,30.0\n"               // wrong field count
                          ",500,30.0,122.0,10,90\n"     // empty vessel id
                          "V1,500,30.0,122.0,10,90\n");
    const AisIngestResult r = ais_ingest(in);
    CHECK(r.skipped_rows == 5);
    REQUIRE(r.tracks.size() == 1);
    CHECK(r.tracks[0].records.size() == 2);
}

TEST_CASE("ingest then serialize is idempotent") {
    SyntheticTrafficSpec spec;
    spec.lane_vessels = 6;
    spec.random_vessels = 2;
    spec.duration_s = 1800.0;
    std::istringstream first_in(records_to_csv(synthesize_ais_traffic(spec)));
    const AisIngestResult first = ais_ingest(first_in);

    std::ostringstream serialized;
    ais_write(serialized, first.tracks);
    std::istringstream second_in(serialized.str());
    const AisIngestResult second = ais_ingest(second_in);

    std::ostringstream reserialized;
    ais_write(reserialized, second.tracks);
    CHECK(serialized.str() == reserialized.str());
}

TEST_CASE("offshore distance basics") {
    const Coastline meridian{{{-5.0, 0.0}, {5.0, 0.0}}};
    // point on a coastline vertex
    CHECK(offshore_distance_km(5.0, 0.0, meridian) == Catch::Approx(0.0).margin(1e-9));
    // 1 degree due east of the meridian at the equator: R * pi/180
    CHECK(offshore_distance_km(0.0, 1.0, meridian) == Catch::Approx(111.19).margin(0.01));
    // symmetric points either side
    const double east = offshore_distance_km(2.0, 0.7, meridian);
    const double west = offshore_distance_km(2.0, -0.7, meridian);
    CHECK(east == Catch::Approx(west).margin(1e-9));
    // beyond the segment end the nearest vertex wins
    const double beyond = offshore_distance_km(7.0, 0.0, meridian);
    CHECK(beyond == Catch::Approx(great_circle_km({7.0, 0.0}, {5.0, 0.0})).margin(1e-9));
    CHECK_THROWS_AS(offshore_distance_km(0.0, 0.0, Coastline{}), std::invalid_argument);
}

TEST_CASE("heatmap with no tracks is empty") {
    const DensityHeatmap map = density_heatmap({}, HeatmapSpec{}, default_coastline());
    CHECK(map.total() == 0);
    CHECK(map.windows() == 0);
}

TEST_CASE("stationary vessel counts once per hourly window") {
    std::vector<AisRecord> records;
    for (int i = 0; i < 180; ++i) // every 60 s for 3 h
        records.push_back({"V1", 1000.0 + 60.0 * i, 30.02, 121.25, 0.0, 0.0});
    std::istringstream in(records_to_csv(records));
    const auto tracks = ais_ingest(in).tracks;
    const DensityHeatmap map = density_heatmap(tracks, HeatmapSpec{}, default_coastline());
    CHECK(map.windows() == 3);
    CHECK(map.total() == 3); // one count in each hourly window
    for (std::size_t w = 0; w < 3; ++w) {
        long long in_window = 0;
        for (std::size_t i = 0; i < map.lat_bins(); ++i)
            for (std::size_t j = 0; j < map.offshore_bins(); ++j) in_window += map.at(i, j, w);
        CHECK(in_window == 1);
    }
}

TEST_CASE("two vessels in the same cell and hour count as two") {
    std::vector<AisRecord> records = {{"V1", 100.0, 30.02, 121.25, 5.0, 0.0},
                                      {"V2", 200.0, 30.02, 121.25, 5.0, 0.0},
                                      {"V1", 300.0, 30.02, 121.25, 5.0, 0.0}};
    std::istringstream in(records_to_csv(records));
    const auto tracks = ais_ingest(in).tracks;
    const DensityHeatmap map = density_heatmap(tracks, HeatmapSpec{}, default_coastline());
    CHECK(map.total() == 2);
}

TEST_CASE("heatmap conserves distinct triples and ignores row order") {
    SyntheticTrafficSpec spec;
    spec.lane_vessels = 20;
    spec.random_vessels = 5;
    spec.seed = 9;
    std::vector<AisRecord> records = synthesize_ais_traffic(spec);

    const HeatmapSpec grid;
    const Coastline coast = default_coastline();

    std::istringstream in(records_to_csv(records));
    const auto tracks = ais_ingest(in).tracks;
    const DensityHeatmap map = density_heatmap(tracks, grid, coast);

    // independent distinct-triple count
    std::set<std::tuple<std::string, long, long, long>> triples;
    std::size_t dropped = 0;
    for (const AisRecord& r : records) {
        const double lat_off = (r.lat_deg - grid.lat_min_deg) / grid.lat_bin_deg;
        const double off = offshore_distance_km(r.lat_deg, r.lon_deg, coast) / grid.offshore_bin_km;
        if (lat_off < 0 || lat_off >= double(map.lat_bins()) || off >= double(map.offshore_bins())) {
            ++dropped;
            continue;
        }
        triples.emplace(r.vessel_id, long(lat_off), long(off),
                        long((r.timestamp - map.window_origin()) / grid.window_s));
    }
    CHECK(map.total() == (long long)triples.size());
    CHECK(map.dropped_records() == dropped);

    // permuted input -> identical output
    std::mt19937_64 rng(3);
    std::shuffle(records.begin(), records.end(), rng);
    std::istringstream in2(records_to_csv(records));
    const DensityHeatmap map2 = density_heatmap(ais_ingest(in2).tracks, grid, coast);
    REQUIRE(map2.windows() == map.windows());
    for (std::size_t i = 0; i < map.lat_bins(); ++i)
        for (std::size_t j = 0; j < map.offshore_bins(); ++j)
            for (std::size_t w = 0; w < map.windows(); ++w)
                CHECK(map.at(i, j, w) == map2.at(i, j, w));
}

TEST_CASE("synthetic traffic shows the lane structure") {
    SyntheticTrafficSpec spec;
    spec.seed = 4;
    const std::vector<AisRecord> records = synthesize_ais_traffic(spec);
    std::istringstream in(records_to_csv(records));
    const auto tracks = ais_ingest(in).tracks;
    CHECK(tracks.size() == std::size_t(spec.lane_vessels + spec.random_vessels));
    const DensityHeatmap map = density_heatmap(tracks, HeatmapSpec{}, default_coastline());
    // the 20-30 km offshore band should dominate: that's where the lane runs
    long long band[3] = {0, 0, 0};
    for (std::size_t i = 0; i < map.lat_bins(); ++i)
        for (std::size_t j = 0; j < map.offshore_bins(); ++j)
            for (std::size_t w = 0; w < map.windows(); ++w) band[j] += map.at(i, j, w);
    CHECK(band[2] > 4 * (band[0] + 1));
    // deterministic per seed
    const std::vector<AisRecord> again = synthesize_ais_traffic(spec);
    REQUIRE(again.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(again[i].vessel_id == records[i].vessel_id);
        CHECK(again[i].lat_deg == records[i].lat_deg);
        CHECK(again[i].lon_deg == records[i].lon_deg);
    }
}
