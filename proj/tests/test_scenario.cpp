#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "pelagic/scenario.hpp"

using namespace pelagic;

TEST_CASE("flagship vessel track interpolation") {
    const Scenario sc = Scenario::flagship();
    const Vec3 p0 = vessel_position(sc.vessel_track, 0.0);
    CHECK(p0.x == Catch::Approx(50000.0));
    CHECK(p0.y == 0.0);
    CHECK(p0.z == 10.0);
    const Vec3 p_end = vessel_position(sc.vessel_track, 1800.0);
    CHECK(p_end.x == Catch::Approx(68000.0));
    const Vec3 p_mid = vessel_position(sc.vessel_track, 900.0);
    CHECK(p_mid.x == Catch::Approx(59000.0));
    CHECK(p_mid.z == 10.0);
}

TEST_CASE("vessel position outside span is an error") {
    const Scenario sc = Scenario::flagship();
    CHECK_THROWS_AS(vessel_position(sc.vessel_track, -1.0), std::out_of_range);
    CHECK_THROWS_AS(vessel_position(sc.vessel_track, 1800.0 + 1e-6), std::out_of_range);
}

TEST_CASE("vessel position is continuous and hits waypoints") {
    VesselTrack track;
    track.waypoints = {{0.0, {0.0, 0.0, 5.0}},
                       {100.0, {1000.0, 200.0, 5.0}},
                       {250.0, {1500.0, -300.0, 5.0}},
                       {400.0, {2500.0, 0.0, 5.0}}};
    track.speed_ms = 10.0;
    for (const TimedPoint& wp : track.waypoints) {
        const Vec3 p = vessel_position(track, wp.t_s);
        CHECK(distance(p, wp.position) < 1e-9);
    }
    for (double t : {50.0, 99.999999, 100.000001, 180.0, 399.9}) {
        const Vec3 before = vessel_position(track, t - 1e-7);
        const Vec3 after = vessel_position(track, t + 1e-7);
        CHECK(distance(before, after) < 1e-4);
    }
}

TEST_CASE("track validation") {
    VesselTrack track;
    track.waypoints = {{0.0, {0, 0, 10}}, {0.0, {10, 0, 10}}};
    CHECK_THROWS_AS(track.validate(), std::invalid_argument);
    track.waypoints = {{0.0, {0, 0, 10}}, {10.0, {10, 0, 20}}};
    CHECK_THROWS_AS(track.validate(), std::invalid_argument); // altitude drift
    track.waypoints = {{0.0, {0, 0, 10}}};
    CHECK_THROWS_AS(track.validate(), std::invalid_argument);
}

TEST_CASE("scenario defaults reproduce the flagship setting") {
    const Scenario sc;
    CHECK(sc.tbs_position.z == 100.0);
    CHECK(sc.sat_user_position.x == 59000.0);
    CHECK(sc.sat_user_position.y == 5000.0);
    CHECK(sc.p_max_dbm == 40.0);
    CHECK(sc.energy_j == 3.0e4);
    CHECK(sc.interference_limit_dbm == -40.0);
    CHECK(sc.uav_limits.v_min_ms == 20.0);
    CHECK(sc.uav_limits.v_max_ms == 36.0);
    CHECK(sc.uav_limits.a_max_ms2 == 5.0);
    CHECK(sc.uav_limits.alt_min_m == 2600.0);
    CHECK(sc.uav_limits.alt_max_m == 5000.0);
    CHECK(sc.access_link.ref_loss_db == 116.7);
    CHECK(sc.access_link.ref_distance_m == 2600.0);
    CHECK(sc.access_link.pl_exponent_coeff == 15.0);
    CHECK(sc.access_link.rician_k == 10.0);
    CHECK(sc.access_link.tx_gain_dbi == 8.0);
    CHECK(sc.backhaul_link.tx_gain_dbi == 12.0);
    CHECK(sc.interference_link.rx_gain_dbi == 30.0);
    CHECK(sc.slot_count() == 180);
    CHECK_NOTHROW(sc.validate());
}

TEST_CASE("scenario from config applies overrides and keeps defaults") {
    const std::string text = R"(
[scenario]
p_max_dbm = 34.0
energy_j = 1.5e3
[scenario.vessel]
speed_ms = 9.0
start_m = [0.0, 0.0, 10.0]
end_m = [8100.0, 0.0, 10.0]
[scenario.link.access]
rician_k = 6.0
)";
    const Scenario sc = scenario_from_config(config::parse_string(text));
    CHECK(sc.p_max_dbm == 34.0);
    CHECK(sc.energy_j == 1500.0);
    CHECK(sc.vessel_track.speed_ms == 9.0);
    CHECK(sc.vessel_track.span_s() == Catch::Approx(900.0));
    CHECK(sc.access_link.rician_k == 6.0);
    CHECK(sc.backhaul_link.rician_k == 10.0); // untouched default
    CHECK(sc.interference_limit_dbm == -40.0);
}

TEST_CASE("unknown scenario keys are rejected") {
    CHECK_THROWS_AS(scenario_from_config(config::parse_string("[scenario]\np_max = 40\n")),
                    ConfigError);
    CHECK_THROWS_AS(
        scenario_from_config(config::parse_string("[scenario.uav]\nvmax_ms = 36\n")),
        ConfigError);
}

TEST_CASE("scenario validation failures surface as config errors") {
    // 17 m/s vessel over 1000 m with slot 10 s -> non-integral slot count.
    const std::string text = R"(
[scenario]
slot_s = 10.0
[scenario.vessel]
speed_ms = 17.0
start_m = [0.0, 0.0, 10.0]
end_m = [1000.0, 0.0, 10.0]
)";
    CHECK_THROWS_AS(scenario_from_config(config::parse_string(text)), ConfigError);
}

TEST_CASE("config parser basics") {
    const config::Table tbl = config::parse_string(R"(
# comment
top = 1.5
flag = true
name = "abc" # trailing comment
[sec.sub]
arr = [1, 2, 3.5]
)");
    CHECK(tbl.get_double("top", 0.0) == 1.5);
    CHECK(tbl.get_bool("flag", false));
    CHECK(tbl.get_string("name", "") == "abc");
    const auto arr = tbl.get_double_list("sec.sub.arr", {});
    REQUIRE(arr.size() == 3);
    CHECK(arr[2] == 3.5);

    CHECK_THROWS_AS(config::parse_string("a == 1\n"), ConfigError);
    CHECK_THROWS_AS(config::parse_string("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(config::parse_string("[bad\na = 1\n"), ConfigError);
    CHECK_THROWS_AS(config::parse_string("a = [1, \n"), ConfigError);
    CHECK_THROWS_AS(config::parse_file("/nonexistent/path.toml"), ConfigError);
}
