#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include "pelagic/radio_map.hpp"

using namespace pelagic;

TEST_CASE("empty and trivial builds") {
    std::size_t rejected = 99;
    const RadioMap empty = RadioMap::build({}, 0.0, 0.0, 100.0, 4, 3, &rejected);
    CHECK(rejected == 0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(empty.cell_excess_db(i, j) == 0.0);
    CHECK(empty.lookup(-1e9, 1e9) == 0.0);

    std::vector<RadioMapSample> one = {{150.0, 250.0, 3.0}};
    const RadioMap m1 = RadioMap::build(one, 0.0, 0.0, 100.0, 4, 3);
    CHECK(m1.cell_excess_db(1, 2) == 3.0);
    CHECK(m1.cell_samples(1, 2) == 1);
    CHECK(m1.cell_excess_db(0, 0) == 0.0);

    std::vector<RadioMapSample> two = {{50.0, 50.0, 2.0}, {60.0, 40.0, 4.0}};
    const RadioMap m2 = RadioMap::build(two, 0.0, 0.0, 100.0, 2, 2);
    CHECK(m2.cell_excess_db(0, 0) == Catch::Approx(3.0).margin(1e-12));
    CHECK(m2.cell_samples(0, 0) == 2);
}

TEST_CASE("samples outside the extent are rejected with a count") {
    std::vector<RadioMapSample> samples = {
        {50.0, 50.0, 1.0}, {-5.0, 50.0, 1.0}, {250.0, 50.0, 1.0}, {50.0, 1e6, 1.0}};
    std::size_t rejected = 0;
    const RadioMap map = RadioMap::build(samples, 0.0, 0.0, 100.0, 2, 2, &rejected);
    CHECK(rejected == 3);
    CHECK(map.cell_samples(0, 0) == 1);
    CHECK_THROWS_AS(
        RadioMap::build(std::vector<RadioMapSample>{{std::nan(""), 0.0, 1.0}}, 0, 0, 100, 2, 2),
        std::invalid_argument);
}

TEST_CASE("build is permutation invariant") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pos(0.0, 1000.0), val(-3.0, 9.0);
    std::vector<RadioMapSample> samples;
    for (int i = 0; i < 500; ++i) samples.push_back({pos(rng), pos(rng), val(rng)});
    const RadioMap a = RadioMap::build(samples, 0.0, 0.0, 100.0, 10, 10);
    std::shuffle(samples.begin(), samples.end(), rng);
    const RadioMap b = RadioMap::build(samples, 0.0, 0.0, 100.0, 10, 10);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j)
            CHECK(a.cell_excess_db(i, j) == b.cell_excess_db(i, j)); // bit identical
}

TEST_CASE("lookup interpolates between cell centers") {
    // Row of two cells valued 2 and 4: midway between centers reads 3.
    std::vector<RadioMapSample> samples = {{50.0, 50.0, 2.0}, {150.0, 50.0, 4.0}};
    const RadioMap map = RadioMap::build(samples, 0.0, 0.0, 100.0, 2, 1);
    CHECK(map.lookup(50.0, 50.0) == Catch::Approx(2.0).margin(1e-12));  // exact center
    CHECK(map.lookup(150.0, 50.0) == Catch::Approx(4.0).margin(1e-12));
    CHECK(map.lookup(100.0, 50.0) == Catch::Approx(3.0).margin(1e-12)); // midpoint
    // beyond the extent clamps to the nearest edge value
    CHECK(map.lookup(-500.0, 50.0) == Catch::Approx(2.0).margin(1e-12));
    CHECK(map.lookup(4000.0, 123456.0) == Catch::Approx(4.0).margin(1e-12));
}

TEST_CASE("lookup is continuous across cell boundaries") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-5.0, 12.0);
    std::vector<RadioMapSample> samples;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            samples.push_back({100.0 * double(i) + 50.0, 100.0 * double(j) + 50.0, val(rng)});
    const RadioMap map = RadioMap::build(samples, 0.0, 0.0, 100.0, 6, 5);
    for (double x : {100.0, 200.0, 350.0, 500.0}) {
        for (double y : {40.0, 100.0, 230.0, 400.0}) {
            const double left = map.lookup(x - 1e-7, y);
            const double right = map.lookup(x + 1e-7, y);
            CHECK(left == Catch::Approx(right).margin(1e-9));
            const double below = map.lookup(x, y - 1e-7);
            const double above = map.lookup(x, y + 1e-7);
            CHECK(below == Catch::Approx(above).margin(1e-9));
        }
    }
}

TEST_CASE("persistence round trip") {
    std::vector<RadioMapSample> samples = {
        {120.0, 80.0, 2.5}, {340.0, 260.0, -1.25}, {345.0, 262.0, 4.75}};
    const RadioMap map = RadioMap::build(samples, -100.0, -50.0, 110.0, 5, 4);
    const std::string prefix =
        (std::filesystem::temp_directory_path() / "pelagic_radiomap_test").string();
    map.save(prefix);
    const RadioMap loaded = RadioMap::load(prefix);
    CHECK(loaded.nx() == map.nx());
    CHECK(loaded.ny() == map.ny());
    CHECK(loaded.cell_size_m() == map.cell_size_m());
    CHECK(loaded.origin_x() == map.origin_x());
    for (std::size_t i = 0; i < map.nx(); ++i)
        for (std::size_t j = 0; j < map.ny(); ++j) {
            CHECK(loaded.cell_excess_db(i, j) ==
                  Catch::Approx(map.cell_excess_db(i, j)).margin(1e-9));
            CHECK(loaded.cell_samples(i, j) == map.cell_samples(i, j));
        }
    std::filesystem::remove(prefix + ".csv");
    std::filesystem::remove(prefix + ".meta.toml");
}

TEST_CASE("grid csv format") {
    std::vector<RadioMapSample> samples = {{50.0, 50.0, 7.0}};
    const RadioMap map = RadioMap::build(samples, 0.0, 0.0, 100.0, 1, 1);
    std::ostringstream os;
    map.save_grid(os);
    CHECK(os.str() == "i,j,excess_db,samples\n0,0,7,1\n");
}

TEST_CASE("invalid construction") {
    CHECK_THROWS_AS(RadioMap(0, 0, -1.0, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(RadioMap(0, 0, 100.0, 0, 2), std::invalid_argument);
}
