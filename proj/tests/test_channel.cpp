#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "pelagic/channel.hpp"
#include "pelagic/rician.hpp"

using namespace pelagic;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

double mc_ergodic_rate(double snr, double k, std::size_t draws, std::uint64_t seed) {
    RicianPowerGainSampler sampler(k, seed);
    double acc = 0.0;
    for (std::size_t i = 0; i < draws; ++i) acc += std::log2(1.0 + snr * sampler());
    return acc / double(draws);
}
} // namespace

TEST_CASE("path loss at reference distance and per decade") {
    const ChannelParams p;
    CHECK(path_loss_db(2600.0, p) == Catch::Approx(116.7).margin(1e-12));
    CHECK(path_loss_db(26000.0, p) == Catch::Approx(131.7).margin(1e-9));
    CHECK(path_loss_db(260000.0, p) == Catch::Approx(146.7).margin(1e-9));
    // no clamping below the reference distance
    CHECK(path_loss_db(260.0, p) == Catch::Approx(101.7).margin(1e-9));
}

TEST_CASE("path loss adds exactly the decade coefficient") {
    const ChannelParams p;
    for (double d : {10.0, 137.0, 2600.0, 90000.0, 4.2e6}) {
        CHECK(path_loss_db(10.0 * d, p) - path_loss_db(d, p) ==
              Catch::Approx(p.pl_exponent_coeff).margin(1e-9));
    }
}

TEST_CASE("path loss rejects bad distances") {
    const ChannelParams p;
    CHECK_THROWS_AS(path_loss_db(0.0, p), std::invalid_argument);
    CHECK_THROWS_AS(path_loss_db(-10.0, p), std::invalid_argument);
    CHECK_THROWS_AS(path_loss_db(kInf, p), std::invalid_argument);
    CHECK_THROWS_AS(path_loss_db(std::nan(""), p), std::invalid_argument);
}

TEST_CASE("noise power") {
    ChannelParams p;
    p.bandwidth_hz = 10e6;
    p.noise_figure_db = 5.0;
    CHECK(noise_power_dbm(p) == Catch::Approx(-99.0).margin(1e-9));
    p.bandwidth_hz = 1.0;
    p.noise_figure_db = 0.0;
    CHECK(noise_power_dbm(p) == Catch::Approx(-174.0).margin(1e-12));
    p.bandwidth_hz = 1e6;
    CHECK(noise_power_dbm(p) == Catch::Approx(-114.0).margin(1e-9));
}

TEST_CASE("horizon excess") {
    ChannelParams p;
    p.horizon_excess_db_per_km = 2.0;
    const double horizon = radio_horizon_m(100.0, 10.0);
    CHECK(horizon == Catch::Approx(54228.6).margin(0.5));
    CHECK(horizon_excess_db(100.0, 10.0, 50000.0, p) == 0.0);
    CHECK(horizon_excess_db(100.0, 10.0, horizon, p) == 0.0);
    CHECK(horizon_excess_db(100.0, 10.0, horizon + 10000.0, p) ==
          Catch::Approx(20.0).margin(1e-9));
    // continuity at the boundary
    CHECK(horizon_excess_db(100.0, 10.0, horizon + 1e-6, p) ==
          Catch::Approx(0.0).margin(1e-8));
    CHECK_THROWS_AS(horizon_excess_db(-1.0, 10.0, 1e4, p), std::invalid_argument);
    p.horizon_excess_db_per_km = 0.0;
    CHECK(horizon_excess_db(100.0, 10.0, 1e7, p) == 0.0);
}

TEST_CASE("mean snr budgets") {
    ChannelParams access;
    access.tx_gain_dbi = 8.0;
    access.rx_gain_dbi = 8.0;
    const LinkBudget b = mean_snr(40.0, 2600.0, access);
    CHECK(b.rx_power_dbm == Catch::Approx(-60.7).margin(1e-9));
    CHECK(b.noise_dbm == Catch::Approx(-99.0).margin(1e-9));
    CHECK(10.0 * std::log10(b.mean_snr_linear) == Catch::Approx(38.3).margin(1e-9));

    // transmitter off
    const LinkBudget off = mean_snr(-kInf, 2600.0, access);
    CHECK(off.mean_snr_linear == 0.0);

    ChannelParams shore;
    shore.tx_gain_dbi = 12.0;
    shore.rx_gain_dbi = 8.0;
    const LinkBudget s = mean_snr(40.0, 50000.0, shore);
    CHECK(s.rx_power_dbm == Catch::Approx(-76.0).margin(0.05));
    CHECK(10.0 * std::log10(s.mean_snr_linear) == Catch::Approx(23.0).margin(0.05));
}

TEST_CASE("mean snr applies radio map excess at the ground endpoint") {
    std::vector<RadioMapSample> samples = {{500.0, 500.0, 6.0}};
    const RadioMap map = RadioMap::build(samples, 0.0, 0.0, 1000.0, 1, 1);
    ChannelParams p;
    const Vec3 uav{500.0, 500.0, 2600.0};
    const Vec3 vessel{500.0, 500.0, 10.0};
    const LinkBudget with_map = mean_snr(40.0, uav, vessel, p, &map);
    const LinkBudget without = mean_snr(40.0, uav, vessel, p, nullptr);
    CHECK(with_map.excess_loss_db == Catch::Approx(6.0).margin(1e-12));
    CHECK(without.excess_loss_db == 0.0);
    CHECK(with_map.rx_power_dbm == Catch::Approx(without.rx_power_dbm - 6.0).margin(1e-12));
}

TEST_CASE("ergodic rate golden values") {
    // Frozen from a 40-digit quadrature of the noncentral chi-square density.
    CHECK(ergodic_rate(100.0, 10.0) == Catch::Approx(6.5241512437771086).margin(1e-6));
    CHECK(ergodic_rate(10.0, 10.0) == Catch::Approx(3.350337504094766).margin(1e-6));
    CHECK(ergodic_rate(1.0, 0.0) == Catch::Approx(0.86034738227088595).margin(1e-6));
    CHECK(ergodic_rate(100.0, 0.0) == Catch::Approx(5.8840482336834735).margin(1e-6));
    CHECK(ergodic_rate(1000.0, 10.0) == Catch::Approx(9.8300821109768042).margin(1e-6));
    CHECK(ergodic_rate(0.1, 1.0) == Catch::Approx(0.13332234766991595).margin(1e-6));
    CHECK(ergodic_rate(50.0, 10.0) == Catch::Approx(5.541631656879143).margin(1e-6));
}

TEST_CASE("ergodic rate trivial and limiting cases") {
    CHECK(ergodic_rate(0.0, 10.0) == 0.0);
    CHECK(ergodic_rate(100.0, kInf) == Catch::Approx(std::log2(101.0)).margin(1e-12));
    CHECK(ergodic_rate(100.0, 1e9) == Catch::Approx(std::log2(101.0)).margin(1e-12));
    CHECK(std::log2(101.0) == Catch::Approx(6.658).margin(1e-3));
    CHECK_THROWS_AS(ergodic_rate(-1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(ergodic_rate(1.0, -0.5), std::invalid_argument);
}

TEST_CASE("ergodic rate is strictly increasing in snr") {
    for (double k : {0.0, 1.0, 10.0}) {
        const ErgodicRateFn fn(k);
        double prev = -1.0;
        for (int i = 0; i < 100; ++i) {
            const double snr = std::pow(10.0, -3.0 + 9.0 * double(i) / 99.0);
            const double r = fn(snr);
            CHECK(r > prev);
            prev = r;
        }
    }
}

TEST_CASE("Jensen bound holds and closes as K grows") {
    for (double k : {0.0, 1.0, 10.0, 100.0}) {
        const ErgodicRateFn fn(k);
        for (double snr : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 1e5}) {
            CHECK(fn(snr) <= std::log2(1.0 + snr) + 1e-12);
        }
    }
    double prev_gap = kInf;
    for (double k : {1.0, 10.0, 100.0, 1000.0}) {
        const double gap = std::log2(101.0) - ergodic_rate(100.0, k);
        CHECK(gap >= 0.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 2e-3);
}

TEST_CASE("quadrature agrees with Monte Carlo") {
    std::uint64_t seed = 77;
    for (double k : {0.0, 1.0, 10.0}) {
        const ErgodicRateFn fn(k);
        for (double snr : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
            const double mc = mc_ergodic_rate(snr, k, 1000000, seed++);
            CHECK(fn(snr) == Catch::Approx(mc).margin(5e-3));
        }
    }
}

TEST_CASE("rician power gain sampler has unit mean") {
    for (double k : {0.0, 1.0, 10.0}) {
        RicianPowerGainSampler sampler(k, 42);
        double acc = 0.0;
        const std::size_t n = 1000000;
        for (std::size_t i = 0; i < n; ++i) acc += sampler();
        CHECK(acc / double(n) == Catch::Approx(1.0).margin(1e-3));
    }
}

TEST_CASE("invert ergodic rate") {
    CHECK(invert_ergodic_rate(0.0, 10.0) == 0.0);
    // deterministic limit has the closed-form inverse 2^r - 1
    CHECK(invert_ergodic_rate(std::log2(101.0), kInf) == Catch::Approx(100.0).margin(1e-9));

    const ErgodicRateFn fn(10.0);
    const double r50 = fn(50.0);
    CHECK(fn.invert(r50) == Catch::Approx(50.0).epsilon(1e-6));
    for (double r : {0.01, 0.5, 2.0, 6.0, 11.0}) {
        CHECK(fn(fn.invert(r)) == Catch::Approx(r).margin(1e-6));
        CHECK(fn(fn.invert(r)) <= r + 1e-12); // allocator relies on feasible-side inversion
    }
    CHECK_THROWS_AS(invert_ergodic_rate(2000.0, 10.0), std::overflow_error);
    CHECK_THROWS_AS(invert_ergodic_rate(1500.0, kInf), std::overflow_error);
}

TEST_CASE("quadrature mass stays normalized") {
    // The premultiplied weights integrate the bare density; log2(1 + s x)
    // with s -> 0 recovers s/ln2 * E[X], so unit mean of the fading gain is
    // visible as rate ~ snr/ln2 for tiny snr.
    for (double k : {0.0, 1.0, 10.0, 100.0}) {
        const ErgodicRateFn fn(k);
        const double tiny = 1e-9;
        CHECK(fn(tiny) == Catch::Approx(tiny / std::log(2.0)).epsilon(1e-6));
    }
}
