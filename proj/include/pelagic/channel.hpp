#pragma once

#include <cmath>
#include <stdexcept>

#include "pelagic/geometry.hpp"
#include "pelagic/radio_map.hpp"

// Large-scale propagation: reference-distance path loss, thermal noise,
// beyond-horizon excess and mean-SNR link budgets. All fading statistics live
// in rician.hpp; everything here is deterministic geometry-driven loss.

namespace pelagic {

/// Large-scale parameters of one link class.
///
/// Defaults are the maritime setting this project ships with: path loss
/// L(dB) = 116.7 + 15 log10(d / 2600 m) and a Rician K factor of 10. Noise
/// uses a 10 MHz bandwidth and 5 dB noise figure (-99 dBm floor).
struct ChannelParams {
    double ref_loss_db = 116.7;       // loss at the reference distance
    double ref_distance_m = 2600.0;
    double pl_exponent_coeff = 15.0;  // dB added per decade of distance
    double rician_k = 10.0;
    double tx_gain_dbi = 8.0;
    double rx_gain_dbi = 8.0;
    double bandwidth_hz = 10e6;
    double noise_figure_db = 5.0;
    double horizon_excess_db_per_km = 0.0; // 0 disables the horizon penalty

    void validate() const {
        if (!(ref_distance_m > 0.0)) throw std::invalid_argument("ref_distance_m must be > 0");
        if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth_hz must be > 0");
        if (!(rician_k >= 0.0)) throw std::invalid_argument("rician_k must be >= 0");
    }
};

/// Assembled budget for one link at one geometry.
struct LinkBudget {
    double distance_m = 0.0;
    double path_loss_db = 0.0;
    double excess_loss_db = 0.0;
    double noise_dbm = 0.0;
    double rx_power_dbm = 0.0;
    double mean_snr_linear = 0.0;
};

/// Distance-only path loss in dB. Not clamped below the reference distance;
/// the formula is monotone and scenarios never approach d -> 0.
inline double path_loss_db(double d_m, const ChannelParams& params) {
    if (!(d_m > 0.0) || !std::isfinite(d_m))
        throw std::invalid_argument("path_loss: distance must be positive and finite");
    return params.ref_loss_db + params.pl_exponent_coeff * std::log10(d_m / params.ref_distance_m);
}

/// Thermal noise floor: -174 dBm/Hz + 10 log10(B) + NF.
inline double noise_power_dbm(const ChannelParams& params) {
    if (!(params.bandwidth_hz > 0.0)) throw std::invalid_argument("noise_power: bandwidth must be > 0");
    return -174.0 + 10.0 * std::log10(params.bandwidth_hz) + params.noise_figure_db;
}

/// Radio horizon between antennas at heights h1, h2 (meters in, meters out).
inline double radio_horizon_m(double h1_m, double h2_m) {
    return 4120.0 * (std::sqrt(h1_m) + std::sqrt(h2_m));
}

/// Linear beyond-horizon penalty: 0 inside the radio horizon, then
/// horizon_excess_db_per_km per excess kilometer. Continuous at the horizon.
inline double horizon_excess_db(double h1_m, double h2_m, double ground_distance_m,
                                const ChannelParams& params) {
    if (h1_m < 0.0 || h2_m < 0.0) throw std::invalid_argument("horizon_excess: heights must be >= 0");
    if (params.horizon_excess_db_per_km == 0.0) return 0.0;
    const double horizon_m = radio_horizon_m(h1_m, h2_m);
    if (ground_distance_m <= horizon_m) return 0.0;
    return params.horizon_excess_db_per_km * (ground_distance_m - horizon_m) / 1000.0;
}

/// Budget for a link with explicit endpoints. Excess loss is the radio-map
/// value at the lower (ground-side) endpoint plus the horizon penalty; pass
/// map = nullptr (or an empty map) for zero map excess. tx_power_dbm = -inf
/// models a transmitter that is off and yields zero SNR.
inline LinkBudget mean_snr(double tx_power_dbm, const Vec3& from, const Vec3& to,
                           const ChannelParams& params, const RadioMap* map = nullptr) {
    LinkBudget budget;
    budget.distance_m = distance(from, to);
    budget.path_loss_db = path_loss_db(budget.distance_m, params);
    budget.noise_dbm = noise_power_dbm(params);

    const Vec3& ground = (from.z <= to.z) ? from : to;
    double excess = 0.0;
    if (map != nullptr && !map->empty()) excess = map->lookup(ground.x, ground.y);
    excess += horizon_excess_db(from.z, to.z, horizontal_distance(from, to), params);
    budget.excess_loss_db = excess;

    budget.rx_power_dbm = tx_power_dbm + params.tx_gain_dbi + params.rx_gain_dbi -
                          budget.path_loss_db - budget.excess_loss_db;
    budget.mean_snr_linear = std::pow(10.0, (budget.rx_power_dbm - budget.noise_dbm) / 10.0);
    return budget;
}

/// Budget from a bare distance (no horizon / radio-map geometry).
inline LinkBudget mean_snr(double tx_power_dbm, double d_m, const ChannelParams& params) {
    LinkBudget budget;
    budget.distance_m = d_m;
    budget.path_loss_db = path_loss_db(d_m, params);
    budget.noise_dbm = noise_power_dbm(params);
    budget.excess_loss_db = 0.0;
    budget.rx_power_dbm = tx_power_dbm + params.tx_gain_dbi + params.rx_gain_dbi -
                          budget.path_loss_db;
    budget.mean_snr_linear = std::pow(10.0, (budget.rx_power_dbm - budget.noise_dbm) / 10.0);
    return budget;
}

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) {
    return mw > 0.0 ? 10.0 * std::log10(mw) : -std::numeric_limits<double>::infinity();
}
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

} // namespace pelagic
