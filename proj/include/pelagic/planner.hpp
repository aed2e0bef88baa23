#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pelagic/channel.hpp"
#include "pelagic/csv.hpp"
#include "pelagic/errors.hpp"
#include "pelagic/geometry.hpp"
#include "pelagic/platform.hpp"
#include "pelagic/rician.hpp"
#include "pelagic/scenario.hpp"

// Joint per-slot power allocation and trajectory search maximizing the
// minimum ergodic achievable rate under transmit-power, residual-energy,
// interference-temperature, backhaul-rate and fixed-wing kinematic
// constraints. Only large-scale CSI (geometry + radio map) enters anywhere.
//
// Slot convention: N service slots of slot_s seconds take waypoints
// q_0..q_N; link geometry for slot n is evaluated at the slot midpoint
// (UAV at (q_n+q_{n+1})/2, vessel at t = (n+1/2) slot_s). At 10 s slots the
// within-slot geometry change moves path loss by well under 0.1 dB.

namespace pelagic {

struct ConstraintSet {
    double p_max_dbm = 40.0;
    double energy_j = 3.0e4;
    double interference_limit_dbm = -40.0;
    bool backhaul_enabled = true;
    double slot_s = 10.0;

    static ConstraintSet from_scenario(const Scenario& sc) {
        return {sc.p_max_dbm, sc.energy_j, sc.interference_limit_dbm, true, sc.slot_s};
    }
};

struct TrajectoryPlan {
    std::vector<Vec3> waypoints;          // N+1
    std::vector<double> powers_dbm;       // N; -inf = transmitter off
    std::vector<double> access_rate;      // bps/Hz per slot
    std::vector<double> backhaul_rate;    // bps/Hz per slot
    std::vector<double> interference_dbm; // received at the satellite user
    double min_rate = 0.0;
    double energy_used_j = 0.0;
    std::vector<double> objective_trace;  // min_rate after each search sweep

    std::size_t slots() const { return powers_dbm.size(); }
};

/// Per-slot interference power cap: the transmit power at which the received
/// interference at the satellite user exactly meets the limit.
inline double interference_power_cap_dbm(const Vec3& uav, const Scenario& sc) {
    const double loss = path_loss_db(distance(uav, sc.sat_user_position), sc.interference_link);
    return sc.interference_limit_dbm -
           (sc.interference_link.tx_gain_dbi + sc.interference_link.rx_gain_dbi) + loss;
}

struct SlotCaps {
    double p_cap_interference_dbm = 0.0;
    double backhaul_rate = 0.0;
};

/// Transmit-power cap and backhaul ceiling for a UAV at one position.
inline SlotCaps slot_caps(const Vec3& uav_position, const Scenario& sc) {
    if (!(uav_position.z > 0.0)) throw std::invalid_argument("slot_caps: altitude must be > 0");
    SlotCaps caps;
    caps.p_cap_interference_dbm = interference_power_cap_dbm(uav_position, sc);
    const LinkBudget feeder = mean_snr(sc.tbs_power_dbm, sc.tbs_position, uav_position,
                                       sc.backhaul_link, &sc.radio_map);
    caps.backhaul_rate = ErgodicRateFn(sc.backhaul_link.rician_k)(feeder.mean_snr_linear);
    return caps;
}

struct PowerAllocation {
    std::vector<double> powers_dbm;
    double min_rate = 0.0;
    double energy_used_j = 0.0;
};

enum class TrajectoryInit { overhead_loiter, straight_chase };

namespace detail {

// Everything the allocator needs about one slot.
struct SlotState {
    double g_access = 0.0; // mean linear SNR per mW of transmit power
    double inv_g = 0.0;
    double backhaul_rate = 0.0;
    double p_cap_mw = 0.0; // min(P_max, interference cap), linear
};

// Exact max-min power allocation for fixed slot gains. The max-min optimum
// equalizes the per-slot access rate, so a single target SNR s serves every
// slot with power p_n = s / g_n and the three constraint families each give a
// monotone bound on s:
//   power caps   s <= min_n g_n p_cap_n
//   energy       sum_n (s/g_n) mW * slot <= E
//   backhaul     rate(s) <= min_n bh_n
// The allocator returns the tightest bound. This is the exact limit of
// bisection on the target rate; rates below the optimum stay feasible.
class Allocator {
public:
    Allocator(const ErgodicRateFn& access_fn, const ConstraintSet& constraints)
        : access_fn_(access_fn), constraints_(constraints) {}

    double max_common_snr(double min_gp, double sum_inv_g, double min_bh) const {
        double s = min_gp;
        if (std::isfinite(constraints_.energy_j)) {
            const double s_energy =
                constraints_.energy_j / (constraints_.slot_s * 1e-3 * sum_inv_g);
            s = std::min(s, s_energy);
        }
        if (constraints_.backhaul_enabled && min_bh < std::numeric_limits<double>::infinity()) {
            if (min_bh <= 0.0) return 0.0;
            s = std::min(s, bh_snr(min_bh));
        }
        return s;
    }

private:
    // Memoized inverse of the access-rate curve at the backhaul ceiling; the
    // binding ceiling value rarely changes between candidate evaluations.
    double bh_snr(double min_bh) const {
        if (min_bh != cached_bh_) {
            cached_bh_ = min_bh;
            cached_snr_ = access_fn_.invert(min_bh);
        }
        return cached_snr_;
    }

    const ErgodicRateFn& access_fn_;
    ConstraintSet constraints_;
    mutable double cached_bh_ = -1.0;
    mutable double cached_snr_ = 0.0;
};

// Slot-grid evaluation engine shared by the allocator entry point, the
// pattern search and the baselines.
class PlanEngine {
public:
    PlanEngine(const Scenario& sc, const ConstraintSet& constraints)
        : sc_(sc), constraints_(constraints), access_fn_(sc.access_link.rician_k),
          backhaul_fn_(sc.backhaul_link.rician_k), allocator_(access_fn_, constraints),
          slot_count_(sc.slot_count()) {
        sc_.validate();
        if (slot_count_ == 0) throw std::invalid_argument("scenario has no service slots");
        const double t0 = sc.vessel_track.start_time();
        vessel_mid_.reserve(slot_count_);
        for (std::size_t n = 0; n < slot_count_; ++n)
            vessel_mid_.push_back(
                vessel_position(sc.vessel_track, t0 + (double(n) + 0.5) * constraints.slot_s));
        p_max_mw_ = dbm_to_mw(constraints.p_max_dbm);
    }

    std::size_t slot_count() const { return slot_count_; }
    const Scenario& scenario() const { return sc_; }
    const ConstraintSet& constraints() const { return constraints_; }
    const ErgodicRateFn& access_fn() const { return access_fn_; }
    const std::vector<Vec3>& waypoints() const { return waypoints_; }

    SlotState compute_slot(std::size_t n, const Vec3& q0, const Vec3& q1) const {
        SlotState state;
        const Vec3 uav = midpoint(q0, q1);
        const LinkBudget access =
            mean_snr(0.0, uav, vessel_mid_[n], sc_.access_link, &sc_.radio_map);
        state.g_access = access.mean_snr_linear;
        state.inv_g = 1.0 / state.g_access;
        const LinkBudget feeder =
            mean_snr(sc_.tbs_power_dbm, sc_.tbs_position, uav, sc_.backhaul_link, &sc_.radio_map);
        state.backhaul_rate = backhaul_fn_(feeder.mean_snr_linear);
        const double cap_dbm =
            std::min(constraints_.p_max_dbm, interference_power_cap_dbm(uav, sc_));
        state.p_cap_mw = dbm_to_mw(cap_dbm);
        return state;
    }

    void set_waypoints(std::vector<Vec3> waypoints) {
        if (waypoints.size() != slot_count_ + 1)
            throw std::invalid_argument("waypoint count must be slot count + 1");
        waypoints_ = std::move(waypoints);
        slots_.resize(slot_count_);
        sum_inv_g_ = 0.0;
        for (std::size_t n = 0; n < slot_count_; ++n) {
            slots_[n] = compute_slot(n, waypoints_[n], waypoints_[n + 1]);
            sum_inv_g_ += slots_[n].inv_g;
        }
        current_snr_ = allocate();
    }

    double current_rate() const { return access_fn_(current_snr_); }

    // Evaluates the current waypoint set with slots [lo, hi) replaced by
    // `patch`, without committing anything.
    double probe(std::size_t lo, std::size_t hi, std::span<const SlotState> patch,
                 double* snr_out) const {
        double min_gp = std::numeric_limits<double>::infinity();
        double min_bh = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (std::size_t n = 0; n < slot_count_; ++n) {
            const SlotState& s = (n >= lo && n < hi) ? patch[n - lo] : slots_[n];
            min_gp = std::min(min_gp, s.g_access * s.p_cap_mw);
            min_bh = std::min(min_bh, s.backhaul_rate);
            sum += s.inv_g;
        }
        const double snr = allocator_.max_common_snr(min_gp, sum, min_bh);
        if (snr_out != nullptr) *snr_out = snr;
        return access_fn_(snr);
    }

    void commit(std::size_t lo, std::size_t hi, std::span<const SlotState> patch, double snr) {
        for (std::size_t n = lo; n < hi; ++n) {
            sum_inv_g_ += patch[n - lo].inv_g - slots_[n].inv_g;
            slots_[n] = patch[n - lo];
        }
        current_snr_ = snr;
    }

    void set_waypoints_committed(std::vector<Vec3> waypoints, std::size_t lo, std::size_t hi,
                                 std::span<const SlotState> patch, double snr) {
        waypoints_ = std::move(waypoints);
        commit(lo, hi, patch, snr);
    }

    double allocate() {
        double min_gp = std::numeric_limits<double>::infinity();
        double min_bh = std::numeric_limits<double>::infinity();
        sum_inv_g_ = 0.0;
        for (const SlotState& s : slots_) {
            min_gp = std::min(min_gp, s.g_access * s.p_cap_mw);
            min_bh = std::min(min_bh, s.backhaul_rate);
            sum_inv_g_ += s.inv_g;
        }
        return allocator_.max_common_snr(min_gp, sum_inv_g_, min_bh);
    }

    TrajectoryPlan assemble(std::vector<double> objective_trace) const {
        TrajectoryPlan plan;
        plan.waypoints = waypoints_;
        plan.objective_trace = std::move(objective_trace);
        plan.powers_dbm.resize(slot_count_);
        plan.access_rate.resize(slot_count_);
        plan.backhaul_rate.resize(slot_count_);
        plan.interference_dbm.resize(slot_count_);
        for (std::size_t n = 0; n < slot_count_; ++n) {
            const double p_mw = current_snr_ * slots_[n].inv_g;
            plan.powers_dbm[n] = mw_to_dbm(p_mw);
            plan.access_rate[n] = access_fn_(slots_[n].g_access * p_mw);
            plan.backhaul_rate[n] = slots_[n].backhaul_rate;
            const Vec3 uav = midpoint(waypoints_[n], waypoints_[n + 1]);
            plan.interference_dbm[n] =
                plan.powers_dbm[n] + sc_.interference_link.tx_gain_dbi +
                sc_.interference_link.rx_gain_dbi -
                path_loss_db(distance(uav, sc_.sat_user_position), sc_.interference_link);
        }
        plan.energy_used_j = energy_used_j(plan.powers_dbm, constraints_.slot_s);
        plan.min_rate = current_rate();
        return plan;
    }

    // Per-slot rate for explicit powers (baseline post-processing): access
    // rate capped by the backhaul ceiling.
    double delivered_rate(std::size_t n, double p_mw) const {
        const double access = access_fn_(slots_[n].g_access * p_mw);
        return constraints_.backhaul_enabled ? std::min(access, slots_[n].backhaul_rate) : access;
    }

    const SlotState& slot(std::size_t n) const { return slots_[n]; }
    const Vec3& vessel_mid(std::size_t n) const { return vessel_mid_[n]; }
    double p_max_mw() const { return p_max_mw_; }

private:
    Scenario sc_;
    ConstraintSet constraints_;
    ErgodicRateFn access_fn_;
    ErgodicRateFn backhaul_fn_;
    Allocator allocator_;
    std::size_t slot_count_;
    std::vector<Vec3> vessel_mid_;
    std::vector<Vec3> waypoints_;
    std::vector<SlotState> slots_;
    double sum_inv_g_ = 0.0;
    double current_snr_ = 0.0;
    double p_max_mw_ = 0.0;
};

// Fixed-wing racetrack: a stadium-shaped cycle flown in the frame of the
// moving vessel, entered directly overhead. The relative speed along the
// pattern is chosen per slot so the ground speed stays at a constant
// mid-envelope value regardless of heading.
inline std::vector<Vec3> loiter_waypoints(const Scenario& sc, const ConstraintSet& constraints,
                                          std::size_t slots) {
    const UAVLimits& lim = sc.uav_limits;
    const double ground_speed = 0.5 * (lim.v_min_ms + lim.v_max_ms);
    const Vec3 start = vessel_position(sc.vessel_track, sc.vessel_track.start_time());
    const Vec3 end = vessel_position(sc.vessel_track, sc.vessel_track.end_time());
    const double span = sc.vessel_track.span_s();
    const Vec3 vs = (end - start) / span; // vessel velocity (constant lanes)

    // Stadium: straights of half-length half_l parallel to the lane, turn
    // radius sized so centripetal acceleration stays well under a_max.
    const double max_rel = ground_speed + vs.norm();
    const double radius = std::max(600.0, 1.25 * max_rel * max_rel /
                                              std::max(lim.a_max_ms2, 0.5));
    const double half_l = radius;
    const double perimeter = 4.0 * half_l + 2.0 * 3.14159265358979323846 * radius;

    // Relative position/tangent at arc position s, pattern entered at (0, 0)
    // heading +x, circulating clockwise (away from the +y side).
    auto stadium = [&](double s, Vec3& rel, Vec3& tangent) {
        s = std::fmod(s, perimeter);
        if (s < 0) s += perimeter;
        const double pi = 3.14159265358979323846;
        if (s < half_l) { // top straight, +x
            rel = {s, 0.0, 0.0};
            tangent = {1.0, 0.0, 0.0};
        } else if (s < half_l + pi * radius) { // right turn
            const double a = (s - half_l) / radius;
            rel = {half_l + radius * std::sin(a), -radius * (1.0 - std::cos(a)), 0.0};
            tangent = {std::cos(a), -std::sin(a), 0.0};
        } else if (s < 3.0 * half_l + pi * radius) { // bottom straight, -x
            const double d = s - (half_l + pi * radius);
            rel = {half_l - d, -2.0 * radius, 0.0};
            tangent = {-1.0, 0.0, 0.0};
        } else { // left turn
            const double a = (s - (3.0 * half_l + pi * radius)) / radius;
            rel = {-half_l - radius * std::sin(a), -2.0 * radius + radius * (1.0 - std::cos(a)),
                   0.0};
            tangent = {-std::cos(a), std::sin(a), 0.0};
        }
    };

    std::vector<Vec3> waypoints;
    waypoints.reserve(slots + 1);
    double s = 0.0;
    const double t0 = sc.vessel_track.start_time();
    for (std::size_t n = 0; n <= slots; ++n) {
        Vec3 rel, tangent;
        stadium(s, rel, tangent);
        const Vec3 vessel = vessel_position(sc.vessel_track, t0 + double(n) * constraints.slot_s);
        waypoints.push_back({vessel.x + rel.x, vessel.y + rel.y, lim.alt_min_m});
        // Relative speed giving |u*tangent + vs| = ground_speed.
        const double along = tangent.dot(vs);
        const double disc = along * along + ground_speed * ground_speed - vs.dot(vs);
        const double u = -along + std::sqrt(std::max(disc, 0.0));
        s += u * constraints.slot_s;
    }
    return waypoints;
}

// Constant-velocity pursuit along the lane at the slowest admissible speed.
inline std::vector<Vec3> chase_waypoints(const Scenario& sc, const ConstraintSet& constraints,
                                         std::size_t slots) {
    const UAVLimits& lim = sc.uav_limits;
    const Vec3 start = vessel_position(sc.vessel_track, sc.vessel_track.start_time());
    const Vec3 end = vessel_position(sc.vessel_track, sc.vessel_track.end_time());
    Vec3 dir = end - start;
    dir.z = 0.0;
    const double len = dir.norm();
    dir = len > 0.0 ? dir / len : Vec3{1.0, 0.0, 0.0};
    const double speed = std::clamp(sc.vessel_track.speed_ms, lim.v_min_ms, lim.v_max_ms);
    std::vector<Vec3> waypoints;
    waypoints.reserve(slots + 1);
    for (std::size_t n = 0; n <= slots; ++n) {
        const Vec3 p = start + dir * (speed * double(n) * constraints.slot_s);
        waypoints.push_back({p.x, p.y, lim.alt_min_m});
    }
    return waypoints;
}

} // namespace detail

/// Globally optimal max-min power allocation for a fixed trajectory: the
/// common per-slot rate is pushed up until the tightest of the power-cap,
/// energy and backhaul constraints binds (the exact limit of bisection on the
/// target rate). Returns the witnessing powers.
inline PowerAllocation allocate_power(std::span<const Vec3> waypoints, const Scenario& sc,
                                      const ConstraintSet& constraints) {
    Scenario scenario = sc;
    scenario.p_max_dbm = constraints.p_max_dbm;
    scenario.energy_j = std::isfinite(constraints.energy_j) ? constraints.energy_j : 1.0;
    scenario.interference_limit_dbm = constraints.interference_limit_dbm;
    detail::PlanEngine engine(scenario, constraints);
    if (waypoints.size() != engine.slot_count() + 1)
        throw std::invalid_argument("allocate_power: waypoint count must be slot count + 1");
    engine.set_waypoints(std::vector<Vec3>(waypoints.begin(), waypoints.end()));
    TrajectoryPlan plan = engine.assemble({});
    return {plan.powers_dbm, plan.min_rate, plan.energy_used_j};
}

/// Joint trajectory + power optimization: deterministic coordinate pattern
/// search over waypoints (single moves plus tail translations, step halving
/// 64 m -> 8 m), re-allocating power exactly at every candidate and accepting
/// only strict objective improvements. The first waypoint is pinned directly
/// above the vessel's start position at the minimum altitude; the terminal
/// waypoint is free. Throws InfeasibleError when no admissible initial
/// trajectory exists.
inline TrajectoryPlan plan_trajectory(const Scenario& sc, const ConstraintSet& constraints,
                                      TrajectoryInit init = TrajectoryInit::overhead_loiter) {
    Scenario scenario = sc;
    scenario.p_max_dbm = constraints.p_max_dbm;
    scenario.interference_limit_dbm = constraints.interference_limit_dbm;
    if (std::isfinite(constraints.energy_j)) scenario.energy_j = constraints.energy_j;
    detail::PlanEngine engine(scenario, constraints);
    const std::size_t slots = engine.slot_count();

    std::vector<Vec3> waypoints =
        (init == TrajectoryInit::overhead_loiter)
            ? detail::loiter_waypoints(scenario, constraints, slots)
            : detail::chase_waypoints(scenario, constraints, slots);
    {
        const KinematicsReport report =
            kinematics_check(waypoints, constraints.slot_s, scenario.uav_limits);
        if (!report.ok)
            throw InfeasibleError("no feasible initial trajectory: " + report.message);
    }
    engine.set_waypoints(std::move(waypoints));

    std::vector<double> trace{engine.current_rate()};

    const UAVLimits& lim = scenario.uav_limits;
    const Vec3 dirs[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    constexpr std::size_t kSuffixStride = 3; // tail translations anchored every 3rd waypoint
    constexpr int kMaxSweeps = 50;
    constexpr double kImproveTol = 1e-3;

    std::vector<detail::SlotState> patch(slots);
    std::vector<Vec3> work; // mutated in place, undone on reject

    double step = 64.0;
    double rate = engine.current_rate();
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double sweep_start_rate = rate;
        work = engine.waypoints();
        for (std::size_t k = 1; k <= slots; ++k) {
            // Candidate moves at waypoint k: 6 single-point steps, then (on
            // stride anchors) 4 horizontal translations of the whole tail
            // k..N, which is how the pattern migrates long distances without
            // violating the speed envelope.
            const bool suffix_anchor = ((k - 1) % kSuffixStride) == 0;
            int best_move = -1;
            double best_rate = rate;
            double best_snr = 0.0;

            for (int move = 0; move < (suffix_anchor ? 10 : 6); ++move) {
                const bool suffix = move >= 6;
                const Vec3 delta = dirs[suffix ? (move - 6) : move] * step;
                const std::size_t tail_end = suffix ? slots : k;
                for (std::size_t j = k; j <= tail_end; ++j) {
                    work[j] += delta;
                    work[j].z = std::clamp(work[j].z, lim.alt_min_m, lim.alt_max_m);
                }
                const std::size_t lo = k - 1;
                const std::size_t hi = suffix ? slots : std::min(k + 1, slots);
                bool admissible = kinematics_check(work, constraints.slot_s, lim).ok;
                if (admissible) {
                    for (std::size_t n = lo; n < hi; ++n)
                        patch[n - lo] = engine.compute_slot(n, work[n], work[n + 1]);
                    double snr = 0.0;
                    const double cand_rate =
                        engine.probe(lo, hi, {patch.data(), hi - lo}, &snr);
                    if (cand_rate > best_rate + 1e-12) {
                        best_rate = cand_rate;
                        best_snr = snr;
                        best_move = move;
                    }
                }
                // Undo; the best move is re-applied below.
                for (std::size_t j = k; j <= tail_end; ++j) {
                    work[j] = engine.waypoints()[j];
                }
            }

            if (best_move >= 0) {
                const bool suffix = best_move >= 6;
                const Vec3 delta = dirs[suffix ? (best_move - 6) : best_move] * step;
                const std::size_t tail_end = suffix ? slots : k;
                std::vector<Vec3> next = engine.waypoints();
                for (std::size_t j = k; j <= tail_end; ++j) {
                    next[j] += delta;
                    next[j].z = std::clamp(next[j].z, lim.alt_min_m, lim.alt_max_m);
                }
                const std::size_t lo = k - 1;
                const std::size_t hi = suffix ? slots : std::min(k + 1, slots);
                for (std::size_t n = lo; n < hi; ++n)
                    patch[n - lo] = engine.compute_slot(n, next[n], next[n + 1]);
                engine.set_waypoints_committed(std::move(next), lo, hi,
                                               {patch.data(), hi - lo}, best_snr);
                rate = best_rate;
                work = engine.waypoints();
            }
        }
        trace.push_back(rate);
        if (rate - sweep_start_rate < kImproveTol) {
            if (step <= 8.0) break;
            step *= 0.5;
        }
    }

    return engine.assemble(std::move(trace));
}

/// Worst-slot rate of the direct shore service: the TBS transmits at its
/// fixed power to the vessel with no optimization variables. Beyond-horizon
/// excess applies through the direct link parameters.
inline double baseline_shore(const Scenario& sc) {
    sc.validate();
    const std::size_t slots = sc.slot_count();
    const ErgodicRateFn rate_fn(sc.direct_link.rician_k);
    const double t0 = sc.vessel_track.start_time();
    double min_rate = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < slots; ++n) {
        const Vec3 vessel = vessel_position(sc.vessel_track, t0 + (double(n) + 0.5) * sc.slot_s);
        const LinkBudget budget =
            mean_snr(sc.tbs_power_dbm, sc.tbs_position, vessel, sc.direct_link, &sc.radio_map);
        min_rate = std::min(min_rate, rate_fn(budget.mean_snr_linear));
    }
    return min_rate;
}

/// Terrestrial-style comparison: plans as if interference and energy
/// constraints did not exist, then clips each slot's power to the true caps
/// and uniformly rescales if the energy budget is exceeded. The degraded
/// rates show what ignoring maritime spectrum sharing costs.
inline TrajectoryPlan baseline_terrestrial(const Scenario& sc, const ConstraintSet& constraints,
                                           TrajectoryInit init = TrajectoryInit::overhead_loiter) {
    ConstraintSet relaxed = constraints;
    relaxed.energy_j = std::numeric_limits<double>::infinity();
    relaxed.interference_limit_dbm = std::numeric_limits<double>::infinity();
    TrajectoryPlan plan = plan_trajectory(sc, relaxed, init);

    Scenario scenario = sc;
    scenario.p_max_dbm = constraints.p_max_dbm;
    scenario.interference_limit_dbm = constraints.interference_limit_dbm;
    if (std::isfinite(constraints.energy_j)) scenario.energy_j = constraints.energy_j;
    detail::PlanEngine engine(scenario, constraints);
    engine.set_waypoints(plan.waypoints);

    const std::size_t slots = plan.slots();
    std::vector<double> p_mw(slots);
    for (std::size_t n = 0; n < slots; ++n)
        p_mw[n] = std::min(dbm_to_mw(plan.powers_dbm[n]), engine.slot(n).p_cap_mw);
    double energy = 0.0;
    for (std::size_t n = 0; n < slots; ++n) energy += p_mw[n] * 1e-3 * constraints.slot_s;
    if (std::isfinite(constraints.energy_j) && energy > constraints.energy_j) {
        const double scale = constraints.energy_j / energy;
        for (double& p : p_mw) p *= scale;
    }

    plan.min_rate = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < slots; ++n) {
        plan.powers_dbm[n] = mw_to_dbm(p_mw[n]);
        plan.access_rate[n] = engine.delivered_rate(n, p_mw[n]);
        plan.backhaul_rate[n] = engine.slot(n).backhaul_rate;
        const Vec3 uav = midpoint(plan.waypoints[n], plan.waypoints[n + 1]);
        plan.interference_dbm[n] =
            plan.powers_dbm[n] + sc.interference_link.tx_gain_dbi +
            sc.interference_link.rx_gain_dbi -
            path_loss_db(distance(uav, sc.sat_user_position), sc.interference_link);
        plan.min_rate = std::min(plan.min_rate, plan.access_rate[n]);
    }
    plan.energy_used_j = energy_used_j(plan.powers_dbm, constraints.slot_s);
    return plan;
}

/// Candidate sets for the exhaustive oracle: waypoint candidates for indices
/// 1..N (index 0 is the pinned start) and a uniform linear power grid.
struct ExhaustiveGrids {
    std::vector<std::vector<Vec3>> candidates;
    std::size_t power_levels = 50;
};

struct ExhaustiveResult {
    double min_rate = 0.0;
    TrajectoryPlan plan;
    std::size_t feasible_trajectories = 0;
};

/// Exact enumeration of every trajectory/power combination on small grids.
/// Verification oracle only; guarded to N <= 4 slots, <= 8 candidates per
/// waypoint and <= 64 power levels.
inline ExhaustiveResult oracle_exhaustive(const Scenario& sc, const ConstraintSet& constraints,
                                          const ExhaustiveGrids& grids) {
    Scenario scenario = sc;
    scenario.p_max_dbm = constraints.p_max_dbm;
    scenario.interference_limit_dbm = constraints.interference_limit_dbm;
    if (std::isfinite(constraints.energy_j)) scenario.energy_j = constraints.energy_j;
    detail::PlanEngine engine(scenario, constraints);
    const std::size_t slots = engine.slot_count();
    if (slots > 4) throw std::invalid_argument("oracle_exhaustive: more than 4 slots");
    if (grids.candidates.size() != slots)
        throw std::invalid_argument("oracle_exhaustive: need one candidate set per free waypoint");
    for (const auto& set : grids.candidates)
        if (set.empty() || set.size() > 8)
            throw std::invalid_argument("oracle_exhaustive: candidate sets must have 1..8 entries");
    if (grids.power_levels < 2 || grids.power_levels > 64)
        throw std::invalid_argument("oracle_exhaustive: power levels must be in [2, 64]");

    const Vec3 start_vessel = vessel_position(scenario.vessel_track,
                                              scenario.vessel_track.start_time());
    const Vec3 pinned_start{start_vessel.x, start_vessel.y, scenario.uav_limits.alt_min_m};
    const double p_max_mw = dbm_to_mw(constraints.p_max_dbm);
    const std::size_t levels = grids.power_levels;

    ExhaustiveResult result;
    result.min_rate = -1.0;
    std::vector<std::size_t> choice(slots, 0);
    std::vector<Vec3> waypoints(slots + 1);
    std::vector<detail::SlotState> state(slots);
    std::vector<std::vector<double>> rate_table(slots); // per slot, per level
    std::vector<double> level_mw(levels);
    for (std::size_t l = 0; l < levels; ++l)
        level_mw[l] = p_max_mw * double(l) / double(levels - 1);

    const ErgodicRateFn& access_fn = engine.access_fn();
    bool done = false;
    while (!done) {
        waypoints[0] = pinned_start;
        for (std::size_t i = 0; i < slots; ++i)
            waypoints[i + 1] = grids.candidates[i][choice[i]];
        if (kinematics_check(waypoints, constraints.slot_s, scenario.uav_limits).ok) {
            ++result.feasible_trajectories;
            for (std::size_t n = 0; n < slots; ++n) {
                state[n] = engine.compute_slot(n, waypoints[n], waypoints[n + 1]);
                rate_table[n].assign(levels, -1.0);
                for (std::size_t l = 0; l < levels; ++l) {
                    if (level_mw[l] > state[n].p_cap_mw * (1.0 + 1e-12)) break; // levels ascend
                    const double access = access_fn(state[n].g_access * level_mw[l]);
                    rate_table[n][l] = constraints.backhaul_enabled
                                           ? std::min(access, state[n].backhaul_rate)
                                           : access;
                }
            }
            // Enumerate power-level combinations.
            std::vector<std::size_t> pl(slots, 0);
            bool pdone = false;
            while (!pdone) {
                double energy = 0.0;
                double min_rate = std::numeric_limits<double>::infinity();
                bool admissible = true;
                for (std::size_t n = 0; n < slots; ++n) {
                    if (rate_table[n][pl[n]] < 0.0) {
                        admissible = false;
                        break;
                    }
                    energy += level_mw[pl[n]] * 1e-3 * constraints.slot_s;
                    min_rate = std::min(min_rate, rate_table[n][pl[n]]);
                }
                if (admissible && std::isfinite(constraints.energy_j) &&
                    energy > constraints.energy_j)
                    admissible = false;
                if (admissible && min_rate > result.min_rate) {
                    result.min_rate = min_rate;
                    result.plan.waypoints = waypoints;
                    result.plan.powers_dbm.resize(slots);
                    result.plan.access_rate.resize(slots);
                    result.plan.backhaul_rate.resize(slots);
                    result.plan.interference_dbm.resize(slots);
                    for (std::size_t n = 0; n < slots; ++n) {
                        result.plan.powers_dbm[n] = mw_to_dbm(level_mw[pl[n]]);
                        result.plan.access_rate[n] = rate_table[n][pl[n]];
                        result.plan.backhaul_rate[n] = state[n].backhaul_rate;
                        const Vec3 uav = midpoint(waypoints[n], waypoints[n + 1]);
                        result.plan.interference_dbm[n] =
                            result.plan.powers_dbm[n] + scenario.interference_link.tx_gain_dbi +
                            scenario.interference_link.rx_gain_dbi -
                            path_loss_db(distance(uav, scenario.sat_user_position),
                                         scenario.interference_link);
                    }
                    result.plan.min_rate = min_rate;
                    result.plan.energy_used_j =
                        energy_used_j(result.plan.powers_dbm, constraints.slot_s);
                }
                pdone = true;
                for (std::size_t n = 0; n < slots; ++n) {
                    if (++pl[n] < levels) {
                        pdone = false;
                        break;
                    }
                    pl[n] = 0;
                }
            }
        }
        done = true;
        for (std::size_t i = 0; i < slots; ++i) {
            if (++choice[i] < grids.candidates[i].size()) {
                done = false;
                break;
            }
            choice[i] = 0;
        }
    }
    if (result.min_rate < 0.0)
        throw InfeasibleError("oracle_exhaustive: no kinematically feasible trajectory in grid");
    return result;
}

// --- plan CSV export -------------------------------------------------------

inline constexpr const char* kPlanCsvHeader =
    "slot,t_s,x,y,z,power_dbm,access_rate,backhaul_rate,interference_dbm";

/// Rows 0..N-1 carry slot metrics with the slot's starting waypoint; the
/// final row N carries the terminal waypoint with empty metric fields. The
/// leading comment is the summary line.
inline void write_plan_csv(std::ostream& os, const TrajectoryPlan& plan, double slot_s) {
    os << "# min_rate_bpshz=" << csv::format_double(plan.min_rate)
       << ",energy_used_j=" << csv::format_double(plan.energy_used_j) << "\n";
    os << kPlanCsvHeader << "\n";
    for (std::size_t n = 0; n < plan.waypoints.size(); ++n) {
        const Vec3& q = plan.waypoints[n];
        os << n << "," << csv::format_double(double(n) * slot_s) << ","
           << csv::format_double(q.x) << "," << csv::format_double(q.y) << ","
           << csv::format_double(q.z);
        if (n < plan.slots()) {
            os << "," << csv::format_double(plan.powers_dbm[n]) << ","
               << csv::format_double(plan.access_rate[n]) << ","
               << csv::format_double(plan.backhaul_rate[n]) << ","
               << csv::format_double(plan.interference_dbm[n]);
        } else {
            os << ",,,,";
        }
        os << "\n";
    }
}

inline TrajectoryPlan read_plan_csv(std::istream& in) {
    TrajectoryPlan plan;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        line = csv::strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto min_pos = line.find("min_rate_bpshz=");
            const auto energy_pos = line.find("energy_used_j=");
            if (min_pos != std::string::npos) {
                const auto end = line.find(',', min_pos);
                plan.min_rate =
                    csv::parse_double(line.substr(min_pos + 15, end - (min_pos + 15))).value_or(0.0);
            }
            if (energy_pos != std::string::npos)
                plan.energy_used_j = csv::parse_double(line.substr(energy_pos + 14)).value_or(0.0);
            continue;
        }
        if (!header_seen) {
            csv::expect_header(line, kPlanCsvHeader, "plan CSV");
            header_seen = true;
            continue;
        }
        const auto f = csv::split(line);
        if (f.size() != 9) throw ConfigError("plan CSV: malformed row '" + line + "'");
        const auto x = csv::parse_double(f[2]);
        const auto y = csv::parse_double(f[3]);
        const auto z = csv::parse_double(f[4]);
        if (!x || !y || !z) throw ConfigError("plan CSV: malformed row '" + line + "'");
        plan.waypoints.push_back({*x, *y, *z});
        if (!f[5].empty()) {
            const auto p = csv::parse_double(f[5]);
            const auto ar = csv::parse_double(f[6]);
            const auto br = csv::parse_double(f[7]);
            const auto ib = csv::parse_double(f[8]);
            if (!p || !ar || !br || !ib) throw ConfigError("plan CSV: malformed row '" + line + "'");
            plan.powers_dbm.push_back(*p);
            plan.access_rate.push_back(*ar);
            plan.backhaul_rate.push_back(*br);
            plan.interference_dbm.push_back(*ib);
        }
    }
    if (!header_seen) throw ConfigError("plan CSV: missing header");
    if (plan.waypoints.size() != plan.powers_dbm.size() + 1)
        throw ConfigError("plan CSV: waypoint/slot count mismatch");
    return plan;
}

} // namespace pelagic
