#pragma once

/**
 * @file time_machine.hpp
 * @brief Accelerated-mouth (time machine) bias schedule and twin-paradox budget.
 *
 * The travelling mouth multiplies the lapse by (1 + g(t) l F(l) / c^2), with
 * F(l) = l / l0 on 0 < l <= l0 and 0 elsewhere. After the conformal pull-out
 * the bias becomes
 *
 *   phi(x, t) = (phi0 / pi) arccos[(1 - b/r) (1 + g(t) l F(l) / c^2)^2].
 *
 * g l / c^2 is the dimensionless group; it is also what the geometry
 * preservation bound 2 |g| l0 / c^2 << 1 constrains.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "wormsim/constants.hpp"
#include "wormsim/errors.hpp"
#include "wormsim/spacetime.hpp"
#include "wormsim/squid_array.hpp"

namespace wormsim {

struct AccelerationSegment {
    double duration = 0.0;  // s
    double g = 0.0;         // proper acceleration, m/s^2
};

/// Largest allowed 2 |g| l0 / c^2.
inline constexpr double geometry_preservation_cap = 0.1;

struct TimeMachineConfig {
    double l0 = 0.2e-3;  // form-factor support, m
    std::vector<AccelerationSegment> schedule;
    double ramp_time = 0.0;  // raised-cosine transition length, s; 0 = instantaneous

    void validate(double c_base) const {
        if (!(l0 > 0.0) || !std::isfinite(l0)) throw ConfigError("time_machine.l0_m", "must be > 0");
        if (!(ramp_time >= 0.0) || !std::isfinite(ramp_time))
            throw ConfigError("time_machine.ramp_time_s", "must be >= 0");
        for (std::size_t i = 0; i < schedule.size(); ++i) {
            const std::string at = "time_machine.schedule[" + std::to_string(i) + "]";
            const auto& seg = schedule[i];
            if (!(seg.duration > 0.0) || !std::isfinite(seg.duration))
                throw ConfigError(at + ".duration_s", "must be > 0");
            if (!std::isfinite(seg.g)) throw ConfigError(at + ".g_m_per_s2", "must be finite");
            const double group = 2.0 * std::abs(seg.g) * l0 / (c_base * c_base);
            if (group > geometry_preservation_cap * (1.0 + 1e-12))
                throw ConfigError(at + ".g_m_per_s2",
                                  "2|g|l0/c^2 = " + std::to_string(group) +
                                      " exceeds 0.1; the throat geometry would not be preserved");
            if (ramp_time > seg.duration)
                throw ConfigError("time_machine.ramp_time_s", "longer than a schedule segment");
        }
    }

    [[nodiscard]] double total_duration() const noexcept {
        double t = 0.0;
        for (const auto& s : schedule) t += s.duration;
        return t;
    }

    /// g(t). Zero before the schedule starts; each transition (including the
    /// final return to zero) begins at the boundary and lasts ramp_time.
    [[nodiscard]] double g_at(double t) const noexcept {
        if (t < 0.0) return 0.0;
        double start = 0.0;
        double previous = 0.0;
        for (const auto& seg : schedule) {
            if (t < start + seg.duration) return blend(previous, seg.g, t - start);
            start += seg.duration;
            previous = seg.g;
        }
        return blend(previous, 0.0, t - start);
    }

    /// Distinct accelerations that appear in the schedule, plus 0.
    [[nodiscard]] std::vector<double> distinct_accelerations() const {
        std::set<double> gs{0.0};
        for (const auto& s : schedule) gs.insert(s.g);
        return {gs.begin(), gs.end()};
    }

private:
    [[nodiscard]] double blend(double from, double to, double since) const noexcept {
        if (ramp_time <= 0.0 || since >= ramp_time) return to;
        return from + (to - from) * 0.5 * (1.0 - std::cos(pi * since / ramp_time));
    }
};

/// F(l) = l / l0 on (0, l0], 0 elsewhere.
[[nodiscard]] inline double form_factor(double l, const TimeMachineConfig& tm) noexcept {
    return (l > 0.0 && l <= tm.l0) ? l / tm.l0 : 0.0;
}

/// Bias for a fixed acceleration g.
[[nodiscard]] inline double tm_flux_for_g(double x, double g, const WormholeGeometry& geom,
                                          const TimeMachineConfig& tm, const PhysicalConstants& k = {}) {
    const double l = proper_distance_l(x, geom);
    const double f = form_factor(l, tm);
    if (f == 0.0 || g == 0.0) return synthesize_flux_at(x, geom, k);

    const double lapse = 1.0 + g * l * f / (geom.c_base * geom.c_base);
    const double arg = openness(geom.shape, std::abs(x)) * lapse * lapse;
    if (arg > 1.0)
        throw RepresentabilityError("tm_flux: superluminal region not representable (argument " +
                                    std::to_string(arg) + " > 1 at x = " + std::to_string(x) + " m)");
    if (!(arg >= 0.0)) throw RepresentabilityError("tm_flux: negative arccos argument");
    return k.flux_quantum() / pi * std::acos(arg);
}

[[nodiscard]] inline double tm_flux(double x, double t, const WormholeGeometry& geom,
                                    const TimeMachineConfig& tm, const PhysicalConstants& k = {}) {
    return tm_flux_for_g(x, tm.g_at(t), geom, tm, k);
}

/// Time-machine bias profile on the physical grid at time t.
[[nodiscard]] inline FluxProfile discretize_profile(const WormholeGeometry& geom, const ArrayConfig& cfg,
                                                    double extent, const TimeMachineConfig& tm, double t,
                                                    const PhysicalConstants& k = {}) {
    geom.validate();
    tm.validate(geom.c_base);
    ProfileProvenance prov;
    prov.b0 = geom.b0();
    prov.c_base = geom.c_base;
    prov.time_machine = true;
    prov.l0 = tm.l0;
    prov.g = tm.g_at(t);
    prov.t = t;
    prov.label = "time_machine";
    const double g = prov.g;
    return discretize_with([&](double x) { return tm_flux_for_g(x, g, geom, tm, k); }, cfg, extent,
                           std::move(prov), k);
}

// ---------------------------------------------------------------------------
//  Kinematics
// ---------------------------------------------------------------------------

/// v = g T_a / sqrt(1 + (g T_a / c)^2)
[[nodiscard]] inline double mouth_velocity(double g, double T_a, double c_base = default_c_base) {
    if (!(T_a >= 0.0)) throw DomainError("mouth_velocity: T_a must be >= 0");
    const double u = g * T_a;
    return u / std::sqrt(1.0 + (u / c_base) * (u / c_base));
}

/// gamma = sqrt(1 + (g T_a / c)^2)
[[nodiscard]] inline double gamma_factor(double g, double T_a, double c_base = default_c_base) {
    if (!(T_a >= 0.0)) throw DomainError("gamma_factor: T_a must be >= 0");
    const double q = g * T_a / c_base;
    return std::sqrt(1.0 + q * q);
}

/// shift = T (1 - 1/gamma)
[[nodiscard]] inline double time_shift(double T_total, double gamma) {
    if (!(T_total >= 0.0)) throw DomainError("time_shift: T must be >= 0");
    if (!(gamma >= 1.0)) throw DomainError("time_shift: gamma must be >= 1");
    return T_total - T_total / gamma;
}

/// Largest |gamma v| (proper velocity) reached over the schedule. For
/// hyperbolic motion gamma v grows by g dt, so it is the running integral of g(t).
[[nodiscard]] inline double peak_proper_velocity(const TimeMachineConfig& tm) {
    double u = 0.0;
    double peak = 0.0;
    double previous = 0.0;
    const double ramp = tm.ramp_time;

    auto run = [&](double from, double to, double duration) {
        if (ramp > 0.0) {
            // Raised-cosine transition; u can turn around inside it where g crosses zero.
            if (from * to < 0.0) {
                const double frac = from / (from - to);
                const double s = ramp / pi * std::acos(1.0 - 2.0 * frac);
                const double u_turn =
                    u + from * s + (to - from) * 0.5 * (s - ramp / pi * std::sin(pi * s / ramp));
                peak = std::max(peak, std::abs(u_turn));
            }
            u += from * ramp + (to - from) * 0.5 * ramp;
            u += to * (duration - ramp);
        } else {
            u += to * duration;
        }
        peak = std::max(peak, std::abs(u));
    };

    for (const auto& seg : tm.schedule) {
        run(previous, seg.g, seg.duration);
        previous = seg.g;
    }
    if (ramp > 0.0) run(previous, 0.0, ramp);
    return peak;
}

struct TimeShiftBudget {
    double gamma = 1.0;
    double mouth_velocity = 0.0;  // m/s, at peak gamma
    double shift = 0.0;           // s
    double traversal = 0.0;       // s, ray time from -x0 to x0
    bool ctc_possible = false;
};

/// Twin-paradox budget: peak gamma from the schedule, the resulting shift
/// over T_total, and the ray traversal time across [-x0, x0].
[[nodiscard]] inline TimeShiftBudget ctc_budget(const WormholeGeometry& geom, const TimeMachineConfig& tm,
                                                const ArrayConfig& cfg, double T_total, double x0,
                                                const PhysicalConstants& k = {}) {
    geom.validate();
    tm.validate(geom.c_base);
    cfg.validate();
    if (!(x0 > 0.0)) throw ConfigError("time_machine.x0_m", "must be > 0");

    // Every scheduled bias must be realizable on the grid spanning the region.
    const double l0_x = std::sqrt(geom.b0() * geom.b0() + tm.l0 * tm.l0) - geom.b0();
    const double extent = std::max(x0, l0_x) + cfg.d;
    ArrayConfig grid = cfg;
    grid.N = 0;
    for (double g : tm.distinct_accelerations()) {
        for (double x : squid_positions(grid, squid_count(grid, extent))) {
            (void)tm_flux_for_g(x, g, geom, tm, k);
        }
        (void)tm_flux_for_g(l0_x, g, geom, tm, k);
    }

    TimeShiftBudget b;
    const double u = peak_proper_velocity(tm);
    b.gamma = std::sqrt(1.0 + (u / geom.c_base) * (u / geom.c_base));
    b.mouth_velocity = u / b.gamma;
    b.shift = time_shift(T_total, b.gamma);
    b.traversal = traversal_time(-x0, x0, geom).elapsed;
    b.ctc_possible = b.shift > b.traversal;
    return b;
}

/// The twin-paradox schedule used in the worked example: accelerate for T_a,
/// coast, turn around over 2 T_a, coast, and brake for T_a.
[[nodiscard]] inline TimeMachineConfig twin_paradox_schedule(double l0, double g, double T_a, double coast,
                                                             double ramp_time = 0.0) {
    TimeMachineConfig tm;
    tm.l0 = l0;
    tm.ramp_time = ramp_time;
    tm.schedule = {{T_a, g}, {coast, 0.0}, {2.0 * T_a, -g}, {coast, 0.0}, {T_a, g}};
    if (coast <= 0.0) tm.schedule = {{T_a, g}, {2.0 * T_a, -g}, {T_a, g}};
    return tm;
}

}  // namespace wormsim
