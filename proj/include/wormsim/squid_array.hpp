#pragma once

/**
 * @file squid_array.hpp
 * @brief dc-SQUID array: tunable inductance, flux synthesis and feasibility.
 *
 * Each SQUID is treated as a single junction with identical critical
 * currents, negligible self-inductance and cos(psi) = 1 (linear regime):
 *
 *   L_s(phi)   = phi0 / (4 pi I_c cos(pi phi / phi0))
 *   c(phi)     = c_base sqrt(cos(pi phi / phi0))
 *   Z_A / R_Q  = sqrt(2 pi e^2 / (phi0 C0 I_c cos(pi phi / phi0)))
 *
 * Matching c(phi) to the wormhole speed gives the bias profile
 *
 *   phi(x) = (phi0 / pi) arccos(1 - b(r)/r),   r = |x| + b0.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wormsim/constants.hpp"
#include "wormsim/errors.hpp"
#include "wormsim/spacetime.hpp"

namespace wormsim {

struct ArrayConfig {
    double I_c = 10e-6;              // junction critical current, A
    double C0 = 0.1e-12;             // capacitance to ground per cell, F
    double C_s = 0.1e-12;            // SQUID capacitance, F
    double d = 0.05e-3;              // SQUID spacing, m
    std::size_t N = 0;               // SQUID count; 0 derives it from the extent
    double I_b_ratio = 0.01;         // bias / critical current
    double I_b_ratio_cap = 0.1;      // what "I_b << I_c" means here
    double f_signal_max = 20e9;      // top of the signal band, Hz
    double threshold_flux_ratio = 0.45;
    double grid_offset = 0.0;        // rigid shift of the SQUID grid, m

    void validate() const {
        auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
        if (!positive(I_c)) throw ConfigError("array.I_c_A", "must be > 0");
        if (!positive(C0)) throw ConfigError("array.C0_F", "must be > 0");
        if (!positive(C_s)) throw ConfigError("array.C_s_F", "must be > 0");
        if (!positive(d)) throw ConfigError("array.d_m", "must be > 0");
        if (N == 1) throw ConfigError("array.N", "must be >= 2 (or 0 to derive from extent)");
        if (!(I_b_ratio >= 0.0 && I_b_ratio < 1.0))
            throw ConfigError("array.I_b_ratio", "must lie in [0, 1)");
        if (!(I_b_ratio_cap > 0.0 && I_b_ratio_cap < 1.0))
            throw ConfigError("array.I_b_ratio_cap", "must lie in (0, 1)");
        if (!(f_signal_max >= 0.0) || !std::isfinite(f_signal_max))
            throw ConfigError("array.f_signal_max_Hz", "must be >= 0");
        if (!(threshold_flux_ratio > 0.0 && threshold_flux_ratio < 0.5))
            throw ConfigError("array.threshold_flux_ratio", "must lie in (0, 0.5)");
        if (!std::isfinite(grid_offset)) throw ConfigError("array.grid_offset_m", "must be finite");
    }
};

// ---------------------------------------------------------------------------
//  Single-SQUID relations
// ---------------------------------------------------------------------------

namespace detail {

inline double bias_cosine(double phi_ext, const PhysicalConstants& k, const char* who) {
    const double phi0 = k.flux_quantum();
    if (!(phi_ext >= 0.0) || !(phi_ext < 0.5 * phi0)) {
        throw DomainError(std::string(who) +
                          ": flux must lie in [0, phi0/2); phi0/2 is infinite inductance and the "
                          "throat is not representable by a biased SQUID in the linear regime");
    }
    return std::cos(pi * phi_ext / phi0);
}

}  // namespace detail

[[nodiscard]] inline double squid_inductance(double phi_ext, const ArrayConfig& cfg,
                                             const PhysicalConstants& k = {}) {
    const double cosine = detail::bias_cosine(phi_ext, k, "squid_inductance");
    return k.flux_quantum() / (4.0 * pi * cfg.I_c * cosine);
}

[[nodiscard]] inline double speed_from_flux(double phi_ext, double c_base,
                                            const PhysicalConstants& k = {}) {
    return c_base * std::sqrt(detail::bias_cosine(phi_ext, k, "speed_from_flux"));
}

/// Z_A / R_Q for the array biased at phi_ext.
[[nodiscard]] inline double impedance_ratio(double phi_ext, const ArrayConfig& cfg,
                                            const PhysicalConstants& k = {}) {
    const double cosine = detail::bias_cosine(phi_ext, k, "impedance_ratio");
    return std::sqrt(2.0 * pi * k.e * k.e / (k.flux_quantum() * cfg.C0 * cfg.I_c * cosine));
}

/// Flux at which Z_A / R_Q reaches 1 for this array (0 if it already exceeds 1 unbiased).
[[nodiscard]] inline double impedance_unity_flux(const ArrayConfig& cfg, const PhysicalConstants& k = {}) {
    const double needed_cos = 2.0 * pi * k.e * k.e / (k.flux_quantum() * cfg.C0 * cfg.I_c);
    if (needed_cos >= 1.0) return 0.0;
    return k.flux_quantum() / pi * std::acos(needed_cos);
}

/// Flux bias that reproduces the wormhole light speed at x. Even in x; phi0/2 at the throat.
template <ShapeFunction S>
[[nodiscard]] double synthesize_flux_at(double x, const Geometry<S>& geom,
                                        const PhysicalConstants& k = {}) {
    const double open = std::clamp(openness(geom.shape, std::abs(x)), 0.0, 1.0);
    return k.flux_quantum() / pi * std::acos(open);
}

/// Half-width of the region where phi(x) > theta phi0, closed form for b = b0^2/r:
/// (|x| + b0)^2 = b0^2 / (1 - cos(pi theta)).
[[nodiscard]] inline double threshold_half_width(double b0, double theta) {
    return b0 * (1.0 / std::sqrt(1.0 - std::cos(pi * theta)) - 1.0);
}

/// Same half-width found by bisection on the synthesized profile itself.
template <ShapeFunction S>
[[nodiscard]] double threshold_half_width_numeric(const Geometry<S>& geom, double theta,
                                                  const PhysicalConstants& k = {}) {
    const double target = theta * k.flux_quantum();
    double lo = 0.0;
    double hi = std::max(geom.b0(), 1e-12);
    while (synthesize_flux_at(hi, geom, k) > target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (synthesize_flux_at(mid, geom, k) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
//  Discretized profile
// ---------------------------------------------------------------------------

struct ProfileProvenance {
    double b0 = 0.0;
    double c_base = default_c_base;
    bool time_machine = false;
    double l0 = 0.0;
    double g = 0.0;  // acceleration in effect at `t`
    double t = 0.0;
    std::string label;
    std::vector<std::string> warnings;
};

/// Per-SQUID bias samples on a uniform grid. Immutable after construction.
class FluxProfile {
public:
    FluxProfile(std::vector<double> positions, std::vector<double> fluxes, double spacing,
                ProfileProvenance provenance, const PhysicalConstants& k = {})
        : positions_(std::move(positions)),
          fluxes_(std::move(fluxes)),
          spacing_(spacing),
          provenance_(std::move(provenance)),
          phi0_(k.flux_quantum()) {
        if (positions_.size() != fluxes_.size())
            throw std::invalid_argument("FluxProfile: positions and fluxes differ in length");
        if (positions_.size() < 2) throw std::invalid_argument("FluxProfile: need at least 2 SQUIDs");
        if (!(spacing_ > 0.0)) throw std::invalid_argument("FluxProfile: spacing must be > 0");
        for (std::size_t n = 0; n < fluxes_.size(); ++n) {
            if (!(fluxes_[n] >= 0.0 && fluxes_[n] < 0.5 * phi0_))
                throw SynthesisError(n, "flux outside [0, phi0/2)");
        }
        for (std::size_t n = 1; n < positions_.size(); ++n) {
            const double step = positions_[n] - positions_[n - 1];
            if (!(std::abs(step - spacing_) <= 1e-9 * spacing_))
                throw std::invalid_argument("FluxProfile: positions must be uniformly spaced by d");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return fluxes_.size(); }
    [[nodiscard]] const std::vector<double>& positions() const noexcept { return positions_; }
    [[nodiscard]] const std::vector<double>& fluxes() const noexcept { return fluxes_; }
    [[nodiscard]] double spacing() const noexcept { return spacing_; }
    [[nodiscard]] double flux_quantum() const noexcept { return phi0_; }
    [[nodiscard]] const ProfileProvenance& provenance() const noexcept { return provenance_; }

    [[nodiscard]] double flux_ratio(std::size_t n) const { return fluxes_.at(n) / phi0_; }

    [[nodiscard]] FluxProfile with_warning(std::string w) const {
        FluxProfile copy = *this;
        copy.provenance_.warnings.push_back(std::move(w));
        return copy;
    }

private:
    std::vector<double> positions_;
    std::vector<double> fluxes_;
    double spacing_;
    ProfileProvenance provenance_;
    double phi0_;
};

/// SQUID count implied by cfg.N or, when that is 0, by the half-extent.
[[nodiscard]] inline std::size_t squid_count(const ArrayConfig& cfg, double extent) {
    if (cfg.N != 0) return cfg.N;
    if (!(extent > 0.0)) throw ConfigError("experiment.extent_m", "must be > 0");
    const auto n = static_cast<std::size_t>(std::llround(2.0 * extent / cfg.d));
    return std::max<std::size_t>(n, 2);
}

/// x_n = (n - (N-1)/2) d, shifted by d/2 for odd N, plus cfg.grid_offset.
/// With no offset the throat always falls between two SQUIDs.
[[nodiscard]] inline std::vector<double> squid_positions(const ArrayConfig& cfg, std::size_t count) {
    std::vector<double> xs(count);
    const double center = 0.5 * static_cast<double>(count - 1);
    const double odd_shift = (count % 2 == 1) ? 0.5 * cfg.d : 0.0;
    for (std::size_t n = 0; n < count; ++n)
        xs[n] = (static_cast<double>(n) - center) * cfg.d + odd_shift + cfg.grid_offset;
    return xs;
}

/// Sample an arbitrary flux law onto the SQUID grid.
template <class FluxAt>
[[nodiscard]] FluxProfile discretize_with(FluxAt&& flux_at, const ArrayConfig& cfg, double extent,
                                          ProfileProvenance provenance, const PhysicalConstants& k = {}) {
    cfg.validate();
    const std::vector<double> xs = squid_positions(cfg, squid_count(cfg, extent));
    const double half_phi0 = 0.5 * k.flux_quantum();
    std::vector<double> fluxes(xs.size());
    for (std::size_t n = 0; n < xs.size(); ++n) {
        const double phi = flux_at(xs[n]);
        if (!(phi < half_phi0) || !std::isfinite(phi))
            throw SynthesisError(n, "flux reaches phi0/2 at x = " + std::to_string(xs[n]) +
                                        " m (SQUID sits on the throat)");
        fluxes[n] = phi;
    }
    return FluxProfile(xs, std::move(fluxes), cfg.d, std::move(provenance), k);
}

/// Static wormhole bias profile on the physical grid.
[[nodiscard]] inline FluxProfile discretize_profile(const WormholeGeometry& geom, const ArrayConfig& cfg,
                                                    double extent, const PhysicalConstants& k = {}) {
    geom.validate();
    ProfileProvenance prov;
    prov.b0 = geom.b0();
    prov.c_base = geom.c_base;
    prov.label = "static";
    return discretize_with([&](double x) { return synthesize_flux_at(x, geom, k); }, cfg, extent,
                           std::move(prov), k);
}

// ---------------------------------------------------------------------------
//  Feasibility
// ---------------------------------------------------------------------------

enum class Verdict { pass = 0, warn = 1, fail = 2 };

[[nodiscard]] inline const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::warn: return "warn";
        case Verdict::fail: return "fail";
    }
    return "?";
}

struct FeasibilityReport {
    std::size_t above_threshold_count = 0;
    double above_threshold_width = 0.0;  // m
    double max_impedance_ratio = 0.0;
    double impedance_ratio_at_threshold = 0.0;
    double impedance_unity_flux_ratio = 0.0;  // flux / phi0 where Z_A = R_Q
    double continuum_cutoff = 0.0;            // Hz
    double plasma_frequency_min = 0.0;        // Hz
    bool linear_regime_ok = true;
    Verdict verdict = Verdict::pass;
    std::vector<std::string> reasons;
};

/// Wavelength at the top of the band must be at least this many SQUID spacings.
inline constexpr double continuum_wavelength_cells = 10.0;
/// Signal band must stay below plasma_frequency_min / this factor.
inline constexpr double plasma_margin = 2.0;

[[nodiscard]] inline FeasibilityReport feasibility(const FluxProfile& profile, const ArrayConfig& cfg,
                                                   const PhysicalConstants& k = {}) {
    FeasibilityReport rep;
    const double phi0 = k.flux_quantum();
    const double threshold = cfg.threshold_flux_ratio * phi0;

    double max_flux = 0.0;
    for (double phi : profile.fluxes()) {
        if (phi > threshold) ++rep.above_threshold_count;
        max_flux = std::max(max_flux, phi);
    }
    rep.above_threshold_width = static_cast<double>(rep.above_threshold_count) * profile.spacing();
    rep.max_impedance_ratio = impedance_ratio(max_flux, cfg, k);
    rep.impedance_ratio_at_threshold = impedance_ratio(threshold, cfg, k);
    rep.impedance_unity_flux_ratio = impedance_unity_flux(cfg, k) / phi0;
    rep.continuum_cutoff = profile.provenance().c_base / (continuum_wavelength_cells * profile.spacing());
    rep.plasma_frequency_min = 1.0 / (2.0 * pi * std::sqrt(squid_inductance(max_flux, cfg, k) * cfg.C_s));
    rep.linear_regime_ok = cfg.I_b_ratio <= cfg.I_b_ratio_cap;

    bool fail = false;
    if (rep.above_threshold_count > 1) {
        fail = true;
        rep.reasons.push_back(std::to_string(rep.above_threshold_count) +
                              " SQUIDs above the critical flux threshold");
    }
    if (!rep.linear_regime_ok) {
        fail = true;
        rep.reasons.push_back("bias current ratio exceeds the linear-regime cap");
    }
    if (cfg.f_signal_max > rep.continuum_cutoff) {
        fail = true;
        rep.reasons.push_back("signal band exceeds the continuum cutoff");
    }
    if (cfg.f_signal_max > rep.plasma_frequency_min / plasma_margin) {
        fail = true;
        rep.reasons.push_back("signal band exceeds half the minimum SQUID plasma frequency");
    }

    if (fail) {
        rep.verdict = Verdict::fail;
    } else if (rep.above_threshold_count == 1) {
        rep.verdict = Verdict::warn;
        rep.reasons.push_back("one SQUID above the critical flux threshold (throat SQUID)");
    }
    return rep;
}

}  // namespace wormsim
