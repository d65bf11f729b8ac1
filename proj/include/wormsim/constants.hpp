#pragma once

/**
 * @file constants.hpp
 * @brief Physical constants and unit conventions shared by every module.
 *
 * Every quantity in wormsim is carried in SI units. Unit conversions for
 * user-facing input (mm, GHz, uA, pF, ...) happen only in config.hpp.
 */

#include <numbers>
#include <stdexcept>

namespace wormsim {

inline constexpr double pi = std::numbers::pi_v<double>;

/** CODATA 2018 exact values. */
inline constexpr double planck_constant = 6.626'070'15e-34;     // J s
inline constexpr double elementary_charge = 1.602'176'634e-19;  // C

/// Flat-line light speed used throughout the worked examples.
inline constexpr double default_c_base = 1.0e8;  // m/s

struct PhysicalConstants {
    double h = planck_constant;
    double e = elementary_charge;
    double c_base = default_c_base;

    /// phi0 = h / (2e)   [Wb]
    [[nodiscard]] constexpr double flux_quantum() const noexcept { return h / (2.0 * e); }

    /// R_Q = h / (4e^2)  [Ohm]
    [[nodiscard]] constexpr double resistance_quantum() const noexcept {
        return h / (4.0 * e * e);
    }

    constexpr void validate() const {
        if (!(h > 0.0) || !(e > 0.0)) throw std::invalid_argument("constants: h and e must be positive");
        if (!(c_base > 0.0)) throw std::invalid_argument("constants: c_base must be positive");
    }
};

[[nodiscard]] constexpr PhysicalConstants default_constants() noexcept { return {}; }

/// Convenience: phi0 for the default constants.
inline constexpr double flux_quantum = PhysicalConstants{}.flux_quantum();
inline constexpr double resistance_quantum = PhysicalConstants{}.resistance_quantum();

}  // namespace wormsim
