#pragma once

/**
 * @file spacetime.hpp
 * @brief Massless (zero-redshift) 1D wormhole geometry and ray-optics timing.
 *
 * Coordinates:
 *   r  areal radius, r >= b0
 *   x  lab coordinate along the line, |x| = r - b0, signed by side
 *   l  proper radial distance from the throat, signed by side
 *
 * After the conformal pull-out the field sees c(r)^2 = c_base^2 (1 - b(r)/r).
 * Everything here is written against a ShapeFunction; the shipped family is
 * InverseSquareShape, b(r) = b0^2 / r, which also gets closed forms for l(x)
 * and the embedding height.
 */

#include <cmath>
#include <concepts>
#include <vector>

#include "wormsim/constants.hpp"
#include "wormsim/errors.hpp"
#include "wormsim/quadrature.hpp"

namespace wormsim {

// ---------------------------------------------------------------------------
//  Shape functions
// ---------------------------------------------------------------------------

template <class S>
concept ShapeFunction = requires(const S& s, double r) {
    { s(r) } -> std::convertible_to<double>;
    { s.throat_radius() } -> std::convertible_to<double>;
};

/// b(r) = b0^2 / r
struct InverseSquareShape {
    double b0 = 1e-4;

    [[nodiscard]] double operator()(double r) const noexcept { return b0 * b0 / r; }
    [[nodiscard]] double throat_radius() const noexcept { return b0; }

    /// 1 - b(r)/r at r = b0 + s, written to avoid cancellation near the throat.
    [[nodiscard]] double openness(double s) const noexcept {
        if (b0 == 0.0) return 1.0;
        const double r = b0 + s;
        return s * (s + 2.0 * b0) / (r * r);
    }
};

/// 1 - b(r)/r at r = throat + s. Uses the shape's own cancellation-free form when it has one.
template <ShapeFunction S>
[[nodiscard]] double openness(const S& shape, double s) {
    if constexpr (requires { shape.openness(s); }) {
        return shape.openness(s);
    } else {
        const double r = shape.throat_radius() + s;
        return 1.0 - shape(r) / r;
    }
}

template <ShapeFunction S>
struct Geometry {
    S shape{};
    double c_base = default_c_base;

    [[nodiscard]] double b0() const noexcept { return shape.throat_radius(); }

    void validate() const {
        if (!(shape.throat_radius() >= 0.0) || !std::isfinite(shape.throat_radius()))
            throw DomainError("geometry: throat radius must be finite and >= 0");
        if (!(c_base > 0.0) || !std::isfinite(c_base))
            throw DomainError("geometry: c_base must be finite and > 0");
    }
};

/// The geometry every shipped number is computed for.
using WormholeGeometry = Geometry<InverseSquareShape>;

/// b0 == 0 is accepted as the flat-line limit.
[[nodiscard]] inline WormholeGeometry make_geometry(double b0, double c_base = default_c_base) {
    WormholeGeometry g{InverseSquareShape{b0}, c_base};
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------
//  Coordinates
// ---------------------------------------------------------------------------

[[nodiscard]] inline double shape_b(double r, const WormholeGeometry& geom) {
    if (!(r >= geom.b0())) throw DomainError("shape_b: r is inside the throat (r < b0)");
    return geom.shape(r);
}

/// r = |x| + b0
template <ShapeFunction S>
[[nodiscard]] double r_from_x(double x, const Geometry<S>& geom) noexcept {
    return std::abs(x) + geom.b0();
}

enum class Side { negative = -1, positive = +1 };

template <ShapeFunction S>
[[nodiscard]] double x_from_r(double r, Side side, const Geometry<S>& geom) {
    if (!(r >= geom.b0())) throw DomainError("x_from_r: r is inside the throat (r < b0)");
    const double s = r - geom.b0();
    return side == Side::negative ? -s : s;
}

/// Signed proper distance, closed form sign(x) sqrt(|x| (|x| + 2 b0)).
[[nodiscard]] inline double proper_distance_l(double x, const WormholeGeometry& geom) noexcept {
    const double s = std::abs(x);
    const double l = std::sqrt(s * (s + 2.0 * geom.b0()));
    return std::signbit(x) ? -l : l;
}

/// Signed proper distance for any shape by quadrature of (1 - b/r)^(-1/2) dr.
/// The substitution r = b0 + u^2 removes the inverse-square-root throat singularity.
template <ShapeFunction S>
[[nodiscard]] double proper_distance_numeric(double x, const Geometry<S>& geom,
                                             double rel_tol = 1e-12) {
    const double s = std::abs(x);
    auto integrand = [&](double u) { return 2.0 * u / std::sqrt(openness(geom.shape, u * u)); };
    const double l = quadrature::integrate(integrand, 0.0, std::sqrt(s), {rel_tol, 0.0, 4000}).value;
    return std::signbit(x) ? -l : l;
}

// ---------------------------------------------------------------------------
//  Light speed and ray timing
// ---------------------------------------------------------------------------

/// c(x) = c_base sqrt(1 - b(r)/r), r = |x| + b0.
template <ShapeFunction S>
[[nodiscard]] double effective_speed(double x, const Geometry<S>& geom) {
    return geom.c_base * std::sqrt(openness(geom.shape, std::abs(x)));
}

struct RaySegment {
    double x_start = 0.0;
    double x_end = 0.0;
    double elapsed = 0.0;  // coordinate time, s
};

namespace detail {

// Integral of ds / c over |x| in [s_lo, s_hi] on one side of the throat,
// with s = u^2 so the 1/sqrt(s) blow-up at the throat becomes a smooth integrand.
template <ShapeFunction S>
double one_sided_time(double s_lo, double s_hi, const Geometry<S>& geom) {
    if (s_lo == s_hi) return 0.0;
    auto integrand = [&](double u) {
        return 2.0 * u / (geom.c_base * std::sqrt(openness(geom.shape, u * u)));
    };
    return quadrature::integrate(integrand, std::sqrt(s_lo), std::sqrt(s_hi), {1e-13, 0.0, 4000})
        .value;
}

}  // namespace detail

/// Elapsed coordinate time along the line, integral of |dx| / c(x) from x_i to x_f.
template <ShapeFunction S>
[[nodiscard]] RaySegment traversal_time(double x_i, double x_f, const Geometry<S>& geom) {
    RaySegment seg{x_i, x_f, 0.0};
    if (x_i == x_f) return seg;
    const double lo = std::min(x_i, x_f);
    const double hi = std::max(x_i, x_f);
    if (lo >= 0.0) {
        seg.elapsed = detail::one_sided_time(lo, hi, geom);
    } else if (hi <= 0.0) {
        seg.elapsed = detail::one_sided_time(-hi, -lo, geom);
    } else {
        seg.elapsed = detail::one_sided_time(0.0, -lo, geom) + detail::one_sided_time(0.0, hi, geom);
    }
    return seg;
}

/// Extra time relative to the flat line, traversal - |x_f - x_i| / c_base.
template <ShapeFunction S>
[[nodiscard]] double delay_vs_flat(double x_i, double x_f, const Geometry<S>& geom) {
    if (geom.b0() == 0.0) return 0.0;
    const double delay =
        traversal_time(x_i, x_f, geom).elapsed - std::abs(x_f - x_i) / geom.c_base;
    return std::max(delay, 0.0);
}

// ---------------------------------------------------------------------------
//  Embedding diagram
// ---------------------------------------------------------------------------

struct EmbeddingPoint {
    double r = 0.0;
    double z = 0.0;
};

/// z(r) = b0 arccosh(r / b0), evaluated as log1p to keep digits near the throat.
[[nodiscard]] inline double embedding_height(double r, const WormholeGeometry& geom) {
    const double b0 = geom.b0();
    if (!(r >= b0)) throw DomainError("embedding: r is inside the throat (r < b0)");
    if (b0 == 0.0) return 0.0;
    const double s = r - b0;
    return b0 * std::log1p((s + std::sqrt(s * (s + 2.0 * b0))) / b0);
}

/// z(r) = integral from b0 to r of (r'/b(r') - 1)^(-1/2) dr' for any shape.
template <ShapeFunction S>
[[nodiscard]] double embedding_height_numeric(double r, const Geometry<S>& geom,
                                              double rel_tol = 1e-12) {
    const double b0 = geom.b0();
    if (!(r >= b0)) throw DomainError("embedding: r is inside the throat (r < b0)");
    auto integrand = [&](double u) {
        const double open = openness(geom.shape, u * u);
        return 2.0 * u * std::sqrt((1.0 - open) / open);
    };
    return quadrature::integrate(integrand, 0.0, std::sqrt(r - b0), {rel_tol, 0.0, 4000}).value;
}

[[nodiscard]] inline std::vector<EmbeddingPoint> embedding_profile(const std::vector<double>& r_samples,
                                                                   const WormholeGeometry& geom) {
    std::vector<EmbeddingPoint> out;
    out.reserve(r_samples.size());
    for (double r : r_samples) out.push_back({r, embedding_height(r, geom)});
    return out;
}

}  // namespace wormsim
