#pragma once

/**
 * @file quadrature.hpp
 * @brief Globally adaptive Gauss-Kronrod (G7/K15) integration.
 *
 * Intervals are bisected in order of largest error estimate until the summed
 * estimate is below max(abs_tol, rel_tol * |I|) or the interval budget runs
 * out. Endpoint singularities should be removed by a change of variables
 * before calling (see spacetime.hpp); the nodes never touch the endpoints,
 * so integrable endpoint blow-ups are tolerated but converge slowly.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace wormsim::quadrature {

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

struct Options {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    std::size_t max_intervals = 4000;
};

namespace detail {

// Kronrod abscissae (descending), Kronrod weights and Gauss weights for the
// 7-point rule embedded at odd Kronrod nodes.
inline constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const noexcept { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = wk[7] * fc;
    double gauss = wg[3] * fc;
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * xk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += wk[j] * pair;
        if (j % 2 == 1) gauss += wg[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrate f over [a, b]. Reversed bounds flip the sign.
template <class F>
Result integrate(const F& f, double a, double b, const Options& opt = {}) {
    if (a == b) return {0.0, 0.0, 0, true};
    if (a > b) {
        Result r = integrate(f, b, a, opt);
        r.value = -r.value;
        return r;
    }

    std::priority_queue<detail::Panel> panels;
    panels.push(detail::gk15(f, a, b));
    double total = panels.top().value;
    double error = panels.top().error;

    Result out;
    while (true) {
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
        if (error <= target) {
            out.converged = true;
            break;
        }
        if (panels.size() >= opt.max_intervals) break;

        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval at floating-point resolution
            panels.push(worst);
            break;
        }
        const detail::Panel left = detail::gk15(f, worst.a, mid);
        const detail::Panel right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum from scratch to shed the accumulated update round-off.
    out.value = 0.0;
    out.error = 0.0;
    out.intervals = panels.size();
    while (!panels.empty()) {
        out.value += panels.top().value;
        out.error += panels.top().error;
        panels.pop();
    }
    if (!out.converged) {
        out.converged = out.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value));
    }
    return out;
}

}  // namespace wormsim::quadrature
