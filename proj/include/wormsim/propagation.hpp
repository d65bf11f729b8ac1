#pragma once

/**
 * @file propagation.hpp
 * @brief Leapfrog time-domain solver for the discrete LC ladder.
 *
 * Topology: N SQUID inductors L_n sit at the profile positions x_n and join
 * N + 1 nodes at x_n -/+ d/2. Interior nodes carry C0 to ground, the two
 * terminal nodes carry C0 / 2 so the ladder discretizes a line of length N d.
 * Current I_n flows through inductor n from node n to node n + 1.
 *
 *   C_k dV_k/dt = I_{k-1} - I_k + J_k(t)
 *   L_n dI_n/dt = V_n - V_{n+1}
 *
 * Voltages live on integer steps, currents on half steps. The scheme keeps
 *
 *   E^n = sum_k C_k (V_k^n)^2 / 2 + sum_n L_n I_n^{n-1/2} I_n^{n+1/2} / 2
 *
 * exactly constant with reflecting ends and source off; the matched
 * terminations are discretized with the trapezoidal rule so they only ever
 * remove energy (first-order absorbing).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "wormsim/constants.hpp"
#include "wormsim/errors.hpp"
#include "wormsim/spacetime.hpp"
#include "wormsim/squid_array.hpp"

namespace wormsim {

enum class Boundary { matched, open, shorted };

[[nodiscard]] inline const char* to_string(Boundary b) noexcept {
    switch (b) {
        case Boundary::matched: return "matched";
        case Boundary::open: return "open";
        case Boundary::shorted: return "short";
    }
    return "?";
}

struct Boundaries {
    Boundary left = Boundary::matched;
    Boundary right = Boundary::matched;
};

/// Raised when a failing profile is handed to build_ladder without override.
class LadderRefusal : public std::runtime_error {
public:
    explicit LadderRefusal(FeasibilityReport report)
        : std::runtime_error("ladder refused: feasibility verdict is fail"), report_(std::move(report)) {}

    [[nodiscard]] const FeasibilityReport& report() const noexcept { return report_; }

private:
    FeasibilityReport report_;
};

struct LadderModel {
    std::vector<double> inductances;   // N, H
    std::vector<double> capacitances;  // N + 1, F
    std::vector<double> node_positions;  // N + 1, m
    double spacing = 0.0;              // m
    double c_base = default_c_base;
    Boundaries boundaries;
    double cell_capacitance = 0.0;     // calibrated C0, F
    double capacitance_scale = 1.0;    // calibrated C0 / configured C0
    double band_limit = 0.0;           // highest usable signal frequency, Hz
    std::vector<std::string> notes;

    [[nodiscard]] std::size_t cells() const noexcept { return inductances.size(); }
    [[nodiscard]] std::size_t nodes() const noexcept { return capacitances.size(); }

    /// Characteristic impedance of cell n, sqrt(L_n / C0).
    [[nodiscard]] double impedance(std::size_t n) const {
        return std::sqrt(inductances.at(n) / cell_capacitance);
    }

    /// Node closest to x.
    [[nodiscard]] std::size_t node_at(double x) const {
        const auto it = std::lower_bound(node_positions.begin(), node_positions.end(), x);
        if (it == node_positions.begin()) return 0;
        if (it == node_positions.end()) return node_positions.size() - 1;
        const auto hi = static_cast<std::size_t>(it - node_positions.begin());
        return (x - node_positions[hi - 1] <= node_positions[hi] - x) ? hi - 1 : hi;
    }

    /// dt = 0.5 min_n sqrt(L_n C0)
    [[nodiscard]] double default_time_step() const {
        const double l_min = *std::min_element(inductances.begin(), inductances.end());
        return 0.5 * std::sqrt(l_min * cell_capacitance);
    }

    void validate() const {
        if (inductances.size() < 2) throw std::invalid_argument("ladder: need at least 2 cells");
        if (capacitances.size() != inductances.size() + 1 || node_positions.size() != capacitances.size())
            throw std::invalid_argument("ladder: inconsistent array sizes");
        for (double l : inductances)
            if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("ladder: inductance must be finite > 0");
        for (double c : capacitances)
            if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("ladder: capacitance must be finite > 0");
        for (double l : inductances) {
            const double speed = spacing / std::sqrt(l * cell_capacitance);
            if (speed > c_base * (1.0 + 1e-9))
                throw std::invalid_argument("ladder: local wave speed exceeds c_base");
        }
    }
};

/// Ladder whose every cell has the same inductance; the flat-line reference.
[[nodiscard]] inline LadderModel uniform_ladder(std::size_t cells, double spacing, double c_base,
                                                double inductance, Boundaries bc = {}) {
    LadderModel m;
    m.spacing = spacing;
    m.c_base = c_base;
    m.boundaries = bc;
    m.cell_capacitance = (spacing / c_base) * (spacing / c_base) / inductance;
    m.inductances.assign(cells, inductance);
    m.capacitances.assign(cells + 1, m.cell_capacitance);
    m.capacitances.front() *= 0.5;
    m.capacitances.back() *= 0.5;
    m.node_positions.resize(cells + 1);
    const double x_first = -0.5 * static_cast<double>(cells) * spacing;
    for (std::size_t k = 0; k <= cells; ++k) m.node_positions[k] = x_first + static_cast<double>(k) * spacing;
    m.band_limit = c_base / (continuum_wavelength_cells * spacing);
    m.validate();
    return m;
}

/// Ladder realizing a bias profile. C0 is recalibrated so that an unbiased
/// cell propagates at exactly c_base, L_s(0) C0 = (d / c_base)^2.
[[nodiscard]] inline LadderModel build_ladder(const FluxProfile& profile, const ArrayConfig& cfg,
                                              Boundaries bc = {}, bool allow_failing = false,
                                              const PhysicalConstants& k = {}) {
    const FeasibilityReport report = feasibility(profile, cfg, k);
    LadderModel m;
    if (report.verdict == Verdict::fail) {
        if (!allow_failing) throw LadderRefusal(report);
        m.notes.push_back("built from a failing profile under override");
        for (const auto& r : report.reasons) m.notes.push_back("feasibility: " + r);
    }
    for (const auto& w : profile.provenance().warnings) m.notes.push_back(w);

    const double d = profile.spacing();
    const double c = profile.provenance().c_base;
    m.spacing = d;
    m.c_base = c;
    m.boundaries = bc;
    m.band_limit = std::min(report.continuum_cutoff, report.plasma_frequency_min / plasma_margin);

    const double l_zero = squid_inductance(0.0, cfg, k);
    m.cell_capacitance = (d / c) * (d / c) / l_zero;
    m.capacitance_scale = m.cell_capacitance / cfg.C0;
    if (std::abs(m.capacitance_scale - 1.0) > 1e-12) {
        m.notes.push_back("C0 rescaled from " + std::to_string(cfg.C0) + " F to " +
                          std::to_string(m.cell_capacitance) + " F so that L_s(0) C0 = (d/c_base)^2");
    }

    const std::size_t n = profile.size();
    m.inductances.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.inductances[i] = squid_inductance(profile.fluxes()[i], cfg, k);
    m.capacitances.assign(n + 1, m.cell_capacitance);
    m.capacitances.front() *= 0.5;
    m.capacitances.back() *= 0.5;
    m.node_positions.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        m.node_positions[i] = profile.positions().front() - 0.5 * d + static_cast<double>(i) * d;
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
//  Pulses and simulation
// ---------------------------------------------------------------------------

struct PulseSpec {
    double center_time = 0.0;  // s
    double width = 0.0;        // Gaussian sigma, s
    double carrier = 0.0;      // Hz, 0 for baseband
    double amplitude = 1.0;    // V of each launched wave
    std::size_t injection_node = 0;

    /// Highest significant frequency, carrier + 3 / (2 pi sigma).
    [[nodiscard]] double band_edge() const noexcept { return carrier + 3.0 / (2.0 * pi * width); }

    /// Source is switched off outside center_time -/+ this many sigma.
    static constexpr double support_sigmas = 6.0;

    [[nodiscard]] double off_time() const noexcept { return center_time + support_sigmas * width; }

    /// Normalized waveform, zero outside the support.
    [[nodiscard]] double shape(double t) const noexcept {
        const double s = (t - center_time) / width;
        if (std::abs(s) > support_sigmas) return 0.0;
        const double envelope = std::exp(-0.5 * s * s);
        return carrier == 0.0 ? envelope : envelope * std::cos(2.0 * pi * carrier * (t - center_time));
    }
};

struct ProbeSeries {
    std::size_t node = 0;
    double position = 0.0;     // m
    double dt = 0.0;           // s; samples at t_n = n dt
    double pulse_width = 0.0;  // s, sigma of the launching pulse
    std::vector<double> voltages;

    [[nodiscard]] double time(std::size_t n) const noexcept { return static_cast<double>(n) * dt; }
};

struct SimulationOptions {
    double dt = 0.0;                   // 0 selects the default CFL step
    std::size_t energy_every = 0;      // record E every this many steps; 0 disables
    bool enforce_band_limit = true;
};

struct SimulationResult {
    std::vector<ProbeSeries> probes;
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<double> energy_times;  // s
    std::vector<double> energy;        // J
    double source_off_time = 0.0;      // s
};

/// Integrates the ladder from rest for `duration` seconds with a soft current
/// source at pulse.injection_node sized so each launched wave has pulse.amplitude.
[[nodiscard]] inline SimulationResult simulate(const LadderModel& ladder, const PulseSpec& pulse, double duration,
                                               const std::vector<std::size_t>& probes,
                                               const SimulationOptions& opt = {}) {
    ladder.validate();
    const std::size_t nodes = ladder.nodes();
    const std::size_t cells = ladder.cells();
    if (!(pulse.width > 0.0)) throw std::invalid_argument("simulate: pulse width must be > 0");
    if (pulse.injection_node >= nodes) throw std::invalid_argument("simulate: injection node out of range");
    if (!(duration > pulse.center_time)) throw std::invalid_argument("simulate: duration must exceed pulse center time");
    for (std::size_t p : probes)
        if (p >= nodes) throw std::invalid_argument("simulate: probe node out of range");
    if (opt.enforce_band_limit && ladder.band_limit > 0.0 && pulse.band_edge() > ladder.band_limit)
        throw std::invalid_argument("simulate: pulse band edge " + std::to_string(pulse.band_edge()) +
                                    " Hz exceeds the ladder band limit " + std::to_string(ladder.band_limit) + " Hz");

    const double dt = opt.dt > 0.0 ? opt.dt : ladder.default_time_step();
    const auto steps = static_cast<std::size_t>(std::ceil(duration / dt));

    const std::size_t inj = pulse.injection_node;
    const std::size_t inj_cell = std::min(inj, cells - 1);
    const double source_gain = 2.0 * pulse.amplitude / ladder.impedance(inj_cell);

    std::vector<double> V(nodes, 0.0);
    std::vector<double> I(cells, 0.0);
    std::vector<double> I_prev(cells, 0.0);
    std::vector<double> dt_over_L(cells);
    std::vector<double> dt_over_C(nodes);
    for (std::size_t n = 0; n < cells; ++n) dt_over_L[n] = dt / ladder.inductances[n];
    for (std::size_t k = 0; k < nodes; ++k) dt_over_C[k] = dt / ladder.capacitances[k];

    // Trapezoidal matched termination: C (V' - V)/dt = J - (V' + V) / (2R).
    auto termination = [&](Boundary b, std::size_t node, std::size_t cell) {
        struct Coeffs { double keep = 1.0, drive = 0.0; bool pinned = false; } c;
        c.drive = dt_over_C[node];
        if (b == Boundary::shorted) {
            c.pinned = true;
        } else if (b == Boundary::matched) {
            const double a = dt_over_C[node] / (2.0 * ladder.impedance(cell));
            c.keep = (1.0 - a) / (1.0 + a);
            c.drive = dt_over_C[node] / (1.0 + a);
        }
        return c;
    };
    const auto left = termination(ladder.boundaries.left, 0, 0);
    const auto right = termination(ladder.boundaries.right, nodes - 1, cells - 1);

    SimulationResult out;
    out.dt = dt;
    out.steps = steps;
    out.source_off_time = pulse.off_time();
    out.probes.resize(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        out.probes[p].node = probes[p];
        out.probes[p].position = ladder.node_positions[probes[p]];
        out.probes[p].dt = dt;
        out.probes[p].pulse_width = pulse.width;
        out.probes[p].voltages.reserve(steps + 1);
        out.probes[p].voltages.push_back(0.0);
    }

    for (std::size_t step = 0; step < steps; ++step) {
        const bool want_energy = opt.energy_every > 0 && step % opt.energy_every == 0;
        double magnetic = 0.0;

        // currents: n - 1/2 -> n + 1/2
        if (want_energy) I_prev = I;
        for (std::size_t n = 0; n < cells; ++n) I[n] += dt_over_L[n] * (V[n] - V[n + 1]);

        if (want_energy) {
            double electric = 0.0;
            for (std::size_t k = 0; k < nodes; ++k) electric += ladder.capacitances[k] * V[k] * V[k];
            for (std::size_t n = 0; n < cells; ++n) magnetic += ladder.inductances[n] * I_prev[n] * I[n];
            out.energy_times.push_back(static_cast<double>(step) * dt);
            out.energy.push_back(0.5 * (electric + magnetic));
        }

        // voltages: n -> n + 1, source sampled at the half step
        const double j_src = source_gain * pulse.shape((static_cast<double>(step) + 0.5) * dt);
        for (std::size_t k = 1; k + 1 < nodes; ++k) {
            double net = I[k - 1] - I[k];
            if (k == inj) net += j_src;
            V[k] += dt_over_C[k] * net;
        }
        {
            double net = -I[0] + (inj == 0 ? j_src : 0.0);
            V[0] = left.pinned ? 0.0 : left.keep * V[0] + left.drive * net;
            net = I[cells - 1] + (inj == nodes - 1 ? j_src : 0.0);
            V[nodes - 1] = right.pinned ? 0.0 : right.keep * V[nodes - 1] + right.drive * net;
        }

        for (std::size_t p = 0; p < probes.size(); ++p) out.probes[p].voltages.push_back(V[probes[p]]);

        if ((step & 1023U) == 1023U || step + 1 == steps) {
            const double probe_sum = std::accumulate(V.begin(), V.end(), 0.0) +
                                     std::accumulate(I.begin(), I.end(), 0.0);
            if (!std::isfinite(probe_sum))
                throw InstabilityError(step, "non-finite ladder state (dt = " + std::to_string(dt) + " s)");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
//  Measurement
// ---------------------------------------------------------------------------

/// Required ratio between pulse peak and the RMS of the record outside the pulse window.
inline constexpr double detection_snr = 10.0;
/// Half-width of the centroid window in pulse sigmas. Narrow enough to keep
/// echoes returning from a few sigma away out of the moment.
inline constexpr double centroid_window_sigmas = 4.0;

struct PulseArrival {
    double centroid = 0.0;  // s
    double peak = 0.0;      // V
    double noise_rms = 0.0; // V
};

/// Energy centroid of |V|^2 within +/- 4 sigma of the global peak.
[[nodiscard]] inline PulseArrival pulse_arrival(const ProbeSeries& s) {
    const auto& v = s.voltages;
    if (v.empty()) throw MeasurementError("probe " + std::to_string(s.node) + ": empty series");
    std::size_t peak = 0;
    for (std::size_t n = 1; n < v.size(); ++n)
        if (std::abs(v[n]) > std::abs(v[peak])) peak = n;

    const double half_window = centroid_window_sigmas * s.pulse_width;
    const auto w = half_window > 0.0 ? static_cast<std::size_t>(std::ceil(half_window / s.dt)) : v.size();
    const std::size_t lo = peak > w ? peak - w : 0;
    const std::size_t hi = std::min(v.size() - 1, peak + w);

    double outside = 0.0;
    std::size_t outside_n = 0;
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (n >= lo && n <= hi) continue;
        outside += v[n] * v[n];
        ++outside_n;
    }
    PulseArrival a;
    a.peak = std::abs(v[peak]);
    a.noise_rms = outside_n > 0 ? std::sqrt(outside / static_cast<double>(outside_n)) : 0.0;
    if (!(a.peak > 0.0) || !(a.peak > detection_snr * a.noise_rms))
        throw MeasurementError("probe " + std::to_string(s.node) + ": no detectable pulse (peak " +
                               std::to_string(a.peak) + " V, noise " + std::to_string(a.noise_rms) + " V)");

    double moment = 0.0;
    double mass = 0.0;
    for (std::size_t n = lo; n <= hi; ++n) {
        const double e = v[n] * v[n];
        moment += s.time(n) * e;
        mass += e;
    }
    a.centroid = moment / mass;
    return a;
}

/// t_b - t_a between the energy centroids of two probe records.
[[nodiscard]] inline double time_of_flight(const ProbeSeries& a, const ProbeSeries& b) {
    return pulse_arrival(b).centroid - pulse_arrival(a).centroid;
}

// ---------------------------------------------------------------------------
//  Ray-optics validation
// ---------------------------------------------------------------------------

struct ExperimentPlan {
    PulseSpec pulse;
    double duration = 0.0;
    std::vector<std::size_t> probe_nodes;
};

/// Fraction of the ladder band limit used by the automatically chosen pulse.
inline constexpr double auto_pulse_band_fraction = 0.8;

/// Baseband pulse that fits the band limit, injected far enough before the
/// first probe that the whole pulse is emitted before reaching it.
[[nodiscard]] inline ExperimentPlan plan_experiment(const LadderModel& ladder, const std::vector<double>& probe_x,
                                                    double band_limit = 0.0) {
    if (probe_x.size() < 2) throw std::invalid_argument("plan_experiment: need at least two probes");
    const double limit = band_limit > 0.0 ? band_limit : ladder.band_limit;
    ExperimentPlan plan;
    plan.pulse.width = 3.0 / (2.0 * pi * auto_pulse_band_fraction * limit);
    plan.pulse.center_time = PulseSpec::support_sigmas * plan.pulse.width;
    plan.pulse.amplitude = 1.0;

    for (double x : probe_x) plan.probe_nodes.push_back(ladder.node_at(x));
    const auto [first, last] = std::minmax_element(probe_x.begin(), probe_x.end());
    const double reach = PulseSpec::support_sigmas * plan.pulse.width * ladder.c_base;
    const double src_x = *first - reach;
    if (src_x < ladder.node_positions.front())
        throw std::invalid_argument("plan_experiment: ladder too short; need " + std::to_string(reach) +
                                    " m between the left end and the first probe");
    plan.pulse.injection_node = ladder.node_at(src_x);

    // Slowest possible path: every cell at its local speed.
    double slow = 0.0;
    for (std::size_t n = 0; n < ladder.cells(); ++n) {
        const double xn = 0.5 * (ladder.node_positions[n] + ladder.node_positions[n + 1]);
        if (xn < src_x || xn > *last) continue;
        slow += std::sqrt(ladder.inductances[n] * ladder.cell_capacitance);
    }
    plan.duration = plan.pulse.center_time + slow + 2.0 * PulseSpec::support_sigmas * plan.pulse.width;
    return plan;
}

struct RayValidationReport {
    double probe_a = 0.0, probe_b = 0.0;  // m
    double ray_time = 0.0;                // traversal_time between probes, s
    double flat_time = 0.0;               // |x_b - x_a| / c_base, s
    double measured_time = 0.0;           // FDTD time of flight, s
    double reference_time = 0.0;          // FDTD time of flight on the unbiased ladder, s
    double absolute_discrepancy = 0.0;    // |measured - ray|, s
    double relative_discrepancy = 0.0;    // absolute / ray
    double predicted_delay = 0.0;         // ray - flat, s
    double measured_delay = 0.0;          // measured - reference, s
    double dispersion_budget = 0.0;       // |reference - flat|, s
    double dt = 0.0;
    double pulse_width = 0.0;
    std::size_t cells = 0;
};

/// Runs the pulse experiment on the ladder and on an unbiased twin, then
/// compares both with the ray integral between the first two probes.
[[nodiscard]] inline RayValidationReport validate_against_ray(const LadderModel& ladder, const WormholeGeometry& geom,
                                                              const std::vector<double>& probe_x,
                                                              std::optional<ExperimentPlan> plan_in = std::nullopt) {
    const ExperimentPlan plan = plan_in ? *plan_in : plan_experiment(ladder, probe_x);

    LadderModel flat = ladder;
    const double l_free = ladder.spacing * ladder.spacing / (ladder.c_base * ladder.c_base * ladder.cell_capacitance);
    std::fill(flat.inductances.begin(), flat.inductances.end(), l_free);

    SimulationOptions opt;
    opt.dt = ladder.default_time_step();
    const auto run = simulate(ladder, plan.pulse, plan.duration, plan.probe_nodes, opt);
    const auto ref = simulate(flat, plan.pulse, plan.duration, plan.probe_nodes, opt);

    RayValidationReport r;
    r.probe_a = ladder.node_positions[plan.probe_nodes[0]];
    r.probe_b = ladder.node_positions[plan.probe_nodes[1]];
    r.ray_time = traversal_time(r.probe_a, r.probe_b, geom).elapsed;
    r.flat_time = std::abs(r.probe_b - r.probe_a) / geom.c_base;
    r.measured_time = time_of_flight(run.probes[0], run.probes[1]);
    r.reference_time = time_of_flight(ref.probes[0], ref.probes[1]);
    r.absolute_discrepancy = std::abs(r.measured_time - r.ray_time);
    r.relative_discrepancy = r.absolute_discrepancy / r.ray_time;
    r.predicted_delay = r.ray_time - r.flat_time;
    r.measured_delay = r.measured_time - r.reference_time;
    r.dispersion_budget = std::abs(r.reference_time - r.flat_time);
    r.dt = run.dt;
    r.pulse_width = plan.pulse.width;
    r.cells = ladder.cells();
    return r;
}

// ---------------------------------------------------------------------------
//  Convergence study
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    double spacing = 0.0;
    RayValidationReport report;
};

/// Re-synthesizes the profile at d, d/2, ..., d/2^halvings and validates each
/// against the ray prediction with one shared pulse (sized for the finest
/// grid). Resolutions run concurrently.
template <class ProfileAt>
[[nodiscard]] std::vector<ConvergenceRow> convergence_study(ProfileAt&& profile_at, const ArrayConfig& cfg,
                                                            const WormholeGeometry& geom,
                                                            const std::vector<double>& probe_x, unsigned halvings,
                                                            Boundaries bc = {}) {
    std::vector<LadderModel> ladders;
    for (unsigned h = 0; h <= halvings; ++h) {
        ArrayConfig c = cfg;
        c.d = cfg.d / static_cast<double>(1U << h);
        c.N = cfg.N == 0 ? 0 : cfg.N << h;
        c.grid_offset = cfg.grid_offset;
        const FluxProfile p = profile_at(c);
        ladders.push_back(build_ladder(p, c, bc, /*allow_failing=*/h > 0));
    }
    double band = ladders.front().band_limit;
    for (const auto& l : ladders) band = std::min(band, l.band_limit);

    std::vector<std::future<ConvergenceRow>> jobs;
    for (const auto& ladder : ladders) {
        jobs.push_back(std::async(std::launch::async, [&ladder, &geom, &probe_x, band] {
            ExperimentPlan plan = plan_experiment(ladder, probe_x, band);
            return ConvergenceRow{ladder.spacing, validate_against_ray(ladder, geom, probe_x, plan)};
        }));
    }
    std::vector<ConvergenceRow> rows;
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

}  // namespace wormsim
