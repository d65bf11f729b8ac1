#pragma once

/**
 * @file commands.hpp
 * @brief The wormsim subcommands, callable without going through argv.
 *
 * Every command writes its files under RunConfig::out_dir with the config
 * hash in the name and returns the status that the CLI exits with.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "wormsim/config.hpp"
#include "wormsim/io.hpp"
#include "wormsim/propagation.hpp"
#include "wormsim/spacetime.hpp"
#include "wormsim/squid_array.hpp"
#include "wormsim/time_machine.hpp"

namespace wormsim::commands {

using io::ordered_json;
namespace fs = std::filesystem;

/// Exit statuses shared by every subcommand.
enum Status : int { ok = 0, warn = 1, fail = 2, usage_error = 3, runtime_error = 4 };

struct CommandResult {
    int status = ok;
    std::vector<fs::path> files;
    ordered_json summary;
};

namespace detail {

inline std::string mm_tag(double meters) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%gmm", meters * 1e3);
    return buf;
}

inline fs::path output_path(const config::RunConfig& cfg, const std::string& stem, const std::string& ext) {
    return fs::path(cfg.out_dir) / (stem + "_" + cfg.hash() + "." + ext);
}

inline const char* ext(const config::RunConfig& cfg) { return cfg.format == config::Format::csv ? "csv" : "json"; }

/// Write a table as CSV, or as a JSON array of row objects, depending on the format.
inline fs::path emit_table(const config::RunConfig& cfg, const std::string& stem, const io::CsvTable& t,
                           const ordered_json& meta = nullptr) {
    const fs::path path = output_path(cfg, stem, ext(cfg));
    if (cfg.format == config::Format::csv) {
        io::write_text(path, io::to_csv_string(t));
    } else {
        ordered_json j;
        if (!meta.is_null()) j["provenance"] = meta;
        j["columns"] = t.header;
        j["rows"] = ordered_json::array();
        for (const auto& row : t.rows) j["rows"].push_back(row);
        io::write_text(path, io::dump(j));
    }
    return path;
}

inline fs::path emit_json(const config::RunConfig& cfg, const std::string& stem, const ordered_json& j) {
    const fs::path path = output_path(cfg, stem, "json");
    io::write_text(path, io::dump(j));
    return path;
}

inline fs::path emit_profile(const config::RunConfig& cfg, const std::string& stem, const FluxProfile& p) {
    const fs::path path = output_path(cfg, stem, ext(cfg));
    if (cfg.format == config::Format::csv)
        io::write_text(path, io::to_csv_string(io::profile_table(p, cfg.array)));
    else
        io::write_text(path, io::dump(io::profile_json(p, cfg.array)));
    return path;
}

inline ordered_json feasibility_json(const FeasibilityReport& r, const ArrayConfig& cfg) {
    ordered_json j;
    j["verdict"] = to_string(r.verdict);
    j["reasons"] = r.reasons;
    j["above_threshold_count"] = r.above_threshold_count;
    j["above_threshold_width_m"] = r.above_threshold_width;
    j["threshold_flux_ratio"] = cfg.threshold_flux_ratio;
    j["max_impedance_ratio"] = r.max_impedance_ratio;
    j["impedance_ratio_at_threshold"] = r.impedance_ratio_at_threshold;
    j["impedance_unity_flux_ratio"] = r.impedance_unity_flux_ratio;
    j["continuum_cutoff_Hz"] = r.continuum_cutoff;
    j["plasma_frequency_min_Hz"] = r.plasma_frequency_min;
    j["f_signal_max_Hz"] = cfg.f_signal_max;
    j["linear_regime_ok"] = r.linear_regime_ok;
    return j;
}

inline ordered_json ray_json(const RayValidationReport& r) {
    ordered_json j;
    j["probe_a_m"] = r.probe_a;
    j["probe_b_m"] = r.probe_b;
    j["ray_time_s"] = r.ray_time;
    j["flat_time_s"] = r.flat_time;
    j["measured_time_s"] = r.measured_time;
    j["reference_time_s"] = r.reference_time;
    j["absolute_discrepancy_s"] = r.absolute_discrepancy;
    j["relative_discrepancy"] = r.relative_discrepancy;
    j["predicted_delay_s"] = r.predicted_delay;
    j["measured_delay_s"] = r.measured_delay;
    j["dispersion_budget_s"] = r.dispersion_budget;
    j["dt_s"] = r.dt;
    j["pulse_width_s"] = r.pulse_width;
    j["cells"] = r.cells;
    return j;
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Static bias profile for every configured b0, plus a summary with the
/// threshold reference and the super-threshold width.
inline CommandResult flux_profile(const config::RunConfig& cfg) {
    CommandResult res;
    const double theta = cfg.array.threshold_flux_ratio;
    ordered_json profiles = ordered_json::array();
    for (std::size_t i = 0; i < cfg.b0.size(); ++i) {
        const WormholeGeometry geom = cfg.geometry(i);
        const FluxProfile p = discretize_profile(geom, cfg.array, cfg.experiment.extent);
        res.files.push_back(detail::emit_profile(cfg, "flux_profile_b0_" + detail::mm_tag(geom.b0()), p));

        std::size_t above = 0;
        for (std::size_t n = 0; n < p.size(); ++n) above += p.flux_ratio(n) > theta ? 1 : 0;
        ordered_json s;
        s["b0_m"] = geom.b0();
        s["file"] = res.files.back().filename().string();
        s["squids"] = p.size();
        s["sampled_above_threshold"] = above;
        s["super_threshold_width_m"] = 2.0 * threshold_half_width_numeric(geom, theta);
        s["super_threshold_width_closed_form_m"] = 2.0 * threshold_half_width(geom.b0(), theta);
        s["max_flux_over_phi0"] = *std::max_element(p.fluxes().begin(), p.fluxes().end()) / p.flux_quantum();
        profiles.push_back(std::move(s));
    }
    res.summary["threshold_flux_ratio"] = theta;
    res.summary["threshold_flux_Wb"] = theta * flux_quantum;
    res.summary["profiles"] = std::move(profiles);
    res.files.push_back(detail::emit_json(cfg, "flux_profile_summary", res.summary));
    return res;
}

/// One report per configured b0. Exit status follows the worst verdict:
/// 0 pass, 1 warn, 2 fail.
inline CommandResult feasibility(const config::RunConfig& cfg) {
    CommandResult res;
    Verdict worst = Verdict::pass;
    ordered_json reports = ordered_json::array();
    for (std::size_t i = 0; i < cfg.b0.size(); ++i) {
        const WormholeGeometry geom = cfg.geometry(i);
        const FluxProfile p = discretize_profile(geom, cfg.array, cfg.experiment.extent);
        const FeasibilityReport r = wormsim::feasibility(p, cfg.array);
        ordered_json j = detail::feasibility_json(r, cfg.array);
        j["b0_m"] = geom.b0();
        j["squids"] = p.size();
        reports.push_back(std::move(j));
        worst = std::max(worst, r.verdict);
    }
    if (reports.size() == 1) {
        res.summary = reports.front();
    } else {
        res.summary["verdict"] = to_string(worst);
        res.summary["reports"] = std::move(reports);
    }
    res.files.push_back(detail::emit_json(cfg, "feasibility", res.summary));
    res.status = static_cast<int>(worst);
    return res;
}

/// One profile per distinct scheduled acceleration and the time-shift budget.
inline CommandResult time_machine(const config::RunConfig& cfg) {
    if (!cfg.time_machine) throw ConfigError("time_machine", "block is required for this command");
    CommandResult res;
    const WormholeGeometry geom = cfg.geometry();
    const auto& tmb = *cfg.time_machine;
    const TimeMachineConfig& tm = tmb.config;

    ordered_json curves = ordered_json::array();
    for (double g : tm.distinct_accelerations()) {
        // Time at which this acceleration is first in effect (middle of its segment).
        double t = -1.0;
        double start = 0.0;
        for (const auto& seg : tm.schedule) {
            if (seg.g == g) {
                t = start + 0.5 * seg.duration;
                break;
            }
            start += seg.duration;
        }
        if (t < 0.0) t = tm.total_duration() + tm.ramp_time + 1e-12;  // g = 0 outside the schedule

        const FluxProfile p = discretize_profile(geom, cfg.array, cfg.experiment.extent, tm, t);
        char tag[48];
        std::snprintf(tag, sizeof tag, "%+.6g", g * tm.l0 / (geom.c_base * geom.c_base));
        res.files.push_back(detail::emit_profile(cfg, std::string("tm_flux_glc2_") + tag, p));
        ordered_json c;
        c["g_m_per_s2"] = g;
        c["g_l0_over_c2"] = g * tm.l0 / (geom.c_base * geom.c_base);
        c["t_s"] = t;
        c["file"] = res.files.back().filename().string();
        curves.push_back(std::move(c));
    }

    const TimeShiftBudget b = ctc_budget(geom, tm, cfg.array, tmb.T_total, tmb.x0);
    ordered_json budget;
    budget["gamma"] = b.gamma;
    budget["mouth_velocity_m_per_s"] = b.mouth_velocity;
    budget["T_total_s"] = tmb.T_total;
    budget["shift_s"] = b.shift;
    budget["x0_m"] = tmb.x0;
    budget["traversal_s"] = b.traversal;
    budget["traversal_closed_form_s"] = 2.0 * proper_distance_l(tmb.x0, geom) / geom.c_base;
    budget["ctc_possible"] = b.ctc_possible;
    if (tmb.quoted_traversal) {
        budget["quoted_traversal_s"] = *tmb.quoted_traversal;
        budget["traversal_over_quoted"] = b.traversal / *tmb.quoted_traversal;
        budget["note"] = "traversal computed for the configured x0; the quoted value is not reproduced";
    }
    res.summary["schedule"] = io::schedule_json(tm);
    res.summary["budget"] = budget;
    res.summary["curves"] = std::move(curves);
    res.files.push_back(detail::emit_json(cfg, "time_machine_budget", res.summary));
    return res;
}

/// Pulse experiment on the ladder, ray comparison and optional convergence table.
inline CommandResult propagate(const config::RunConfig& cfg) {
    CommandResult res;
    const WormholeGeometry geom = cfg.geometry();
    const auto& ex = cfg.experiment;
    const FluxProfile profile = discretize_profile(geom, cfg.array, ex.extent);

    LadderModel ladder;
    try {
        ladder = build_ladder(profile, cfg.array, ex.boundaries, ex.allow_failing);
    } catch (const LadderRefusal& refusal) {
        res.status = fail;
        res.summary["refused"] = true;
        res.summary["feasibility"] = detail::feasibility_json(refusal.report(), cfg.array);
        res.files.push_back(detail::emit_json(cfg, "propagate_report", res.summary));
        return res;
    }

    ExperimentPlan plan = plan_experiment(ladder, ex.probes);
    if (ex.pulse) {
        plan.pulse.width = ex.pulse->width;
        plan.pulse.center_time = ex.pulse->center_time;
        plan.pulse.carrier = ex.pulse->carrier;
        plan.pulse.amplitude = ex.pulse->amplitude;
        plan.pulse.injection_node = ladder.node_at(ex.pulse->injection_x);
    }
    if (ex.duration > 0.0) plan.duration = ex.duration;

    const SimulationResult sim = simulate(ladder, plan.pulse, plan.duration, plan.probe_nodes);
    ordered_json meta;
    meta["dt_s"] = sim.dt;
    meta["steps"] = sim.steps;
    meta["N"] = ladder.cells();
    meta["boundaries"] = {{"left", to_string(ladder.boundaries.left)}, {"right", to_string(ladder.boundaries.right)}};
    meta["pulse"] = io::pulse_json(plan.pulse);
    meta["C0_calibrated_F"] = ladder.cell_capacitance;
    meta["capacitance_scale"] = ladder.capacitance_scale;
    meta["notes"] = ladder.notes;
    meta["config_hash"] = cfg.hash();
    res.files.push_back(detail::emit_table(cfg, "probes", io::probe_table(sim.probes), meta));
    res.files.push_back(detail::emit_json(cfg, "probes_meta", meta));

    const RayValidationReport ray = validate_against_ray(ladder, geom, ex.probes, plan);
    res.summary["validation"] = detail::ray_json(ray);

    // Elapsed time from the first probe to each other probe: measured vs ray vs flat.
    ordered_json curve = ordered_json::array();
    for (std::size_t p = 1; p < sim.probes.size(); ++p) {
        ordered_json row;
        const double xa = sim.probes.front().position;
        const double xb = sim.probes[p].position;
        row["x_m"] = xb;
        row["measured_s"] = time_of_flight(sim.probes.front(), sim.probes[p]);
        row["ray_s"] = traversal_time(xa, xb, geom).elapsed;
        row["flat_s"] = std::abs(xb - xa) / geom.c_base;
        curve.push_back(std::move(row));
    }
    res.summary["elapsed_curve"] = std::move(curve);

    if (ex.halvings > 0) {
        const auto rows = convergence_study(
            [&](const ArrayConfig& c) { return discretize_profile(geom, c, ex.extent); }, cfg.array, geom,
            ex.probes, ex.halvings, ex.boundaries);
        io::CsvTable t;
        t.header = {"d_m", "cells", "measured_s", "ray_s", "relative_discrepancy", "measured_delay_s",
                    "predicted_delay_s"};
        ordered_json conv = ordered_json::array();
        for (const auto& r : rows) {
            t.rows.push_back({r.spacing, static_cast<double>(r.report.cells), r.report.measured_time,
                              r.report.ray_time, r.report.relative_discrepancy, r.report.measured_delay,
                              r.report.predicted_delay});
            conv.push_back(detail::ray_json(r.report));
        }
        res.summary["convergence"] = std::move(conv);
        res.files.push_back(detail::emit_table(cfg, "convergence", t));
    }
    res.files.push_back(detail::emit_json(cfg, "propagate_report", res.summary));
    return res;
}

/// (l, r, z) along both sheets of the embedding surface; z carries the sign of l.
inline CommandResult embed(const config::RunConfig& cfg) {
    CommandResult res;
    const WormholeGeometry geom = cfg.geometry();
    const auto xs = detail::linspace(0.0, cfg.experiment.extent, cfg.experiment.samples);
    io::CsvTable t;
    t.header = {"l_m", "r_m", "z_m"};
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
        if (*it == 0.0) continue;
        const double r = r_from_x(*it, geom);
        t.rows.push_back({-proper_distance_l(*it, geom), r, -embedding_height(r, geom)});
    }
    for (double x : xs) {
        const double r = r_from_x(x, geom);
        t.rows.push_back({proper_distance_l(x, geom), r, embedding_height(r, geom)});
    }
    res.files.push_back(detail::emit_table(cfg, "embedding", t));
    res.summary["b0_m"] = geom.b0();
    res.summary["points"] = t.rows.size();
    return res;
}

/// Ray traversal query between experiment.x_i_m and experiment.x_f_m, with the elapsed-time curve.
inline CommandResult traversal(const config::RunConfig& cfg) {
    CommandResult res;
    const WormholeGeometry geom = cfg.geometry();
    const double xi = cfg.experiment.x_i;
    const double xf = cfg.experiment.x_f;
    const RaySegment seg = traversal_time(xi, xf, geom);
    res.summary["x_i_m"] = xi;
    res.summary["x_f_m"] = xf;
    res.summary["elapsed_s"] = seg.elapsed;
    res.summary["closed_form_s"] = std::abs(proper_distance_l(xf, geom) - proper_distance_l(xi, geom)) / geom.c_base;
    res.summary["flat_s"] = std::abs(xf - xi) / geom.c_base;
    res.summary["delay_s"] = delay_vs_flat(xi, xf, geom);

    io::CsvTable t;
    t.header = {"x_f_m", "t_wormhole_s", "t_flat_s", "delay_s"};
    for (double x : detail::linspace(xi, xf, cfg.experiment.samples)) {
        const double elapsed = traversal_time(xi, x, geom).elapsed;
        const double flat = std::abs(x - xi) / geom.c_base;
        t.rows.push_back({x, elapsed, flat, delay_vs_flat(xi, x, geom)});
    }
    res.files.push_back(detail::emit_table(cfg, "traversal_curve", t));
    res.files.push_back(detail::emit_json(cfg, "traversal", res.summary));
    return res;
}

}  // namespace wormsim::commands
