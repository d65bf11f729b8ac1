#pragma once

/**
 * @file config.hpp
 * @brief Run configuration: one JSON document, dotted-path overrides, and the
 *        unit conversions accepted at the input boundary.
 *
 * Any numeric field may be given as a plain SI number or as a string with a
 * unit suffix ("0.1mm", "10uA", "0.1pF", "200GHz", "1ns"). The suffix must
 * match the field's dimension.
 */

#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wormsim/errors.hpp"
#include "wormsim/io.hpp"
#include "wormsim/propagation.hpp"
#include "wormsim/spacetime.hpp"
#include "wormsim/squid_array.hpp"
#include "wormsim/time_machine.hpp"

namespace wormsim::config {

using json = nlohmann::json;

enum class Dim { none, length, time, frequency, current, capacitance, inductance, speed, acceleration, voltage };

[[nodiscard]] inline const char* to_string(Dim d) noexcept {
    switch (d) {
        case Dim::none: return "dimensionless";
        case Dim::length: return "length";
        case Dim::time: return "time";
        case Dim::frequency: return "frequency";
        case Dim::current: return "current";
        case Dim::capacitance: return "capacitance";
        case Dim::inductance: return "inductance";
        case Dim::speed: return "speed";
        case Dim::acceleration: return "acceleration";
        case Dim::voltage: return "voltage";
    }
    return "?";
}

namespace detail {

struct UnitDef {
    double factor;
    Dim dim;
};

inline const std::map<std::string, UnitDef>& units() {
    static const std::map<std::string, UnitDef> table = {
        {"m", {1.0, Dim::length}},       {"cm", {1e-2, Dim::length}},     {"mm", {1e-3, Dim::length}},
        {"um", {1e-6, Dim::length}},     {"µm", {1e-6, Dim::length}}, {"nm", {1e-9, Dim::length}},
        {"s", {1.0, Dim::time}},         {"ms", {1e-3, Dim::time}},       {"us", {1e-6, Dim::time}},
        {"µs", {1e-6, Dim::time}},  {"ns", {1e-9, Dim::time}},       {"ps", {1e-12, Dim::time}},
        {"fs", {1e-15, Dim::time}},      {"Hz", {1.0, Dim::frequency}},   {"kHz", {1e3, Dim::frequency}},
        {"MHz", {1e6, Dim::frequency}},  {"GHz", {1e9, Dim::frequency}},  {"THz", {1e12, Dim::frequency}},
        {"A", {1.0, Dim::current}},      {"mA", {1e-3, Dim::current}},    {"uA", {1e-6, Dim::current}},
        {"µA", {1e-6, Dim::current}}, {"nA", {1e-9, Dim::current}},  {"F", {1.0, Dim::capacitance}},
        {"nF", {1e-9, Dim::capacitance}}, {"pF", {1e-12, Dim::capacitance}}, {"fF", {1e-15, Dim::capacitance}},
        {"H", {1.0, Dim::inductance}},   {"nH", {1e-9, Dim::inductance}}, {"pH", {1e-12, Dim::inductance}},
        {"m/s", {1.0, Dim::speed}},      {"m/s2", {1.0, Dim::acceleration}}, {"m/s^2", {1.0, Dim::acceleration}},
        {"V", {1.0, Dim::voltage}},      {"mV", {1e-3, Dim::voltage}},    {"uV", {1e-6, Dim::voltage}},
    };
    return table;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// "0.1mm" -> 1e-4. A bare number is taken as SI.
[[nodiscard]] inline double parse_quantity(const std::string& text, Dim dim, const std::string& path) {
    const std::string s = detail::trim(text);
    char* end = nullptr;
    const double value = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw ConfigError(path, "expected a number, got '" + text + "'");
    const std::string unit = detail::trim(std::string(end));
    if (unit.empty()) return value;
    const auto it = detail::units().find(unit);
    if (it == detail::units().end()) throw ConfigError(path, "unknown unit '" + unit + "'");
    if (it->second.dim != dim)
        throw ConfigError(path, "unit '" + unit + "' is a " + to_string(it->second.dim) + ", field expects " +
                                    to_string(dim));
    return value * it->second.factor;
}

/// Walks one JSON object, tracking consumed keys so leftovers can be reported.
class BlockReader {
public:
    BlockReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    [[nodiscard]] double number(const std::string& key, Dim dim, std::optional<double> fallback = std::nullopt) {
        seen_.insert(key);
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(at(key), "required field is missing");
        }
        return quantity(j_.at(key), dim, at(key));
    }

    [[nodiscard]] std::vector<double> numbers(const std::string& key, Dim dim,
                                              std::optional<std::vector<double>> fallback = std::nullopt) {
        seen_.insert(key);
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(at(key), "required field is missing");
        }
        const json& v = j_.at(key);
        std::vector<double> out;
        if (v.is_array()) {
            if (v.empty()) throw ConfigError(at(key), "must not be empty");
            for (std::size_t i = 0; i < v.size(); ++i)
                out.push_back(quantity(v[i], dim, at(key) + "[" + std::to_string(i) + "]"));
        } else {
            out.push_back(quantity(v, dim, at(key)));
        }
        return out;
    }

    [[nodiscard]] std::size_t count(const std::string& key, std::size_t fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(at(key), "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    [[nodiscard]] bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        if (!j_.at(key).is_boolean()) throw ConfigError(at(key), "expected true or false");
        return j_.at(key).get<bool>();
    }

    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        if (!j_.at(key).is_string()) throw ConfigError(at(key), "expected a string");
        return j_.at(key).get<std::string>();
    }

    [[nodiscard]] const json* child(const std::string& key) {
        seen_.insert(key);
        return has(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(at(key), "unknown field");
    }

private:
    static double quantity(const json& v, Dim dim, const std::string& path) {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) return parse_quantity(v.get<std::string>(), dim, path);
        throw ConfigError(path, "expected a number or a quantity string");
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// ---------------------------------------------------------------------------
//  RunConfig
// ---------------------------------------------------------------------------

enum class Format { csv, json };

struct TimeMachineBlock {
    TimeMachineConfig config;
    double T_total = 0.0;               // s
    double x0 = 0.0;                    // m, half-width of the time-shifted region
    std::optional<double> quoted_traversal;  // s, externally quoted value to compare against
};

struct PulseBlock {
    double center_time = 0.0;
    double width = 0.0;
    double carrier = 0.0;
    double amplitude = 1.0;
    double injection_x = 0.0;
};

struct ExperimentBlock {
    double extent = 5e-3;                     // half-length of the array, m
    std::vector<double> probes = {-5e-3, 5e-3};
    std::optional<PulseBlock> pulse;          // automatic when absent
    double duration = 0.0;                    // s; 0 = automatic
    Boundaries boundaries;
    bool allow_failing = false;
    unsigned halvings = 0;
    double x_i = 0.1;                         // traversal query, m
    double x_f = 0.0;
    std::size_t samples = 201;                // curve / embedding resolution
};

struct RunConfig {
    std::vector<double> b0;
    double c_base = default_c_base;
    ArrayConfig array;
    std::optional<TimeMachineBlock> time_machine;
    ExperimentBlock experiment;
    std::string out_dir = "out";
    Format format = Format::csv;
    json resolved;  // document after overrides

    [[nodiscard]] WormholeGeometry geometry(std::size_t i = 0) const { return make_geometry(b0.at(i), c_base); }

    /// Short hash of the resolved configuration (output block excluded), for output filenames.
    [[nodiscard]] std::string hash() const {
        json physics = resolved;
        if (physics.is_object()) physics.erase("output");
        return io::short_hash(physics.dump());
    }
};

/// Apply "a.b.c=value". The value is parsed as JSON when possible, else kept as a string.
inline void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded()) value = raw;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError(key, "empty path component");
        if (!node->is_object()) {
            if (!node->is_null()) throw ConfigError(key, "cannot descend into a non-object");
            *node = json::object();
        }
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = std::move(value);
}

namespace detail {

inline Boundary parse_boundary(const std::string& s, const std::string& path) {
    if (s == "matched") return Boundary::matched;
    if (s == "open") return Boundary::open;
    if (s == "short") return Boundary::shorted;
    throw ConfigError(path, "expected matched, open or short");
}

inline ArrayConfig read_array(const json* j) {
    ArrayConfig a;
    if (!j) return a;
    BlockReader r(*j, "array");
    a.I_c = r.number("I_c_A", Dim::current, a.I_c);
    a.C0 = r.number("C0_F", Dim::capacitance, a.C0);
    a.C_s = r.number("C_s_F", Dim::capacitance, a.C_s);
    a.d = r.number("d_m", Dim::length, a.d);
    a.N = r.count("N", a.N);
    a.I_b_ratio = r.number("I_b_ratio", Dim::none, a.I_b_ratio);
    a.I_b_ratio_cap = r.number("I_b_ratio_cap", Dim::none, a.I_b_ratio_cap);
    a.f_signal_max = r.number("f_signal_max_Hz", Dim::frequency, a.f_signal_max);
    a.threshold_flux_ratio = r.number("threshold_flux_ratio", Dim::none, a.threshold_flux_ratio);
    a.grid_offset = r.number("grid_offset_m", Dim::length, a.grid_offset);
    r.finish();
    a.validate();
    return a;
}

inline TimeMachineBlock read_time_machine(const json& j, double b0, double c_base) {
    BlockReader r(j, "time_machine");
    TimeMachineBlock b;
    b.config.l0 = r.number("l0_m", Dim::length);
    b.config.ramp_time = r.number("ramp_time_s", Dim::time, 0.0);
    const json* sched = r.child("schedule");
    if (!sched || !sched->is_array() || sched->empty())
        throw ConfigError("time_machine.schedule", "required non-empty list of {duration_s, g_m_per_s2}");
    for (std::size_t i = 0; i < sched->size(); ++i) {
        BlockReader s((*sched)[i], "time_machine.schedule[" + std::to_string(i) + "]");
        AccelerationSegment seg;
        seg.duration = s.number("duration_s", Dim::time);
        seg.g = s.number("g_m_per_s2", Dim::acceleration);
        s.finish();
        b.config.schedule.push_back(seg);
    }
    b.config.validate(c_base);
    b.T_total = r.number("T_total_s", Dim::time, b.config.total_duration());
    if (!(b.T_total >= 0.0)) throw ConfigError("time_machine.T_total_s", "must be >= 0");
    // Default x0: the lab coordinate of the travelling mouth, l(x0) = l0.
    const double l0 = b.config.l0;
    b.x0 = r.number("x0_m", Dim::length, std::sqrt(b0 * b0 + l0 * l0) - b0);
    if (!(b.x0 > 0.0)) throw ConfigError("time_machine.x0_m", "must be > 0");
    if (r.has("quoted_traversal_s")) b.quoted_traversal = r.number("quoted_traversal_s", Dim::time);
    r.finish();
    return b;
}

inline ExperimentBlock read_experiment(const json* j) {
    ExperimentBlock e;
    if (!j) return e;
    BlockReader r(*j, "experiment");
    e.extent = r.number("extent_m", Dim::length, e.extent);
    if (!(e.extent > 0.0)) throw ConfigError("experiment.extent_m", "must be > 0");
    e.probes = r.numbers("probes_m", Dim::length, e.probes);
    if (const json* p = r.child("pulse")) {
        BlockReader pr(*p, "experiment.pulse");
        PulseBlock pb;
        pb.width = pr.number("width_s", Dim::time);
        if (!(pb.width > 0.0)) throw ConfigError("experiment.pulse.width_s", "must be > 0");
        pb.center_time = pr.number("center_time_s", Dim::time, PulseSpec::support_sigmas * pb.width);
        pb.carrier = pr.number("carrier_Hz", Dim::frequency, 0.0);
        pb.amplitude = pr.number("amplitude_V", Dim::voltage, 1.0);
        pb.injection_x = pr.number("injection_m", Dim::length);
        pr.finish();
        e.pulse = pb;
    }
    e.duration = r.number("duration_s", Dim::time, 0.0);
    if (const json* b = r.child("boundaries")) {
        BlockReader br(*b, "experiment.boundaries");
        e.boundaries.left = parse_boundary(br.text("left", "matched"), "experiment.boundaries.left");
        e.boundaries.right = parse_boundary(br.text("right", "matched"), "experiment.boundaries.right");
        br.finish();
    }
    e.allow_failing = r.boolean("allow_failing", false);
    e.halvings = static_cast<unsigned>(r.count("halvings", 0));
    if (e.halvings > 4) throw ConfigError("experiment.halvings", "at most 4");
    e.x_i = r.number("x_i_m", Dim::length, e.x_i);
    e.x_f = r.number("x_f_m", Dim::length, e.x_f);
    e.samples = r.count("samples", e.samples);
    if (e.samples < 2) throw ConfigError("experiment.samples", "must be >= 2");
    r.finish();
    return e;
}

}  // namespace detail

/// Validate a resolved document into a RunConfig.
[[nodiscard]] inline RunConfig from_json(const json& doc) {
    BlockReader top(doc, "");
    RunConfig cfg;
    cfg.resolved = doc;

    const json* geometry = top.child("geometry");
    if (!geometry) throw ConfigError("geometry.b0_m", "required field is missing");
    {
        BlockReader g(*geometry, "geometry");
        cfg.b0 = g.numbers("b0_m", Dim::length);
        for (std::size_t i = 0; i < cfg.b0.size(); ++i)
            if (!(cfg.b0[i] > 0.0) || !std::isfinite(cfg.b0[i]))
                throw ConfigError("geometry.b0_m", "must be > 0");
        cfg.c_base = g.number("c_base_m_per_s", Dim::speed, default_c_base);
        if (!(cfg.c_base > 0.0)) throw ConfigError("geometry.c_base_m_per_s", "must be > 0");
        g.finish();
    }
    cfg.array = detail::read_array(top.child("array"));
    if (const json* tm = top.child("time_machine"))
        cfg.time_machine = detail::read_time_machine(*tm, cfg.b0.front(), cfg.c_base);
    cfg.experiment = detail::read_experiment(top.child("experiment"));
    if (const json* out = top.child("output")) {
        BlockReader o(*out, "output");
        cfg.out_dir = o.text("directory", cfg.out_dir);
        const std::string fmt = o.text("format", "csv");
        if (fmt == "csv") cfg.format = Format::csv;
        else if (fmt == "json") cfg.format = Format::json;
        else throw ConfigError("output.format", "expected csv or json");
        o.finish();
    }
    top.finish();
    return cfg;
}

/// Parse the document text (empty = "{}"), apply overrides, validate.
[[nodiscard]] inline RunConfig load(const std::string& text, const std::vector<std::string>& overrides = {}) {
    json doc = json::object();
    if (!text.empty()) {
        doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
        if (doc.is_discarded()) throw ConfigError("<config>", "not valid JSON");
        if (!doc.is_object()) throw ConfigError("<config>", "top level must be an object");
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return from_json(doc);
}

}  // namespace wormsim::config
