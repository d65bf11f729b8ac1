#pragma once

/**
 * @file io.hpp
 * @brief CSV and JSON serialization of profiles, probe series and schedules.
 *
 * Numbers are written with 17 significant digits, so reading a file back and
 * writing it again reproduces it byte for byte.
 */

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wormsim/propagation.hpp"
#include "wormsim/spacetime.hpp"
#include "wormsim/squid_array.hpp"
#include "wormsim/time_machine.hpp"

namespace wormsim::io {

using ordered_json = nlohmann::ordered_json;

[[nodiscard]] inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
//  CSV
// ---------------------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::out_of_range("csv: no column named " + name);
    }
};

inline void write_csv(std::ostream& os, const CsvTable& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
}

[[nodiscard]] inline CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw std::runtime_error("csv line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != t.header.size())
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(t.header.size()) + " fields");
        t.rows.push_back(std::move(row));
    }
    return t;
}

[[nodiscard]] inline std::string to_csv_string(const CsvTable& t) {
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

[[nodiscard]] inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

[[nodiscard]] inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------------
//  Flux profiles
// ---------------------------------------------------------------------------

inline const std::vector<std::string> profile_columns = {"index",         "x_m",  "flux_Wb",
                                                         "flux_over_phi0", "L_s_H", "impedance_ratio"};

/// index, x_m, flux_Wb, flux_over_phi0, L_s_H, impedance_ratio [, t_s]
[[nodiscard]] inline CsvTable profile_table(const FluxProfile& p, const ArrayConfig& cfg,
                                            const PhysicalConstants& k = {}) {
    CsvTable t;
    t.header = profile_columns;
    const bool timed = p.provenance().time_machine;
    if (timed) t.header.push_back("t_s");
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double phi = p.fluxes()[n];
        std::vector<double> row = {static_cast<double>(n), p.positions()[n], phi, p.flux_ratio(n),
                                   squid_inductance(phi, cfg, k), impedance_ratio(phi, cfg, k)};
        if (timed) row.push_back(p.provenance().t);
        t.rows.push_back(std::move(row));
    }
    return t;
}

[[nodiscard]] inline ordered_json provenance_json(const ProfileProvenance& prov) {
    ordered_json j;
    j["b0_m"] = prov.b0;
    j["c_base_m_per_s"] = prov.c_base;
    j["label"] = prov.label;
    if (prov.time_machine) {
        j["l0_m"] = prov.l0;
        j["g_m_per_s2"] = prov.g;
        j["t_s"] = prov.t;
    }
    j["warnings"] = prov.warnings;
    return j;
}

/// Same fields as the CSV, one object per SQUID, plus a provenance block.
[[nodiscard]] inline ordered_json profile_json(const FluxProfile& p, const ArrayConfig& cfg,
                                               const PhysicalConstants& k = {}) {
    const CsvTable t = profile_table(p, cfg, k);
    ordered_json j;
    j["provenance"] = provenance_json(p.provenance());
    ordered_json samples = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json s;
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (t.header[c] == "index")
                s[t.header[c]] = static_cast<std::uint64_t>(row[c]);
            else
                s[t.header[c]] = row[c];
        }
        samples.push_back(std::move(s));
    }
    j["samples"] = std::move(samples);
    return j;
}

// ---------------------------------------------------------------------------
//  Probe series
// ---------------------------------------------------------------------------

/// t_s followed by one V column per probe, named by node index.
[[nodiscard]] inline CsvTable probe_table(const std::vector<ProbeSeries>& probes) {
    CsvTable t;
    t.header.push_back("t_s");
    for (const auto& p : probes) t.header.push_back("V_node" + std::to_string(p.node));
    if (probes.empty()) return t;
    const std::size_t n = probes.front().voltages.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row{probes.front().time(i)};
        for (const auto& p : probes) row.push_back(p.voltages.at(i));
        t.rows.push_back(std::move(row));
    }
    return t;
}

[[nodiscard]] inline ordered_json pulse_json(const PulseSpec& p) {
    ordered_json j;
    j["shape"] = "gaussian";
    j["center_time_s"] = p.center_time;
    j["width_s"] = p.width;
    j["carrier_Hz"] = p.carrier;
    j["amplitude_V"] = p.amplitude;
    j["injection_node"] = p.injection_node;
    j["band_edge_Hz"] = p.band_edge();
    return j;
}

// ---------------------------------------------------------------------------
//  Time-machine schedule
// ---------------------------------------------------------------------------

[[nodiscard]] inline ordered_json schedule_json(const TimeMachineConfig& tm) {
    ordered_json j;
    j["l0_m"] = tm.l0;
    j["ramp_time_s"] = tm.ramp_time;
    ordered_json segs = ordered_json::array();
    for (const auto& s : tm.schedule) {
        ordered_json seg;
        seg["duration_s"] = s.duration;
        seg["g_m_per_s2"] = s.g;
        segs.push_back(std::move(seg));
    }
    j["schedule"] = std::move(segs);
    return j;
}

[[nodiscard]] inline TimeMachineConfig schedule_from_json(const ordered_json& j) {
    TimeMachineConfig tm;
    tm.l0 = j.at("l0_m").get<double>();
    tm.ramp_time = j.value("ramp_time_s", 0.0);
    for (const auto& seg : j.at("schedule"))
        tm.schedule.push_back({seg.at("duration_s").get<double>(), seg.at("g_m_per_s2").get<double>()});
    return tm;
}

// ---------------------------------------------------------------------------
//  Misc
// ---------------------------------------------------------------------------

/// FNV-1a, 64 bit.
[[nodiscard]] inline std::uint64_t fnv1a(const std::string& s) noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

[[nodiscard]] inline std::string short_hash(const std::string& s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return std::string(buf, 8);
}

}  // namespace wormsim::io
