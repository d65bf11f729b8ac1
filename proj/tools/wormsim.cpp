// wormsim: flux-bias synthesis, feasibility, time-machine budget and ladder
// propagation for SQUID-array wormhole emulators.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wormsim/commands.hpp"

namespace {

using wormsim::commands::CommandResult;

int run(const std::string& name, const std::string& config_path, const std::vector<std::string>& sets,
        const std::string& out, const std::string& format) {
    using namespace wormsim;
    try {
        std::vector<std::string> overrides = sets;
        if (!out.empty()) overrides.push_back("output.directory=" + nlohmann::json(out).dump());
        if (!format.empty()) overrides.push_back("output.format=" + nlohmann::json(format).dump());
        const std::string text = config_path.empty() ? std::string{} : io::read_text(config_path);
        const config::RunConfig cfg = config::load(text, overrides);

        CommandResult res;
        if (name == "flux-profile") res = commands::flux_profile(cfg);
        else if (name == "feasibility") res = commands::feasibility(cfg);
        else if (name == "time-machine") res = commands::time_machine(cfg);
        else if (name == "propagate") res = commands::propagate(cfg);
        else if (name == "embed") res = commands::embed(cfg);
        else if (name == "traversal") res = commands::traversal(cfg);

        for (const auto& f : res.files) std::cout << f.string() << '\n';
        std::cerr << res.summary.dump(2) << '\n';
        return res.status;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return commands::usage_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return commands::runtime_error;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wormsim: 1D traversable-wormhole emulation on a flux-biased dc-SQUID array"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    std::string format;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory (overrides output.directory)");
    app.add_option("--format", format, "csv or json (overrides output.format)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--set", sets, "override a field, e.g. --set geometry.b0_m=0.1mm (repeatable)")
        ->allow_extra_args(false);

    const std::vector<std::pair<std::string, std::string>> subcommands = {
        {"flux-profile", "emit the static flux-bias profile for each geometry.b0_m"},
        {"feasibility", "check a profile against impedance, continuum and plasma limits (exit 0/1/2)"},
        {"time-machine", "emit accelerated-mouth profiles and the time-shift budget"},
        {"propagate", "simulate a pulse on the LC ladder and compare with ray optics"},
        {"embed", "emit the (l, r, z) embedding-diagram profile"},
        {"traversal", "ray traversal time between experiment.x_i_m and experiment.x_f_m"},
    };
    for (const auto& [name, help] : subcommands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : wormsim::commands::usage_error;
    }
    return run(app.get_subcommands().front()->get_name(), config_path, sets, out, format);
}
