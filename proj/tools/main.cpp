// riverlv: command-line entry point. One subcommand per pipeline; every scalar
// configuration key also has a flag, and flags win over the --config file.

#include "riverlv/config.hpp"
#include "riverlv/error.hpp"
#include "riverlv/run.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using nlohmann::json;

struct Flags {
    std::map<std::string, std::optional<double>> reals;
    std::map<std::string, std::optional<long>> integers;
    std::map<std::string, std::optional<std::string>> texts;
    std::optional<bool> stability;
};

void add_flags(CLI::App& app, Flags& f) {
    for (const char* key : {"a", "b", "d1", "d2", "alpha1", "alpha2", "mu", "mu1", "mu2", "dt", "t_end", "tol_steady",
                            "tol_eigen", "tol_marginal", "eps_settle", "wall_budget"})
        app.add_option(std::string("--") + key, f.reals[key])->group("Model and numerics");
    for (const char* key : {"dim", "n", "samples", "sweep_points", "workers"})
        app.add_option(std::string("--") + key, f.integers[key])->group("Model and numerics");
    for (const char* key : {"r", "K", "u0", "v0", "advection_2d", "reaction_form"})
        app.add_option(std::string("--") + key, f.texts[key], "expression or keyword")->group("Model and numerics");
    app.add_option("--stability", f.stability, "compute semi-trivial eigenvalues (true/false)")
        ->group("Model and numerics");
}

json overrides_from(const Flags& f) {
    json o = json::object();
    for (const auto& [k, v] : f.reals)
        if (v) o[k] = *v;
    for (const auto& [k, v] : f.integers)
        if (v) o[k] = *v;
    for (const auto& [k, v] : f.texts)
        if (v) o[k] = *v;
    if (f.stability) o["stability"] = *f.stability;
    return o;
}

void report_error(const std::string& record, const std::string& out_dir) {
    std::cerr << record << '\n';
    if (out_dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) return;
    std::ofstream(std::filesystem::path(out_dir) / "error.json", std::ios::binary) << record << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"riverlv: two-species competition in a river, with harvesting"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir, figure_id;
    Flags flags;
    app.add_option("-c,--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_dir, "output directory for the run bundle");
    add_flags(app, flags);

    app.add_subcommand("simulate", "integrate the time-dependent system");
    app.add_subcommand("steady", "semi-trivial and coexistence steady states");
    app.add_subcommand("eigen", "principal eigenvalues at the semi-trivial states");
    app.add_subcommand("sweep", "alpha2 sweep and coexistence window");
    auto* figure = app.add_subcommand("figure", "run a built-in figure preset");
    figure->add_option("id", figure_id, "preset id (fig1, fig2, ...)")->required();
    app.add_subcommand("verify", "lemma and identity checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : riverlv::exit_config;
    }

    const std::string mode = app.get_subcommands().front()->get_name();
    json overrides = overrides_from(flags);
    overrides["mode"] = mode;
    if (mode == "figure") overrides["figure"] = figure_id;
    if (!out_dir.empty()) overrides["out"] = out_dir;

    std::string resolved_out = out_dir;
    try {
        riverlv::RunConfig config = riverlv::load_config(config_path, overrides);
        resolved_out = config.out_dir;
        return riverlv::run(config);
    } catch (...) {
        std::string record;
        int code = riverlv::describe_error(std::current_exception(), record);
        report_error(record, resolved_out);
        return code;
    }
}
