#pragma once

#include "riverlv/model.hpp"
#include "riverlv/transport.hpp"

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

namespace riverlv {

struct RunConfig {
    std::string mode = "simulate";  // simulate, steady, eigen, sweep, figure, verify
    std::string figure;             // preset id in figure mode
    ModelParams params;
    int n = 0;
    double dt = 0.0;
    double t_end = 0.0;
    int samples = 100;
    std::vector<double> snapshot_times;
    std::string u0;
    std::string v0;
    double tol_steady = 1e-10;
    double tol_eigen = 1e-12;
    double tol_marginal = 1e-7;
    double eps_settle = 1e-4;
    int sweep_points = 33;
    Advection2d advection = Advection2d::x_axis;
    ReactionForm form = ReactionForm::transformed;
    double wall_budget = 0.0;
    bool stability = true;

    // Not part of the echo: they do not change results.
    std::string out_dir;
    int workers = 1;

    std::set<std::string> defaulted;

    // Resolved configuration with every value explicit and a "defaulted" list.
    nlohmann::json echo() const;
};

// Validates everything the later stages depend on; throws ConfigError naming the key.
RunConfig parse_config(const nlohmann::json& doc);
// Reads a JSON file (optional, empty path skips it) and applies the overrides on top.
RunConfig load_config(const std::string& path, const nlohmann::json& overrides);

// Environment override for the worker count.
inline constexpr const char* kWorkersEnv = "RIVERLV_WORKERS";

}  // namespace riverlv
