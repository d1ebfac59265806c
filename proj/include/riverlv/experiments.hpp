#pragma once

#include "riverlv/model.hpp"
#include "riverlv/spectral.hpp"
#include "riverlv/steady.hpp"
#include "riverlv/timestepper.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace riverlv {

struct FigurePreset {
    std::string id;
    std::string description;
    ModelParams params;
    int n = 256;
    double t_end = 2000.0;
    Verdict expected = Verdict::Undecided;
};

const std::vector<FigurePreset>& figure_catalog();
// Throws ConfigError for an unknown id.
const FigurePreset& find_preset(const std::string& id);

// Default initial density: half the smallest effective capacity over both species.
double default_initial_density(const ModelParams& params, const Grid& grid);

struct RunSettings {
    int n = 0;            // 0 keeps the preset grid
    double t_end = -1.0;  // negative keeps the preset horizon
    double dt = 0.0;
    int samples = 100;
    std::vector<double> snapshot_times;  // empty: initial and final state
    bool stability = true;               // also compute kappa1 and tau1
    double eps_settle = 1e-4;
    Advection2d advection = Advection2d::x_axis;
    ReactionForm form = ReactionForm::transformed;  // downgraded to raw when harvests differ
    std::optional<Expr> u0;
    std::optional<Expr> v0;
};

struct StabilitySummary {
    double kappa1 = 0.0;
    double tau1 = 0.0;
    Stability u_state = Stability::marginal;
    Stability v_state = Stability::marginal;
    double u_hat_max = 0.0;
    double v_hat_max = 0.0;
};

struct SimulationRun {
    ModelParams params;
    Grid grid;
    ReactionForm form = ReactionForm::transformed;
    double t_end = 0.0;
    double u0_value = 0.0;
    Trajectory trajectory;
    Outcome outcome;
    std::optional<StabilitySummary> stability;
};

SimulationRun simulate(const ModelParams& params, int n, double t_end, const RunSettings& settings);

struct FigureRun {
    FigurePreset preset;
    SimulationRun run;
    bool matches_expected = false;
};

FigureRun run_figure(const FigurePreset& preset, const RunSettings& settings = {});

struct SweepOptions {
    int n_points = 33;
    int n = 128;
    int workers = 1;
    int bisection_steps = 6;
    double tol_marginal = 1e-7;
    SteadyOptions steady;
    EigenOptions eigen;
    CoexistenceOptions coexistence;
};

struct SweepPoint {
    double alpha2 = 0.0;
    double kappa1 = 0.0;
    double tau1 = 0.0;
    Stability u_state = Stability::marginal;
    Stability v_state = Stability::marginal;
    bool coexistence_found = false;
    std::string coexistence_status;
    Verdict verdict = Verdict::Undecided;
    bool anomaly = false;
    bool refinement = false;  // added by edge bisection
};

struct SweepResult {
    double alpha1 = 0.0;
    double omega1 = 0.0;
    double lower = 0.0;  // omega1 * alpha1
    std::vector<SweepPoint> points;  // sorted by alpha2
    std::optional<std::pair<double, double>> window;
    double epsilon1 = 0.0;
    double epsilon2 = 0.0;
    std::vector<Verdict> pattern;  // verdict runs in alpha2 order
    int transitions = 0;
    bool anomaly = false;
};

// Sweeps alpha2 over the open interval (omega1*alpha1, alpha1); base.alpha2 is ignored.
SweepResult sweep_alpha2(const ModelParams& base, const SweepOptions& opts = {});
// Verdict of a single alpha2 from the stability pair and the coexistence solve.
Verdict sweep_verdict(Stability u_state, Stability v_state, bool coexistence_found);

struct CheckEntry {
    std::string name;
    std::string status;  // pass, fail, degenerate, skipped, reported
    std::vector<std::pair<std::string, double>> values;
    std::string note;
};

struct VerifyReport {
    std::vector<CheckEntry> checks;
    bool all_pass = true;
};

struct VerifyOptions {
    int n = 256;
    SteadyOptions steady;
    EigenOptions eigen;
    CoexistenceOptions coexistence;
    double tol_marginal = 1e-7;
};

VerifyReport verify_lemmas(const ModelParams& params, const VerifyOptions& opts = {});

}  // namespace riverlv
