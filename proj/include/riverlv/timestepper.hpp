#pragma once

#include "riverlv/banded.hpp"
#include "riverlv/model.hpp"
#include "riverlv/transport.hpp"

#include <string>
#include <vector>

namespace riverlv {

// Transport operators and kinetics for both species on one grid.
struct CompetitionSystem {
    TransportOperator transport_u;
    TransportOperator transport_v;
    ReactionPair reactions;

    const Grid& grid() const { return transport_u.grid; }
    // Largest stable explicit step for the reaction: 0.9 / max per-capita growth.
    double dt_max() const;
};

CompetitionSystem build_system(const ModelParams& params, const Grid& grid, ReactionForm form,
                               Advection2d advection = Advection2d::x_axis);

struct SpeciesState {
    double t = 0.0;
    Field u;
    Field v;
};

// IMEX Euler: (I - dt L_u) u' = u + dt R_u(u,v), likewise for v. Factorisations are
// built once and reused.
class ImexStepper {
public:
    ImexStepper(const CompetitionSystem& system, double dt);

    SpeciesState step(const SpeciesState& s);
    double dt() const { return dt_; }
    std::size_t clamp_events() const { return clamps_; }

private:
    const CompetitionSystem* sys_;
    double dt_;
    BandedLU lu_u_, lu_v_;
    std::size_t clamps_ = 0;
};

struct Snapshot {
    double t = 0.0;
    Field u;
    Field v;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> norm_u, norm_v, mass_u, mass_v;
    std::vector<Snapshot> snapshots;
    SpeciesState final_state;
    double dt = 0.0;
    std::size_t steps = 0;
    std::size_t clamp_events = 0;
    bool budget_exceeded = false;
};

struct IntegrateOptions {
    double t_end = 0.0;
    double dt = 0.0;  // 0 selects min(dt_max, 0.1)
    int samples = 100;
    std::vector<double> snapshot_times;
    double wall_budget_seconds = 0.0;  // 0 means unlimited
};

// Step count is ceil(t_end/dt) with dt shrunk to land on t_end exactly.
Trajectory integrate(const CompetitionSystem& system, const SpeciesState& initial, const IntegrateOptions& opts);

enum class Verdict { UWins, VWins, Coexistence, BothExtinct, Undecided };

struct Outcome {
    Verdict verdict = Verdict::Undecided;
    double final_u = 0.0;
    double final_v = 0.0;
    double eps_extinct = 0.0;
    double eps_settle = 0.0;
    double drift_u = 0.0;  // largest relative change per sample over the last 10%
    double drift_v = 0.0;
    bool settled = false;
};

Outcome classify_outcome(const Trajectory& traj, double eps_extinct, double eps_settle);

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

}  // namespace riverlv
