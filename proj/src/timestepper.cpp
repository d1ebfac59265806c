#include "riverlv/timestepper.hpp"

#include "riverlv/error.hpp"
#include "riverlv/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace riverlv {

double CompetitionSystem::dt_max() const {
    double m = std::max(reactions.u.max_rate(), reactions.v.max_rate());
    return m > 0.0 ? 0.9 / m : INFINITY;
}

CompetitionSystem build_system(const ModelParams& params, const Grid& grid, ReactionForm form, Advection2d advection) {
    params.validate();
    CompetitionSystem sys{assemble(grid, params.d1, params.alpha1, advection),
                          assemble(grid, params.d2, params.alpha2, advection), make_reactions(params, grid, form)};
    return sys;
}

ImexStepper::ImexStepper(const CompetitionSystem& system, double dt) : sys_(&system), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
    lu_u_ = BandedLU(system.transport_u.to_banded(-dt, 1.0), Pivoting::none);
    lu_v_ = BandedLU(system.transport_v.to_banded(-dt, 1.0), Pivoting::none);
}

namespace {

std::size_t clamp_and_check(Field& f) {
    std::size_t clamps = 0;
    for (double& x : f.values) {
        if (!std::isfinite(x)) throw NumericalError("non-finite density produced by time step");
        if (x < 0.0) {
            x = 0.0;
            ++clamps;
        }
    }
    return clamps;
}

}  // namespace

SpeciesState ImexStepper::step(const SpeciesState& s) {
    const auto& kt = kernels::active();
    const std::size_t N = s.u.size();
    const auto& ru = sys_->reactions.u;
    const auto& rv = sys_->reactions.v;
    SpeciesState out{s.t + dt_, Field(s.u.grid), Field(s.v.grid)};
    kt.logistic_step(N, s.u.values.data(), s.v.values.data(), ru.growth.values.data(), ru.capacity.values.data(),
                     ru.harvest, dt_, out.u.values.data());
    kt.logistic_step(N, s.v.values.data(), s.u.values.data(), rv.growth.values.data(), rv.capacity.values.data(),
                     rv.harvest, dt_, out.v.values.data());
    lu_u_.solve(out.u.span());
    lu_v_.solve(out.v.span());
    clamps_ += clamp_and_check(out.u);
    clamps_ += clamp_and_check(out.v);
    return out;
}

Trajectory integrate(const CompetitionSystem& system, const SpeciesState& initial, const IntegrateOptions& opts) {
    if (!(opts.t_end >= 0.0) || !std::isfinite(opts.t_end)) throw ConfigError("t_end must be a nonnegative number");
    if (opts.samples < 1) throw ConfigError("samples must be at least 1");
    double dt = opts.dt > 0.0 ? opts.dt : std::min(system.dt_max(), 0.1);
    if (dt > system.dt_max()) throw ConfigError("dt exceeds the explicit reaction limit 0.9/max(r*r1)");

    Trajectory traj;
    const long steps = opts.t_end > 0.0 ? static_cast<long>(std::ceil(opts.t_end / dt - 1e-9)) : 0;
    if (steps > 0) dt = opts.t_end / static_cast<double>(steps);
    traj.dt = dt;

    auto record = [&](const SpeciesState& s) {
        traj.times.push_back(s.t);
        traj.norm_u.push_back(s.u.max_abs());
        traj.norm_v.push_back(s.v.max_abs());
        traj.mass_u.push_back(s.u.mass());
        traj.mass_v.push_back(s.v.mass());
    };
    std::vector<double> snaps = opts.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    std::vector<long> snap_steps;
    for (double ts : snaps) {
        if (ts < 0.0 || ts > opts.t_end) throw ConfigError("snapshot time outside [0, t_end]");
        snap_steps.push_back(steps > 0 ? std::lround(ts / dt) : 0);
    }
    std::size_t next_snap = 0;
    auto maybe_snapshot = [&](long k, const SpeciesState& s) {
        while (next_snap < snap_steps.size() && snap_steps[next_snap] == k) {
            traj.snapshots.push_back({snaps[next_snap], s.u, s.v});
            ++next_snap;
        }
    };

    SpeciesState state = initial;
    state.t = 0.0;
    record(state);
    maybe_snapshot(0, state);
    if (steps == 0) {
        traj.final_state = state;
        return traj;
    }
    ImexStepper stepper(system, dt);
    const long samples = std::min<long>(opts.samples, steps);
    const auto start = std::chrono::steady_clock::now();
    long next_sample = 1;
    for (long k = 1; k <= steps; ++k) {
        state = stepper.step(state);
        state.t = static_cast<double>(k) * dt;
        // Sample m lands on step round(m*steps/samples), so the last sample is the final step.
        if (k == (next_sample * steps + samples / 2) / samples || k == steps) {
            record(state);
            ++next_sample;
        }
        maybe_snapshot(k, state);
        if (opts.wall_budget_seconds > 0.0 && (k & 63) == 0) {
            double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (elapsed > opts.wall_budget_seconds) {
                traj.budget_exceeded = true;
                if (traj.times.back() != state.t) record(state);
                traj.steps = static_cast<std::size_t>(k);
                break;
            }
        }
        traj.steps = static_cast<std::size_t>(k);
    }
    traj.final_state = state;
    traj.clamp_events = stepper.clamp_events();
    return traj;
}

Outcome classify_outcome(const Trajectory& traj, double eps_extinct, double eps_settle) {
    Outcome out;
    out.eps_extinct = eps_extinct;
    out.eps_settle = eps_settle;
    const std::size_t m = traj.times.size();
    if (m == 0) return out;
    out.final_u = traj.norm_u.back();
    out.final_v = traj.norm_v.back();
    if (m >= 2) {
        // Window: the last 10% of samples, at least one consecutive pair.
        std::size_t w = std::max<std::size_t>(1, m / 10);
        auto drift = [&](const std::vector<double>& norm) {
            double worst = 0.0;
            for (std::size_t k = m - w; k < m; ++k) {
                double scale = std::max(std::fabs(norm[k]), std::fabs(norm[k - 1]));
                double rel = scale > 0.0 ? std::fabs(norm[k] - norm[k - 1]) / scale : 0.0;
                worst = std::max(worst, rel);
            }
            return worst;
        };
        out.drift_u = drift(traj.norm_u);
        out.drift_v = drift(traj.norm_v);
        out.settled = out.drift_u < eps_settle && out.drift_v < eps_settle;
    }
    const bool u_alive = out.final_u >= eps_extinct;
    const bool v_alive = out.final_v >= eps_extinct;
    if (traj.budget_exceeded)
        out.verdict = Verdict::Undecided;
    else if (!u_alive && !v_alive)
        out.verdict = Verdict::BothExtinct;
    else if (u_alive && !v_alive)
        out.verdict = Verdict::UWins;
    else if (!u_alive && v_alive)
        out.verdict = Verdict::VWins;
    else
        out.verdict = out.settled ? Verdict::Coexistence : Verdict::Undecided;
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::UWins: return "UWins";
        case Verdict::VWins: return "VWins";
        case Verdict::Coexistence: return "Coexistence";
        case Verdict::BothExtinct: return "BothExtinct";
        case Verdict::Undecided: return "Undecided";
    }
    return "Undecided";
}

Verdict verdict_from_string(const std::string& s) {
    for (Verdict v : {Verdict::UWins, Verdict::VWins, Verdict::Coexistence, Verdict::BothExtinct, Verdict::Undecided})
        if (to_string(v) == s) return v;
    throw ConfigError("unknown verdict '" + s + "'");
}

}  // namespace riverlv
