#include "riverlv/run.hpp"

#include "riverlv/bundle.hpp"
#include "riverlv/error.hpp"
#include "riverlv/experiments.hpp"
#include "riverlv/spectral.hpp"
#include "riverlv/steady.hpp"

#include <cmath>

namespace riverlv {

namespace {

using nlohmann::json;

// JSON has no infinities; keep reports parseable.
json num(double x) { return std::isfinite(x) ? json(x) : json(format_number(x)); }

json regime_json(const ModelParams& p) {
    RegimeReport r = classify_regime(p);
    return {{"ratio1", num(r.ratio1)},         {"ratio2", num(r.ratio2)},
            {"holds_c1", r.holds_c1},          {"holds_c2", r.holds_c2},
            {"ordering_d", r.ordering_d},      {"ordering_alpha", r.ordering_alpha},
            {"omega1", num(r.omega1)}};
}

json outcome_json(const Outcome& o) {
    return {{"verdict", to_string(o.verdict)}, {"final_norm_u", num(o.final_u)}, {"final_norm_v", num(o.final_v)},
            {"eps_extinct", num(o.eps_extinct)}, {"eps_settle", num(o.eps_settle)}, {"drift_u", num(o.drift_u)},
            {"drift_v", num(o.drift_v)}, {"settled", o.settled}};
}

RunSettings settings_from(const RunConfig& c) {
    RunSettings s;
    s.n = c.n;
    s.t_end = c.t_end;
    s.dt = c.dt;
    s.samples = c.samples;
    s.snapshot_times = c.snapshot_times;
    s.stability = c.stability;
    s.eps_settle = c.eps_settle;
    s.advection = c.advection;
    s.form = c.form;
    s.u0 = Expr::parse(c.u0);
    s.v0 = Expr::parse(c.v0);
    return s;
}

SteadyOptions steady_options(const RunConfig& c) {
    SteadyOptions o;
    o.tol = c.tol_steady;
    return o;
}

EigenOptions eigen_options(const RunConfig& c) {
    EigenOptions o;
    o.tol = c.tol_eigen;
    return o;
}

json simulation_report(const RunConfig& c, const SimulationRun& run) {
    json rep;
    rep["mode"] = c.mode;
    rep["outcome"] = outcome_json(run.outcome);
    rep["run"] = {{"n", run.grid.n},
                  {"dim", run.grid.dim},
                  {"t_end", num(run.t_end)},
                  {"dt", num(run.trajectory.dt)},
                  {"steps", run.trajectory.steps},
                  {"samples", run.trajectory.times.size()},
                  {"clamp_events", run.trajectory.clamp_events},
                  {"budget_exceeded", run.trajectory.budget_exceeded},
                  {"reaction_form", to_string(run.form)}};
    rep["regime"] = regime_json(run.params);
    if (run.stability) {
        const auto& s = *run.stability;
        rep["eigenvalues"] = {{"kappa1", num(s.kappa1)},
                              {"tau1", num(s.tau1)},
                              {"u_state", to_string(s.u_state)},
                              {"v_state", to_string(s.v_state)},
                              {"u_hat_max", num(s.u_hat_max)},
                              {"v_hat_max", num(s.v_hat_max)}};
    }
    return rep;
}

void write_simulation(const BundleWriter& out, const SimulationRun& run) {
    out.write_norms(run.trajectory);
    for (const auto& snap : run.trajectory.snapshots) out.write_snapshot(snap);
}

int run_simulate(const RunConfig& c, const BundleWriter& out) {
    SimulationRun sim = simulate(c.params, c.n, c.t_end, settings_from(c));
    write_simulation(out, sim);
    out.write_json("report.json", simulation_report(c, sim));
    return exit_ok;
}

int run_figure_mode(const RunConfig& c, const BundleWriter& out) {
    FigurePreset preset = find_preset(c.figure);
    preset.params = c.params;
    FigureRun fr = run_figure(preset, settings_from(c));
    write_simulation(out, fr.run);
    json rep = simulation_report(c, fr.run);
    rep["figure"] = {{"id", preset.id},
                     {"description", preset.description},
                     {"expected", to_string(preset.expected)},
                     {"matches_expected", fr.matches_expected}};
    out.write_json("report.json", rep);
    return exit_ok;
}

int run_steady(const RunConfig& c, const BundleWriter& out) {
    const Grid grid = c.params.grid(c.n);
    CompetitionSystem sys = build_system(c.params, grid, c.form, c.advection);
    SteadyOptions so = steady_options(c);
    SteadyState u_hat = solve_single_steady(sys.transport_u, sys.reactions.u, so);
    SteadyState v_hat = solve_single_steady(sys.transport_v, sys.reactions.v, so);
    json rep;
    rep["mode"] = c.mode;
    rep["regime"] = regime_json(c.params);
    auto single = [&](const SteadyState& s, double mu, const TransportOperator& L) {
        json j{{"residual", num(s.residual)},
               {"tolerance", num(s.tolerance)},
               {"method", to_string(s.method)},
               {"iterations", s.iterations},
               {"min", num(s.u.min())},
               {"max", num(s.u.max())},
               {"mass", num(s.u.mass())}};
        CapacityIntegralReport l = capacity_integral(s, build_effective_params(c.params, mu, grid));
        j["capacity_integral"] = {{"integral", num(l.integral)},
                                  {"squared_integral", num(l.squared_integral)},
                                  {"degenerate", l.degenerate}};
        LogDerivativeReport ld = log_derivative_bounds(s.u, L.d, L.alpha);
        j["log_derivative"] = {{"violations", ld.violations}, {"checked", ld.checked}, {"t_min", num(ld.t_min)},
                               {"t_max", num(ld.t_max)},       {"bound", num(ld.bound)}, {"band", num(ld.band)}};
        return j;
    };
    rep["u_hat"] = single(u_hat, c.params.mu1, sys.transport_u);
    rep["v_hat"] = single(v_hat, c.params.mu2, sys.transport_v);

    Field gu(grid), gv(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        gu[k] = sys.reactions.u.capacity[k] * (1.0 - sys.reactions.u.harvest) / 3.0;
        gv[k] = sys.reactions.v.capacity[k] * (1.0 - sys.reactions.v.harvest) / 3.0;
    }
    CoexistenceOptions co;
    co.tol = c.tol_steady;
    CoexistenceResult cr = solve_coexistence(sys, gu, gv, co);
    json cj{{"status", cr.status}, {"residual", num(cr.residual)}, {"iterations", cr.iterations},
            {"near_singular", cr.near_singular}};
    if (cr.near_singular) cj["note"] = "marginal/bifurcation point suspected";
    if (cr.pair && grid.dim == 1) {
        IdentityResiduals ir = coexistence_identities(*cr.pair, sys, c.params.a, c.params.b);
        cj["identities"] = {{"lhs_u", num(ir.lhs_u)}, {"rhs_u", num(ir.rhs_u)}, {"lhs_v", num(ir.lhs_v)},
                            {"rhs_v", num(ir.rhs_v)}, {"log_derivative", num(ir.log_derivative)}};
        out.write_fields("coexistence.csv", grid, {"u", "v"}, {&cr.pair->u, &cr.pair->v});
    }
    rep["coexistence"] = cj;
    out.write_fields("steady.csv", grid, {"u_hat", "v_hat"}, {&u_hat.u, &v_hat.u});
    out.write_json("report.json", rep);
    return exit_ok;
}

int run_eigen(const RunConfig& c, const BundleWriter& out) {
    const Grid grid = c.params.grid(c.n);
    CompetitionSystem sys = build_system(c.params, grid, c.form, c.advection);
    SteadyOptions so = steady_options(c);
    EigenOptions eo = eigen_options(c);
    StabilityVerdict su = stability_of_semitrivial(SemiTrivial::u_state, sys, so, eo, c.tol_marginal);
    StabilityVerdict sv = stability_of_semitrivial(SemiTrivial::v_state, sys, so, eo, c.tol_marginal);
    auto ej = [&](const StabilityVerdict& s) {
        return json{{"lambda1", num(s.eigen.lambda1)},     {"Lambda", num(s.eigen.Lambda)},
                    {"verdict", to_string(s.verdict)},     {"iterations", s.eigen.iterations},
                    {"residual", num(s.eigen.residual)},   {"bracket", {num(s.eigen.lower), num(s.eigen.upper)}},
                    {"method", to_string(s.eigen.method)}, {"steady_residual", num(s.base.residual)}};
    };
    json rep;
    rep["mode"] = c.mode;
    rep["regime"] = regime_json(c.params);
    rep["kappa1"] = ej(su);
    rep["tau1"] = ej(sv);
    out.write_fields("eigen.csv", grid, {"phi_kappa", "phi_tau"}, {&su.eigen.phi, &sv.eigen.phi});
    out.write_json("report.json", rep);
    return exit_ok;
}

int run_sweep(const RunConfig& c, const BundleWriter& out) {
    SweepOptions so;
    so.n_points = c.sweep_points;
    so.n = c.n;
    so.workers = c.workers;
    so.tol_marginal = c.tol_marginal;
    so.steady = steady_options(c);
    so.eigen = eigen_options(c);
    so.coexistence.tol = c.tol_steady;
    SweepResult r = sweep_alpha2(c.params, so);
    json rep;
    rep["mode"] = c.mode;
    rep["alpha1"] = num(r.alpha1);
    rep["omega1"] = num(r.omega1);
    rep["lower"] = num(r.lower);
    json pattern = json::array();
    for (Verdict v : r.pattern) pattern.push_back(to_string(v));
    rep["pattern"] = pattern;
    rep["transitions"] = r.transitions;
    rep["anomaly"] = r.anomaly;
    if (r.window)
        rep["window"] = {{"lo", num(r.window->first)}, {"hi", num(r.window->second)}, {"epsilon1", num(r.epsilon1)},
                         {"epsilon2", num(r.epsilon2)}};
    else
        rep["window"] = nullptr;
    std::string csv = "alpha2,kappa1,tau1,u_state,v_state,coexistence,verdict,refinement\n";
    json points = json::array();
    for (const auto& p : r.points) {
        csv += format_number(p.alpha2) + ',' + format_number(p.kappa1) + ',' + format_number(p.tau1) + ',' +
               to_string(p.u_state) + ',' + to_string(p.v_state) + ',' + p.coexistence_status + ',' +
               to_string(p.verdict) + ',' + (p.refinement ? "1" : "0") + '\n';
        points.push_back({{"alpha2", num(p.alpha2)},
                          {"kappa1", num(p.kappa1)},
                          {"tau1", num(p.tau1)},
                          {"verdict", to_string(p.verdict)},
                          {"coexistence", p.coexistence_status},
                          {"anomaly", p.anomaly}});
    }
    rep["points"] = points;
    out.write_text("sweep.csv", csv);
    out.write_json("report.json", rep);
    return r.anomaly ? exit_anomaly : exit_ok;
}

int run_verify(const RunConfig& c, const BundleWriter& out) {
    VerifyOptions vo;
    vo.n = c.n;
    vo.steady = steady_options(c);
    vo.eigen = eigen_options(c);
    vo.coexistence.tol = c.tol_steady;
    vo.tol_marginal = c.tol_marginal;
    VerifyReport r = verify_lemmas(c.params, vo);
    json rep;
    rep["mode"] = c.mode;
    rep["regime"] = regime_json(c.params);
    rep["all_pass"] = r.all_pass;
    json checks = json::array();
    for (const auto& ch : r.checks) {
        json values = json::object();
        for (const auto& [k, v] : ch.values) values[k] = num(v);
        json e{{"name", ch.name}, {"status", ch.status}, {"values", values}};
        if (!ch.note.empty()) e["note"] = ch.note;
        checks.push_back(e);
    }
    rep["checks"] = checks;
    out.write_json("report.json", rep);
    return exit_ok;
}

}  // namespace

int run(const RunConfig& c) {
    if (c.out_dir.empty()) throw ConfigError("an output directory is required (key 'out' or --out)");
    BundleWriter out(c.out_dir);
    out.write_json("config.echo.json", c.echo());
    if (c.mode == "simulate") return run_simulate(c, out);
    if (c.mode == "figure") return run_figure_mode(c, out);
    if (c.mode == "steady") return run_steady(c, out);
    if (c.mode == "eigen") return run_eigen(c, out);
    if (c.mode == "sweep") return run_sweep(c, out);
    if (c.mode == "verify") return run_verify(c, out);
    throw ConfigError("unknown mode '" + c.mode + "'");
}

int describe_error(std::exception_ptr error, std::string& record) {
    std::string kind, message;
    int code = exit_numerical;
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError& e) {
        kind = "config";
        message = e.what();
        code = exit_config;
    } catch (const NumericalError& e) {
        kind = "numerical";
        message = e.what();
        code = exit_numerical;
    } catch (const AnomalyError& e) {
        kind = "anomaly";
        message = e.what();
        code = exit_anomaly;
    } catch (const std::exception& e) {
        kind = "internal";
        message = e.what();
        code = exit_numerical;
    }
    record = json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump();
    return code;
}

}  // namespace riverlv
