#include "riverlv/config.hpp"

#include "riverlv/error.hpp"
#include "riverlv/experiments.hpp"
#include "riverlv/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace riverlv {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "mode", "figure", "dim", "a", "b", "d1", "d2", "alpha1", "alpha2", "mu", "mu1", "mu2", "r", "K", "u0", "v0",
    "n", "dt", "t_end", "samples", "snapshot_times", "tol_steady", "tol_eigen", "tol_marginal", "eps_settle",
    "sweep_points", "advection_2d", "reaction_form", "wall_budget", "stability", "out", "workers", "defaulted"};

const std::set<std::string> kModes = {"simulate", "steady", "eigen", "sweep", "figure", "verify"};

class Reader {
public:
    explicit Reader(const json& doc) : doc_(doc) {
        if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
        for (auto it = doc.begin(); it != doc.end(); ++it)
            if (!kKnownKeys.count(it.key())) throw ConfigError("unknown configuration key '" + it.key() + "'");
    }

    bool has(const std::string& key) const { return doc_.contains(key) && !doc_.at(key).is_null(); }

    double number(const std::string& key) const {
        const json& v = doc_.at(key);
        if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
        double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError("key '" + key + "' must be finite");
        return x;
    }

    int integer(const std::string& key) const {
        const json& v = doc_.at(key);
        if (!v.is_number_integer()) throw ConfigError("key '" + key + "' must be an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key) const {
        const json& v = doc_.at(key);
        if (!v.is_boolean()) throw ConfigError("key '" + key + "' must be true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& key) const {
        const json& v = doc_.at(key);
        if (v.is_string()) return v.get<std::string>();
        throw ConfigError("key '" + key + "' must be a string");
    }

    // Expressions may be given as strings or plain numbers.
    std::string expression(const std::string& key) const {
        const json& v = doc_.at(key);
        std::string src;
        if (v.is_string())
            src = v.get<std::string>();
        else if (v.is_number())
            src = Expr::constant(v.get<double>()).source();
        else
            throw ConfigError("key '" + key + "' must be an expression string or a number");
        try {
            Expr::parse(src);
        } catch (const ConfigError& e) {
            throw ConfigError("key '" + key + "': " + e.what());
        }
        return src;
    }

    const json& raw(const std::string& key) const { return doc_.at(key); }

private:
    const json& doc_;
};

void require(bool ok, const std::string& key, const std::string& constraint) {
    if (!ok) throw ConfigError("key '" + key + "' " + constraint);
}

}  // namespace

RunConfig parse_config(const json& doc) {
    Reader in(doc);
    RunConfig c;
    auto mark = [&](const char* key) { c.defaulted.insert(key); };

    if (in.has("defaulted")) {
        const json& d = in.raw("defaulted");
        if (!d.is_array()) throw ConfigError("key 'defaulted' must be an array of key names");
        for (const auto& k : d) {
            if (!k.is_string() || !kKnownKeys.count(k.get<std::string>()))
                throw ConfigError("key 'defaulted' lists an unknown key");
            c.defaulted.insert(k.get<std::string>());
        }
    }

    if (in.has("mode")) c.mode = in.text("mode");
    require(kModes.count(c.mode) > 0, "mode", "must be one of simulate, steady, eigen, sweep, figure, verify");

    const FigurePreset* preset = nullptr;
    if (c.mode == "figure") {
        require(in.has("figure"), "figure", "is required in figure mode");
        c.figure = in.text("figure");
        preset = &find_preset(c.figure);
        c.params = preset->params;
    } else if (in.has("figure")) {
        throw ConfigError("key 'figure' is only valid in figure mode");
    }

    ModelParams& p = c.params;
    if (in.has("dim")) p.dim = in.integer("dim");
    else if (!preset) mark("dim");
    require(p.dim == 1 || p.dim == 2, "dim", "must be 1 or 2");
    if (in.has("a")) p.a = in.number("a");
    else if (!preset) mark("a");
    if (in.has("b")) p.b = in.number("b");
    else if (!preset) mark("b");
    require(p.a < p.b, "b", "must exceed a");

    auto required_or_preset = [&](const char* key, double& slot) {
        if (in.has(key)) slot = in.number(key);
        else if (!preset) throw ConfigError(std::string("key '") + key + "' is required");
    };
    required_or_preset("d1", p.d1);
    required_or_preset("d2", p.d2);
    required_or_preset("alpha1", p.alpha1);
    if (c.mode == "sweep" && !in.has("alpha2")) {
        p.alpha2 = 0.5 * (p.d2 / p.d1 * p.alpha1 + p.alpha1);
        mark("alpha2");
    } else {
        required_or_preset("alpha2", p.alpha2);
    }
    require(p.d1 > 0.0, "d1", "must be positive");
    require(p.d2 > 0.0, "d2", "must be positive");

    if (in.has("mu") && (in.has("mu1") || in.has("mu2")))
        throw ConfigError("key 'mu' cannot be combined with 'mu1'/'mu2'");
    if (in.has("mu")) {
        p.mu1 = p.mu2 = in.number("mu");
        require(p.mu1 >= 0.0 && p.mu1 < 1.0, "mu", "is invalid: mu must lie in [0,1)");
    } else if (in.has("mu1") || in.has("mu2")) {
        require(in.has("mu1") && in.has("mu2"), "mu1", "and 'mu2' must be given together");
        p.mu1 = in.number("mu1");
        p.mu2 = in.number("mu2");
        require(p.mu1 >= 0.0 && p.mu1 < 1.0, "mu1", "is invalid: mu1 must lie in [0,1)");
        require(p.mu2 >= 0.0 && p.mu2 < 1.0, "mu2", "is invalid: mu2 must lie in [0,1)");
    } else if (!preset) {
        p.mu1 = p.mu2 = 0.0;
        mark("mu1");
        mark("mu2");
    }

    if (in.has("r")) p.r = Expr::parse(in.expression("r"));
    else if (!preset) mark("r");
    if (in.has("K")) p.K = Expr::parse(in.expression("K"));
    else if (!preset) {
        p.K = Expr::parse(p.dim == 1 ? "2+cos(pi*x)" : "2+cos(pi*x)*cos(pi*y)");
        mark("K");
    }

    if (in.has("n")) c.n = in.integer("n");
    else {
        c.n = preset ? preset->n : (p.dim == 1 ? 256 : 64);
        mark("n");
    }
    require(c.n >= 3, "n", "must be at least 3");

    if (in.has("t_end")) c.t_end = in.number("t_end");
    else {
        c.t_end = preset ? preset->t_end : 2000.0;
        mark("t_end");
    }
    require(c.t_end >= 0.0, "t_end", "must be nonnegative");

    if (in.has("samples")) c.samples = in.integer("samples");
    else mark("samples");
    require(c.samples >= 1, "samples", "must be at least 1");

    if (in.has("snapshot_times")) {
        const json& s = in.raw("snapshot_times");
        if (!s.is_array()) throw ConfigError("key 'snapshot_times' must be an array of numbers");
        for (const auto& t : s) {
            if (!t.is_number()) throw ConfigError("key 'snapshot_times' must be an array of numbers");
            c.snapshot_times.push_back(t.get<double>());
        }
    } else {
        c.snapshot_times = {0.0, c.t_end};
        mark("snapshot_times");
    }
    for (double t : c.snapshot_times)
        require(t >= 0.0 && t <= c.t_end, "snapshot_times", "entries must lie in [0, t_end]");

    if (in.has("tol_steady")) c.tol_steady = in.number("tol_steady");
    else mark("tol_steady");
    require(c.tol_steady > 0.0, "tol_steady", "must be positive");
    if (in.has("tol_eigen")) c.tol_eigen = in.number("tol_eigen");
    else mark("tol_eigen");
    require(c.tol_eigen > 0.0, "tol_eigen", "must be positive");
    if (in.has("tol_marginal")) c.tol_marginal = in.number("tol_marginal");
    else mark("tol_marginal");
    require(c.tol_marginal >= 0.0, "tol_marginal", "must be nonnegative");
    if (in.has("eps_settle")) c.eps_settle = in.number("eps_settle");
    else mark("eps_settle");
    require(c.eps_settle > 0.0, "eps_settle", "must be positive");
    if (in.has("sweep_points")) c.sweep_points = in.integer("sweep_points");
    else mark("sweep_points");
    require(c.sweep_points >= 8, "sweep_points", "must be at least 8");
    if (in.has("wall_budget")) c.wall_budget = in.number("wall_budget");
    else mark("wall_budget");
    require(c.wall_budget >= 0.0, "wall_budget", "must be nonnegative");
    if (in.has("stability")) c.stability = in.boolean("stability");
    else mark("stability");

    if (in.has("advection_2d")) {
        std::string a = in.text("advection_2d");
        require(a == "x" || a == "xy", "advection_2d", "must be \"x\" or \"xy\"");
        c.advection = a == "x" ? Advection2d::x_axis : Advection2d::diagonal;
    } else {
        mark("advection_2d");
    }
    if (in.has("reaction_form")) {
        std::string f = in.text("reaction_form");
        require(f == "transformed" || f == "raw", "reaction_form", "must be \"transformed\" or \"raw\"");
        c.form = f == "raw" ? ReactionForm::raw : ReactionForm::transformed;
        require(c.form == ReactionForm::raw || p.equal_harvest(), "reaction_form",
                "\"transformed\" needs mu1 == mu2");
    } else {
        c.form = natural_form(p);
        mark("reaction_form");
    }

    // Model-level checks with the grid that will actually be used.
    p.validate();
    const Grid grid = p.grid(c.n);
    for (int s = 0; s < 2; ++s) {
        double d = s == 0 ? p.d1 : p.d2, a = s == 0 ? p.alpha1 : p.alpha2;
        if (grid.h * std::fabs(a) / d >= 2.0) {
            int nmin = min_cells_for_peclet(p.a, p.b, d, a);
            std::ostringstream msg;
            msg << "key 'n': grid Peclet number h*|alpha" << (s + 1) << "|/d" << (s + 1) << " = "
                << grid.h * std::fabs(a) / d << " must be below 2; use n >= " << nmin;
            throw PecletError(msg.str(), nmin);
        }
    }
    ReactionPair reactions = make_reactions(p, grid, c.form);
    const double dt_max = 0.9 / std::max(reactions.u.max_rate(), reactions.v.max_rate());

    if (in.has("dt")) {
        c.dt = in.number("dt");
        require(c.dt > 0.0, "dt", "must be positive");
        require(c.dt <= dt_max, "dt", "must not exceed 0.9/max(r*r1) = " + std::to_string(dt_max));
    } else {
        c.dt = std::min(dt_max, 0.1);
        mark("dt");
    }

    const double u_default = default_initial_density(p, grid);
    if (in.has("u0")) c.u0 = in.expression("u0");
    else {
        c.u0 = Expr::constant(u_default).source();
        mark("u0");
    }
    if (in.has("v0")) c.v0 = in.expression("v0");
    else {
        c.v0 = Expr::constant(u_default).source();
        mark("v0");
    }

    if (in.has("out")) c.out_dir = in.text("out");
    if (in.has("workers")) c.workers = in.integer("workers");
    if (const char* env = std::getenv(kWorkersEnv)) {
        char* end = nullptr;
        long w = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || w < 1) throw ConfigError(std::string(kWorkersEnv) + " must be a positive integer");
        c.workers = static_cast<int>(w);
    }
    require(c.workers >= 1, "workers", "must be at least 1");
    return c;
}

RunConfig load_config(const std::string& path, const json& overrides) {
    json doc = json::object();
    if (!path.empty()) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open configuration file '" + path + "'");
        try {
            doc = json::parse(f);
        } catch (const json::parse_error& e) {
            throw ConfigError("configuration file '" + path + "' is not valid JSON: " + e.what());
        }
        if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    }
    for (auto it = overrides.begin(); it != overrides.end(); ++it) {
        // A flag for mu replaces any mu1/mu2 pair from the file and vice versa.
        if (it.key() == "mu") {
            doc.erase("mu1");
            doc.erase("mu2");
        } else if (it.key() == "mu1" || it.key() == "mu2") {
            doc.erase("mu");
        }
        doc[it.key()] = it.value();
        // An explicit value is no longer a default.
        if (doc.contains("defaulted") && doc["defaulted"].is_array()) {
            json kept = json::array();
            for (const auto& k : doc["defaulted"])
                if (k != it.key()) kept.push_back(k);
            doc["defaulted"] = kept;
        }
    }
    return parse_config(doc);
}

json RunConfig::echo() const {
    json j;
    j["mode"] = mode;
    if (mode == "figure") j["figure"] = figure;
    j["dim"] = params.dim;
    j["a"] = params.a;
    j["b"] = params.b;
    j["d1"] = params.d1;
    j["d2"] = params.d2;
    j["alpha1"] = params.alpha1;
    j["alpha2"] = params.alpha2;
    j["mu1"] = params.mu1;
    j["mu2"] = params.mu2;
    j["r"] = params.r.source();
    j["K"] = params.K.source();
    j["u0"] = u0;
    j["v0"] = v0;
    j["n"] = n;
    j["dt"] = dt;
    j["t_end"] = t_end;
    j["samples"] = samples;
    j["snapshot_times"] = snapshot_times;
    j["tol_steady"] = tol_steady;
    j["tol_eigen"] = tol_eigen;
    j["tol_marginal"] = tol_marginal;
    j["eps_settle"] = eps_settle;
    j["sweep_points"] = sweep_points;
    j["advection_2d"] = advection == Advection2d::x_axis ? "x" : "xy";
    j["reaction_form"] = to_string(form);
    j["wall_budget"] = wall_budget;
    j["stability"] = stability;
    j["defaulted"] = std::vector<std::string>(defaulted.begin(), defaulted.end());
    return j;
}

}  // namespace riverlv
