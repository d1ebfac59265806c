#include "riverlv/model.hpp"

#include "riverlv/error.hpp"

#include <algorithm>
#include <cmath>

namespace riverlv {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void check_harvest(const char* name, double mu) {
    require(std::isfinite(mu), std::string(name) + " must be finite");
    require(mu < 1.0, std::string(name) + " must lie in [0,1): harvest-to-extinction regime, transform undefined");
    require(mu >= 0.0, std::string(name) + " must lie in [0,1)");
}

void check_positive_field(const Field& f, const std::string& name) {
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!(std::isfinite(f[k]) && f[k] > 0.0))
            throw ConfigError(name + " must be positive and finite on the domain; value " + std::to_string(f[k]) +
                              " at x=" + std::to_string(f.grid.x(k)) + ", y=" + std::to_string(f.grid.y(k)));
    }
}

}  // namespace

void ModelParams::validate() const {
    require(std::isfinite(d1) && d1 > 0.0, "d1 must be positive");
    require(std::isfinite(d2) && d2 > 0.0, "d2 must be positive");
    require(std::isfinite(alpha1), "alpha1 must be finite");
    require(std::isfinite(alpha2), "alpha2 must be finite");
    check_harvest("mu1", mu1);
    check_harvest("mu2", mu2);
    require(dim == 1 || dim == 2, "dim must be 1 or 2");
    require(std::isfinite(a) && std::isfinite(b) && a < b, "domain must satisfy a < b");
}

Grid ModelParams::grid(int n) const { return dim == 1 ? Grid::line(a, b, n) : Grid::square(a, b, n); }

EffectiveParams build_effective_params(const ModelParams& params, double mu, const Grid& grid) {
    check_harvest("mu", mu);
    EffectiveParams eff;
    eff.mu = mu;
    eff.r1 = 1.0 - mu;
    eff.r = Field::sample(grid, params.r);
    eff.K = Field::sample(grid, params.K);
    check_positive_field(eff.r, "r");
    check_positive_field(eff.K, "K");
    eff.K1 = Field(grid);
    eff.rr1 = Field(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        eff.K1[k] = eff.K[k] * eff.r1;
        eff.rr1[k] = eff.r[k] * eff.r1;
    }
    return eff;
}

EffectiveParams build_effective_params(const ModelParams& params, const Grid& grid) {
    if (!params.equal_harvest())
        throw ConfigError("the harvest-free transform needs mu1 == mu2; use the raw reaction form");
    return build_effective_params(params, params.mu1, grid);
}

double reaction(double u, double v, std::size_t k, const EffectiveParams& eff) {
    double w = 1.0 - (u + v) / eff.K1[k];
    return (eff.rr1[k] * u) * w;
}

double SpeciesReaction::max_rate() const {
    double m = 0.0;
    for (double g : growth.values) m = std::max(m, g * (1.0 - harvest));
    return m;
}

ReactionForm natural_form(const ModelParams& params) {
    return params.equal_harvest() ? ReactionForm::transformed : ReactionForm::raw;
}

ReactionPair make_reactions(const ModelParams& params, const Grid& grid, ReactionForm form) {
    ReactionPair pair;
    pair.form = form;
    if (form == ReactionForm::transformed) {
        EffectiveParams eff = build_effective_params(params, grid);
        pair.u = {eff.rr1, eff.K1, 0.0};
        pair.v = {eff.rr1, eff.K1, 0.0};
    } else {
        check_harvest("mu1", params.mu1);
        check_harvest("mu2", params.mu2);
        Field r = Field::sample(grid, params.r);
        Field K = Field::sample(grid, params.K);
        check_positive_field(r, "r");
        check_positive_field(K, "K");
        pair.u = {r, K, params.mu1};
        pair.v = {r, K, params.mu2};
    }
    return pair;
}

RegimeReport classify_regime(const ModelParams& params) {
    require(params.d1 > 0.0 && params.d2 > 0.0, "diffusion coefficients must be positive");
    RegimeReport rep;
    rep.ratio1 = params.alpha1 / params.d1;
    rep.ratio2 = params.alpha2 / params.d2;
    rep.holds_c1 = rep.ratio1 >= rep.ratio2;
    rep.holds_c2 = !rep.holds_c1;
    rep.ordering_d = params.d1 > params.d2;
    rep.ordering_alpha = params.alpha1 > params.alpha2 && params.alpha2 > 0.0;
    rep.omega1 = params.d2 / params.d1;
    return rep;
}

std::string to_string(ReactionForm form) { return form == ReactionForm::transformed ? "transformed" : "raw"; }

}  // namespace riverlv
