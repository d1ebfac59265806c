#pragma once

#include "riverlv/expr.hpp"
#include "riverlv/grid.hpp"

#include <string>

namespace riverlv {

struct ModelParams {
    double d1 = 0.08;
    double d2 = 0.07;
    double alpha1 = 0.05;
    double alpha2 = 0.04;
    double mu1 = 0.0;
    double mu2 = 0.0;
    Expr r = Expr::constant(1.0);
    Expr K = Expr::constant(1.0);
    double a = 0.0;
    double b = 1.0;
    int dim = 1;

    // Throws ConfigError naming the offending field.
    void validate() const;
    bool equal_harvest() const { return mu1 == mu2; }
    Grid grid(int n) const;
};

// Harvest folded into growth and capacity: r1 = 1 - mu, K1 = K*r1.
struct EffectiveParams {
    double mu = 0.0;
    double r1 = 1.0;
    Field r;
    Field K;
    Field K1;
    Field rr1;
};

EffectiveParams build_effective_params(const ModelParams& params, double mu, const Grid& grid);
// Uses mu1 and requires mu1 == mu2.
EffectiveParams build_effective_params(const ModelParams& params, const Grid& grid);

// r*r1*u*(1 - (u+v)/K1) at cell k. For the v equation swap the first two arguments.
double reaction(double u, double v, std::size_t k, const EffectiveParams& eff);

// Per-species kinetics in the common form growth*u*((1 - (u+v)/capacity) - harvest).
struct SpeciesReaction {
    Field growth;
    Field capacity;
    double harvest = 0.0;

    // Largest per-capita rate, attained at zero density.
    double max_rate() const;
};

enum class ReactionForm {
    transformed,  // growth = r*r1, capacity = K1, harvest = 0 (needs mu1 == mu2)
    raw           // growth = r, capacity = K, harvest = mu_i
};

struct ReactionPair {
    SpeciesReaction u;
    SpeciesReaction v;
    ReactionForm form = ReactionForm::transformed;
};

ReactionPair make_reactions(const ModelParams& params, const Grid& grid, ReactionForm form);
// transformed when harvests agree, raw otherwise.
ReactionForm natural_form(const ModelParams& params);

struct RegimeReport {
    double ratio1 = 0.0;
    double ratio2 = 0.0;
    bool holds_c1 = false;
    bool holds_c2 = false;
    bool ordering_d = false;
    bool ordering_alpha = false;
    double omega1 = 0.0;
};

RegimeReport classify_regime(const ModelParams& params);

std::string to_string(ReactionForm form);

}  // namespace riverlv
