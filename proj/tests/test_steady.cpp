#include "oracles.hpp"
#include "riverlv/steady.hpp"

#include <doctest.h>

#include <cmath>

using namespace riverlv;

namespace {

ModelParams fig1() {
    ModelParams p;
    p.d1 = 0.08;
    p.d2 = 0.07;
    p.alpha1 = 0.05;
    p.alpha2 = 0.04;
    p.mu1 = p.mu2 = 0.009;
    p.K = Expr::parse("2+cos(pi*x)");
    return p;
}

// Pair with a known coexistence state: strong drift for u, weak for v.
ModelParams coexistence_fixture() {
    ModelParams p;
    p.d1 = 0.05;
    p.alpha1 = 0.4;
    p.d2 = 0.2;
    p.alpha2 = 0.02;
    p.mu1 = p.mu2 = 0.0;
    p.K = Expr::parse("2+cos(2*pi*x)");
    return p;
}

Field third_of_capacity(const SpeciesReaction& r) {
    Field f(r.capacity.grid);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = r.capacity[k] * (1.0 - r.harvest) / 3.0;
    return f;
}

}  // namespace

TEST_CASE("constant capacity without drift: u_hat is K1") {
    ModelParams p = fig1();
    p.alpha1 = 0.0;
    p.K = Expr::constant(1.7);
    Grid g = p.grid(32);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    SteadyState s = solve_single_steady(sys.transport_u, sys.reactions.u);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(s.u[k] == doctest::Approx(1.7 * 0.991).epsilon(1e-12));
    CHECK(s.residual < 1e-12);
    CapacityIntegralReport l = capacity_integral(s, build_effective_params(p, g));
    CHECK(l.degenerate);
    CHECK(std::fabs(l.integral) < 1e-10);
    LogDerivativeReport ld = log_derivative_bounds(s.u, p.d1, 0.0);
    CHECK(std::fabs(ld.t_min) < 1e-8);
    CHECK(std::fabs(ld.t_max) < 1e-8);
    CHECK(ld.violations == 0);
}

TEST_CASE("without drift but with varying capacity, diffusion pulls u_hat off K1") {
    // K1 is not stationary: L K1 = d K1'' != 0, so the stationary residual at K1 is O(d).
    ModelParams p = fig1();
    p.alpha1 = 0.0;
    Grid g = p.grid(128);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    Field K1 = sys.reactions.u.capacity;
    CHECK(stationary_residual(sys.transport_u, sys.reactions.u, K1).max_abs() > 0.1 * p.d1);
    SteadyState s = solve_single_steady(sys.transport_u, sys.reactions.u);
    CHECK(s.residual < 1e-10);
    CHECK(oracle::max_abs_diff(s.u.values, K1.values) > 1e-3);
    CHECK(capacity_integral(s, build_effective_params(p, g)).integral > 0.0);
}

TEST_CASE("fig1 u_hat: Newton and long-time integration agree") {
    ModelParams p = fig1();
    Grid g = p.grid(256);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    SteadyOptions newton;
    newton.method = SteadyMethod::newton;
    Field mean(g, sys.reactions.u.capacity.mass() / (g.b - g.a));
    newton.guess = mean;
    SteadyOptions longtime;
    longtime.method = SteadyMethod::long_time;
    SteadyState a = solve_single_steady(sys.transport_u, sys.reactions.u, newton);
    SteadyState b = solve_single_steady(sys.transport_u, sys.reactions.u, longtime);
    SteadyState c = solve_single_steady(sys.transport_u, sys.reactions.u);
    for (const SteadyState* s : {&a, &b, &c}) {
        CHECK(s->residual < s->tolerance);
        CHECK(s->tolerance == doctest::Approx(1e-10));
        CHECK(s->u.min() > 1e-8 * sys.reactions.u.capacity.max());
        // Independent residual evaluation.
        auto Lu = oracle::transport_1d(s->u.values, g.h, p.d1, p.alpha1);
        double worst = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            double rk = sys.reactions.u.growth[k] * s->u[k] * (1.0 - s->u[k] / sys.reactions.u.capacity[k]);
            worst = std::max(worst, std::fabs(Lu[k] + rk));
        }
        CHECK(worst < 1e-10);
    }
    CHECK(a.method == SteadyMethod::newton);
    CHECK(b.method == SteadyMethod::long_time);
    CHECK(oracle::max_abs_diff(a.u.values, b.u.values) < 1e-8);
    CHECK(oracle::max_abs_diff(a.u.values, c.u.values) < 1e-8);
    CHECK(a.u.max() - a.u.min() > 0.1);
}

TEST_CASE("steady tolerance is raised to the rounding floor for stiff operators") {
    ModelParams p = fig1();
    p.d1 = 3.0;
    p.alpha1 = 0.7;
    p.mu1 = p.mu2 = 0.1;
    Grid g = p.grid(256);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    SteadyState s = solve_single_steady(sys.transport_u, sys.reactions.u);
    CHECK(s.tolerance > 1e-10);
    CHECK(s.residual < s.tolerance);
    CHECK(s.tolerance < 1e-7);
}

TEST_CASE("capacity integral on the fig1 set") {
    ModelParams p = fig1();
    Grid g = p.grid(512);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    SteadyState s = solve_single_steady(sys.transport_u, sys.reactions.u);
    CapacityIntegralReport l = capacity_integral(s, build_effective_params(p, g));
    CHECK_FALSE(l.degenerate);
    CHECK(l.integral > 0.0);
    CHECK(std::fabs(l.integral - l.squared_integral) < 1e-6);
    // Midpoint sums written out here.
    EffectiveParams e = build_effective_params(p, g);
    double i1 = 0.0, i2 = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        double q = 1.0 - s.u[k] / e.K1[k];
        i1 += g.h * e.r[k] * e.K1[k] * q;
        i2 += g.h * e.r[k] * e.K1[k] * q * q;
    }
    CHECK(l.integral == doctest::Approx(i1).epsilon(1e-12));
    CHECK(l.squared_integral == doctest::Approx(i2).epsilon(1e-12));
}

TEST_CASE("log-derivative report on a known profile") {
    Grid g = Grid::line(0.0, 1.0, 64);
    const double d = 0.08, alpha = 0.05;
    Field f(g);
    for (int i = 0; i < 64; ++i) f[i] = std::exp(0.5 * alpha * g.center(i) / d);
    LogDerivativeReport r = log_derivative_bounds(f, d, alpha);
    CHECK(r.bound == doctest::Approx(alpha / d));
    CHECK(r.band == doctest::Approx(10.0 * g.h * g.h));
    CHECK(r.checked == 62);
    CHECK(r.violations == 0);
    CHECK(r.t_min == doctest::Approx(0.5 * alpha / d).epsilon(1e-3));
    // A decreasing profile violates the lower edge everywhere.
    for (int i = 0; i < 64; ++i) f[i] = 2.0 - g.center(i);
    CHECK(log_derivative_bounds(f, d, alpha).violations == 62);
}

TEST_CASE("fig1 set has no coexistence state") {
    ModelParams p = fig1();
    Grid g = p.grid(128);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    CoexistenceResult r =
        solve_coexistence(sys, third_of_capacity(sys.reactions.u), third_of_capacity(sys.reactions.v));
    CHECK_FALSE(r.pair.has_value());
    CHECK(r.status == "semi-trivial-v");
    CHECK(r.u_final.max_abs() < 1e-6);
}

TEST_CASE("identical movement: a one-parameter family, flagged near singular") {
    ModelParams p = fig1();
    p.d2 = p.d1;
    p.alpha2 = p.alpha1;
    Grid g = p.grid(64);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    Field half(g);
    for (std::size_t k = 0; k < g.size(); ++k) half[k] = sys.reactions.u.capacity[k] / 2.0;
    CoexistenceResult r = solve_coexistence(sys, half, half);
    REQUIRE(r.pair.has_value());
    CHECK(r.near_singular);
    CHECK(r.pair->u.min() > 0.0);
    CHECK(r.pair->v.min() > 0.0);
    CHECK(coexistence_residual(sys, r.pair->u, r.pair->v) < 1e-10);
    IdentityResiduals id = coexistence_identities(*r.pair, sys, p.a, p.b);
    CHECK(std::fabs(id.lhs_u) < 1e-12);
    CHECK(std::fabs(id.rhs_u) < 1e-9);
    CHECK(std::fabs(id.lhs_v) < 1e-12);
    CHECK(std::fabs(id.rhs_v) < 1e-9);
}

TEST_CASE("coexistence fixture: pair, fluxes and identities at second order") {
    ModelParams p = coexistence_fixture();
    double prev_u = 0.0, prev_v = 0.0, prev_log = 0.0;
    for (int n : {128, 256}) {
        Grid g = p.grid(n);
        CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
        CoexistenceResult r =
            solve_coexistence(sys, third_of_capacity(sys.reactions.u), third_of_capacity(sys.reactions.v));
        REQUIRE(r.status == "pair");
        REQUIRE(r.pair.has_value());
        CHECK(r.residual < 1e-10);
        CHECK_FALSE(r.near_singular);
        CHECK(r.pair->u.min() > 1e-8 * 3.0);
        CHECK(r.pair->v.min() > 1e-8 * 3.0);

        FluxDiagnostics fd = flux_diagnostics(*r.pair, p.d1, p.alpha1, p.d2, p.alpha2);
        CHECK(fd.A.front() == 0.0);
        CHECK(fd.A.back() == 0.0);
        CHECK(fd.B.front() == 0.0);
        CHECK(fd.B.back() == 0.0);
        int total = 0;
        for (auto [sign, len] : fd.sign_runs_A) total += len;
        CHECK(total == n + 1);

        // Over [a,b] the boundary terms vanish and the second identity holds to rounding;
        // the interior window [1/4, 3/4] exercises both with nonzero boundary terms.
        IdentityResiduals full = coexistence_identities(*r.pair, sys, p.a, p.b);
        CHECK(full.rhs_u == 0.0);
        CHECK(full.rhs_v == 0.0);
        CHECK(full.residual_v < 1e-10);
        IdentityResiduals id = coexistence_identities(*r.pair, sys, 0.25, 0.75);
        CHECK(id.residual_u == doctest::Approx(std::fabs(id.lhs_u - id.rhs_u)));
        CHECK(id.residual_v == doctest::Approx(std::fabs(id.lhs_v - id.rhs_v)));
        CHECK(std::fabs(id.rhs_v) > 1e-4);
        if (n == 256) {
            CHECK(prev_u / id.residual_u == doctest::Approx(4.0).epsilon(0.1));
            CHECK(prev_v / id.residual_v == doctest::Approx(4.0).epsilon(0.1));
            CHECK(prev_log / id.log_derivative == doctest::Approx(4.0).epsilon(0.1));
        }
        prev_u = id.residual_u;
        prev_v = id.residual_v;
        prev_log = id.log_derivative;
        CHECK_THROWS(coexistence_identities(*r.pair, sys, 0.25 + g.h / 2, 0.75));
    }
}
