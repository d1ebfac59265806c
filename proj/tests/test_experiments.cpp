#include "riverlv/error.hpp"
#include "riverlv/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace riverlv;

TEST_CASE("catalog holds the eleven presets with their parameter sets") {
    const auto& c = figure_catalog();
    CHECK(c.size() == 11);
    std::set<std::string> ids;
    for (const auto& p : c) {
        ids.insert(p.id);
        CHECK_NOTHROW(p.params.validate());
        CHECK(p.n == (p.params.dim == 1 ? 256 : 64));
    }
    CHECK(ids.size() == 11);
    const FigurePreset& f1 = find_preset("fig1");
    CHECK(f1.params.d1 == 0.08);
    CHECK(f1.params.d2 == 0.07);
    CHECK(f1.params.alpha1 == 0.05);
    CHECK(f1.params.alpha2 == 0.04);
    CHECK(f1.params.mu1 == 0.009);
    CHECK(f1.params.K.source() == "2+cos(pi*x)");
    CHECK(f1.t_end == 2000.0);
    CHECK(f1.expected == Verdict::VWins);
    const FigurePreset& f8 = find_preset("fig8");
    CHECK(f8.params.dim == 2);
    CHECK(f8.params.mu1 == 0.3);
    CHECK(f8.params.alpha2 == 0.0006);
    CHECK(f8.params.K.source() == "2+cos(pi*x)*cos(pi*y)");
    const FigurePreset& f13 = find_preset("fig13");
    CHECK(f13.params.d1 == 3.0);
    CHECK(f13.params.alpha1 == 0.7);
    const FigurePreset& f17 = find_preset("fig17");
    CHECK(f17.params.mu1 == 0.01);
    CHECK(f17.params.mu2 == 0.0076);
    CHECK(natural_form(f17.params) == ReactionForm::raw);
    CHECK(f17.t_end == 80.0);
    CHECK_THROWS_WITH_AS(find_preset("fig99"), doctest::Contains("known: fig1"), ConfigError);
}

TEST_CASE("default initial density") {
    ModelParams p = find_preset("fig1").params;
    Grid g = p.grid(256);
    double kmin = Field::sample(g, p.K).min();
    CHECK(default_initial_density(p, g) == doctest::Approx(0.5 * kmin * 0.991));
}

TEST_CASE("sweep verdict rules") {
    using S = Stability;
    CHECK(sweep_verdict(S::unstable, S::stable, false) == Verdict::VWins);
    CHECK(sweep_verdict(S::stable, S::unstable, false) == Verdict::UWins);
    CHECK(sweep_verdict(S::unstable, S::unstable, true) == Verdict::Coexistence);
    CHECK(sweep_verdict(S::unstable, S::unstable, false) == Verdict::Undecided);
    CHECK(sweep_verdict(S::marginal, S::marginal, true) == Verdict::Undecided);
}

TEST_CASE("fig1 preset run reproduces its expected outcome") {
    RunSettings s;
    s.stability = true;
    FigureRun r = run_figure(find_preset("fig1"), s);
    CHECK(r.matches_expected);
    CHECK(r.run.outcome.verdict == Verdict::VWins);
    CHECK(r.run.trajectory.clamp_events == 0);
    REQUIRE(r.run.stability.has_value());
    CHECK(r.run.stability->kappa1 < 0.0);
    CHECK(r.run.stability->tau1 > 0.0);
    CHECK(r.run.trajectory.snapshots.size() == 2);
}

TEST_CASE("sweep structure and determinism across worker counts") {
    ModelParams base = find_preset("fig9").params;
    SweepOptions o;
    o.n = 64;
    o.n_points = 8;
    o.workers = 1;
    SweepResult a = sweep_alpha2(base, o);
    o.workers = 4;
    SweepResult b = sweep_alpha2(base, o);
    CHECK(a.alpha1 == 0.001);
    CHECK(a.omega1 == doctest::Approx(0.5));
    CHECK(a.lower == doctest::Approx(0.0005));
    REQUIRE(a.points.size() >= 8);
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        CHECK(a.points[k].alpha2 > a.lower);
        CHECK(a.points[k].alpha2 < a.alpha1);
        if (k > 0) CHECK(a.points[k].alpha2 > a.points[k - 1].alpha2);
        CHECK(a.points[k].verdict ==
              sweep_verdict(a.points[k].u_state, a.points[k].v_state, a.points[k].coexistence_found));
        CHECK_FALSE(a.points[k].anomaly);
    }
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        CHECK(a.points[k].alpha2 == b.points[k].alpha2);
        CHECK(a.points[k].kappa1 == b.points[k].kappa1);
        CHECK(a.points[k].tau1 == b.points[k].tau1);
        CHECK(a.points[k].verdict == b.points[k].verdict);
    }
    CHECK(a.pattern == b.pattern);
    CHECK(static_cast<int>(a.pattern.size()) == a.transitions + 1);
    // The reported window, when present, only contains points with both states unstable.
    if (a.window)
        for (const auto& pt : a.points)
            if (pt.alpha2 >= a.window->first && pt.alpha2 <= a.window->second)
                CHECK(pt.verdict == Verdict::Coexistence);
}

TEST_CASE("sweep preconditions") {
    ModelParams base = find_preset("fig9").params;
    SweepOptions o;
    o.n = 32;
    o.n_points = 4;
    CHECK_THROWS_AS(sweep_alpha2(base, o), ConfigError);
    base.d2 = base.d1;
    o.n_points = 8;
    CHECK_THROWS_AS(sweep_alpha2(base, o), ConfigError);
}

TEST_CASE("verify on a spatially homogeneous case is degenerate, not failing") {
    ModelParams p;
    p.d1 = 0.08;
    p.d2 = 0.07;
    p.alpha1 = p.alpha2 = 0.0;
    p.K = Expr::constant(1.0);
    VerifyOptions o;
    o.n = 64;
    VerifyReport r = verify_lemmas(p, o);
    CHECK(r.all_pass);
    for (const auto& c : r.checks) {
        INFO(c.name << ": " << c.status);
        CHECK(c.status != "fail");
        if (c.name.find("capacity_integral") != std::string::npos) CHECK(c.status == "degenerate");
    }
}

TEST_CASE("verify on the fig1 set reports every check") {
    VerifyOptions o;
    o.n = 256;
    VerifyReport r = verify_lemmas(find_preset("fig1").params, o);
    std::set<std::string> names;
    for (const auto& c : r.checks) names.insert(c.name);
    for (const char* n : {"u_hat_capacity_integral", "v_hat_capacity_integral", "u_hat_log_derivative_band",
                          "v_hat_log_derivative_band", "semitrivial_stability", "ratio_chain",
                          "eigenvector_drift_band", "eigenvalue_difference_formula", "coexistence"})
        CHECK(names.count(n) == 1);
    for (const auto& c : r.checks) {
        if (c.name == "u_hat_capacity_integral" || c.name == "semitrivial_stability" ||
            c.name == "eigenvalue_difference_formula" || c.name == "coexistence")
            CHECK(c.status == "pass");
    }
}

TEST_CASE("verify on the coexistence fixture includes identity refinement") {
    ModelParams p;
    p.d1 = 0.05;
    p.alpha1 = 0.4;
    p.d2 = 0.2;
    p.alpha2 = 0.02;
    p.K = Expr::parse("2+cos(2*pi*x)");
    VerifyOptions o;
    o.n = 256;
    VerifyReport r = verify_lemmas(p, o);
    int identities = 0;
    for (const auto& c : r.checks)
        if (c.name == "flux_identity_u" || c.name == "flux_identity_v" || c.name == "log_derivative_identity") {
            ++identities;
            INFO(c.name);
            CHECK(c.status == "pass");
        }
    CHECK(identities == 3);
}
