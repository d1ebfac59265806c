#include "oracles.hpp"
#include "riverlv/error.hpp"
#include "riverlv/experiments.hpp"
#include "riverlv/spectral.hpp"

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

}  // namespace

TEST_CASE("constant potential without drift") {
    Grid g = Grid::line(0.0, 1.0, 40);
    TransportOperator L = assemble_transport(g, 0.3, 0.0);
    for (auto method : {EigenMethod::shift_invert, EigenMethod::shifted_power}) {
        EigenOptions o;
        o.method = method;
        EigenReport r = principal_eigenpair(L, Field(g, 0.37), o);
        CHECK(r.lambda1 == doctest::Approx(-0.37).epsilon(1e-12));
        CHECK(r.Lambda == -r.lambda1);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(r.phi[k] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(r.lower <= r.Lambda + 1e-14);
        CHECK(r.upper >= r.Lambda - 1e-14);
    }
}

TEST_CASE("iterative eigenpair matches the dense oracle on random operators") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> dd(0.01, 1.0), aa(-1.0, 1.0), pp(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        double d = dd(rng), alpha = aa(rng);
        int n = std::max(8 + trial % 57, min_cells_for_peclet(0.0, 1.0, d, alpha));
        if (n > 64) n = 64;
        Grid g = Grid::line(0.0, 1.0, n);
        if (g.h * std::fabs(alpha) / d >= 2.0) continue;
        TransportOperator L = assemble_transport(g, d, alpha);
        Field p(g, oracle::uniform(rng, g.size(), pp(rng) - 1.0, pp(rng) + 1.0));
        EigenReport r = principal_eigenpair(L, p);
        DenseSpectrum ds = dense_spectrum(L, p);
        CHECK(std::fabs(r.Lambda - ds.Lambda) < 1e-8);
        CHECK(std::fabs(ds.imag_of_dominant) < 1e-10);
        CHECK(r.phi.min() > 0.0);
        CHECK(oracle::max_abs_diff(r.phi.values, ds.phi) < 1e-6);
        // Residual from the dense matrix.
        auto m = L.dense();
        for (std::size_t k = 0; k < g.size(); ++k) m[k * g.size() + k] += p[k];
        auto Mphi = oracle::matvec(m, r.phi.values);
        double res = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) res = std::max(res, std::fabs(Mphi[k] - r.Lambda * r.phi[k]));
        CHECK(res < 1e-8);
    }
}

TEST_CASE("shifted power method agrees with shift-invert on a small grid") {
    Grid g = Grid::line(0.0, 1.0, 16);
    TransportOperator L = assemble_transport(g, 0.2, 0.1);
    Field p = Field::sample(g, Expr::parse("1-x"));
    EigenOptions power;
    power.method = EigenMethod::shifted_power;
    power.max_iter = 100000;
    EigenReport a = principal_eigenpair(L, p), b = principal_eigenpair(L, p, power);
    CHECK(a.Lambda == doctest::Approx(b.Lambda).epsilon(1e-9));
    CHECK(b.method == EigenMethod::shifted_power);
}

TEST_CASE("2D operators: dense oracle agreement") {
    Grid g = Grid::square(0.0, 1.0, 8);
    for (auto adv : {Advection2d::x_axis, Advection2d::diagonal}) {
        TransportOperator L = assemble_transport_2d(g, 0.05, 0.04, adv);
        Field p = Field::sample(g, Expr::parse("cos(pi*x)*cos(pi*y)"));
        EigenReport r = principal_eigenpair(L, p);
        DenseSpectrum ds = dense_spectrum(L, p);
        CHECK(std::fabs(r.Lambda - ds.Lambda) < 1e-8);
        CHECK(r.phi.min() > 0.0);
    }
}

TEST_CASE("preconditions") {
    Grid g = Grid::line(0.0, 1.0, 10);
    TransportOperator L = assemble_transport(g, 0.3, 0.1);
    CHECK_THROWS_AS(principal_eigenpair(L, Field(Grid::line(0.0, 1.0, 11), 0.0)), ConfigError);
    TransportOperator bad = L;
    bad.diagonals[2][3] = -1.0;
    CHECK_THROWS_AS(principal_eigenpair(bad, Field(g, 0.0)), ConfigError);
    Grid big = Grid::line(0.0, 1.0, 129);
    CHECK_THROWS_AS(dense_spectrum(assemble_transport(big, 1.0, 0.0), Field(big, 0.0)), ConfigError);
}

TEST_CASE("fig1 set: u_hat unstable, v_hat stable") {
    ModelParams p = fig1();
    Grid g = p.grid(256);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    StabilityVerdict su = stability_of_semitrivial(SemiTrivial::u_state, sys);
    StabilityVerdict sv = stability_of_semitrivial(SemiTrivial::v_state, sys);
    CHECK(su.eigenvalue < 0.0);
    CHECK(su.verdict == Stability::unstable);
    CHECK(sv.eigenvalue > 0.0);
    CHECK(sv.verdict == Stability::stable);
    CHECK(su.eigen.phi.min() > 0.0);
    // The potential is the invader's per-capita growth at the resident profile.
    Field pot = invasion_potential(sys.reactions.v, su.base.u);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(pot[k] == doctest::Approx(sys.reactions.v.growth[k] * (1.0 - su.base.u[k] / sys.reactions.v.capacity[k])));
}

TEST_CASE("identical species are neutral to each other") {
    ModelParams p = fig1();
    p.d2 = p.d1;
    p.alpha2 = p.alpha1;
    Grid g = p.grid(128);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    CHECK(stability_of_semitrivial(SemiTrivial::u_state, sys).verdict == Stability::marginal);
    CHECK(stability_of_semitrivial(SemiTrivial::v_state, sys).verdict == Stability::marginal);
}

TEST_CASE("fig13 set: v_hat stable") {
    ModelParams p = find_preset("fig13").params;
    Grid g = p.grid(256);
    CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
    CHECK(stability_of_semitrivial(SemiTrivial::v_state, sys).verdict == Stability::stable);
}

TEST_CASE("verdicts do not change under refinement") {
    for (const auto& preset : figure_catalog()) {
        const ModelParams& p = preset.params;
        const int coarse = p.dim == 1 ? 128 : 32, fine = p.dim == 1 ? 256 : 64;
        Stability su[2], sv[2];
        int slot = 0;
        for (int n : {coarse, fine}) {
            CompetitionSystem sys = build_system(p, p.grid(n), natural_form(p));
            su[slot] = stability_of_semitrivial(SemiTrivial::u_state, sys).verdict;
            sv[slot] = stability_of_semitrivial(SemiTrivial::v_state, sys).verdict;
            ++slot;
        }
        INFO("preset " << preset.id);
        CHECK(su[0] == su[1]);
        CHECK(sv[0] == sv[1]);
    }
}

TEST_CASE("eigenvalue difference formula") {
    SUBCASE("same operator: both sides vanish") {
        Grid g = Grid::line(0.0, 1.0, 64);
        TransportOperator L = assemble_transport(g, 0.08, 0.05);
        EigenDifference e = eigen_difference_check(L, L, Field::sample(g, Expr::parse("1-x*x")));
        CHECK(std::fabs(e.eta2 - e.eta1) < 1e-13);
        CHECK(std::fabs(e.rhs) < 1e-13);
    }
    SUBCASE("no drift and constant potential: both sides vanish") {
        Grid g = Grid::line(0.0, 1.0, 64);
        EigenDifference e = eigen_difference_check(assemble_transport(g, 0.08, 0.0), assemble_transport(g, 0.5, 0.0),
                                                   Field(g, 0.4));
        CHECK(std::fabs(e.eta2 - e.eta1) < 1e-12);
        CHECK(std::fabs(e.rhs) < 1e-12);
    }
    SUBCASE("fig1 potential: second-order residual") {
        ModelParams p = fig1();
        double prev = 0.0;
        for (int n : {128, 256}) {
            Grid g = p.grid(n);
            CompetitionSystem sys = build_system(p, g, ReactionForm::transformed);
            SteadyState u_hat = solve_single_steady(sys.transport_u, sys.reactions.u);
            Field pot = invasion_potential(sys.reactions.v, u_hat.u);
            EigenDifference e = eigen_difference_check(sys.transport_u, sys.transport_v, pot);
            CHECK(e.residual == doctest::Approx(std::fabs((e.eta2 - e.eta1) - e.rhs)));
            if (n == 256) CHECK(prev / e.residual == doctest::Approx(4.0).epsilon(0.25));
            prev = e.residual;
        }
    }
}

TEST_CASE("drift band for monotone potentials") {
    Grid g = Grid::line(0.0, 1.0, 128);
    TransportOperator L = assemble_transport(g, 0.08, 0.05);
    Field p = Field::sample(g, Expr::parse("1-x"));
    DriftBandReport r = drift_band_check(principal_eigenpair(L, p), L, p);
    CHECK(r.applicable);
    CHECK(r.holds);
    CHECK(r.max_excess <= r.band);
    Field bumpy = Field::sample(g, Expr::parse("cos(2*pi*x)"));
    DriftBandReport s = drift_band_check(principal_eigenpair(L, bumpy), L, bumpy);
    CHECK_FALSE(s.applicable);
}
