#include "oracles.hpp"
#include "riverlv/error.hpp"
#include "riverlv/transport.hpp"

#include <doctest.h>

#include <cmath>

using namespace riverlv;

TEST_CASE("three-cell Laplacian by hand") {
    TransportOperator L = assemble_transport(Grid::line(0.0, 1.0, 3), 1.0, 0.0);
    CHECK(L.entry(0, 0) == doctest::Approx(-9.0));
    CHECK(L.entry(0, 1) == doctest::Approx(9.0));
    CHECK(L.entry(0, 2) == 0.0);
    CHECK(L.entry(1, 0) == doctest::Approx(9.0));
    CHECK(L.entry(1, 1) == doctest::Approx(-18.0));
    CHECK(L.entry(1, 2) == doctest::Approx(9.0));
    Field f(L.grid, std::vector<double>{1.0, 2.0, 4.0});
    Field out = L.apply(f);
    CHECK(out[0] == doctest::Approx(9.0));
    CHECK(out[1] == doctest::Approx(9.0));
    CHECK(out[2] == doctest::Approx(-18.0));
    CHECK(L.apply(Field(L.grid, 0.0)).max_abs() == 0.0);
}

TEST_CASE("fig1 transport on four cells") {
    TransportOperator L = assemble_transport(Grid::line(0.0, 1.0, 4), 0.08, 0.05);
    CHECK(L.peclet == doctest::Approx(0.15625));
    CHECK(L.max_column_sum() <= 1e-14);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j && (i + 1 == j || j + 1 == i)) CHECK(L.entry(i, j) > 0.0);
    CHECK(L.is_metzler());
    CHECK(L.is_irreducible());
}

TEST_CASE("operator agrees with the face-flux oracle") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dd(0.01, 2.0), aa(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double d = dd(rng), alpha = aa(rng);
        Grid g = Grid::line(0.0, 1.0, std::max(5, min_cells_for_peclet(0.0, 1.0, d, alpha)));
        TransportOperator L = assemble_transport(g, d, alpha);
        auto u = oracle::uniform(rng, g.size(), -1.0, 1.0);
        Field out = L.apply(Field(g, u));
        auto ref = oracle::transport_1d(u, g.h, d, alpha);
        CHECK(oracle::max_abs_diff(out.values, ref) <= 1e-12 * std::max(1.0, L.norm_inf()));
    }
    for (auto adv : {Advection2d::x_axis, Advection2d::diagonal}) {
        Grid g = Grid::square(0.0, 1.0, 7);
        TransportOperator L = assemble_transport_2d(g, 0.3, 0.4, adv);
        auto u = oracle::uniform(rng, g.size(), -1.0, 1.0);
        auto ref = oracle::transport_2d(u, 7, g.h, 0.3, 0.4, adv == Advection2d::diagonal ? 0.4 : 0.0);
        CHECK(oracle::max_abs_diff(L.apply(Field(g, u)).values, ref) < 1e-12);
    }
}

TEST_CASE("conservation, Metzler and irreducible structure on random operators") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> dd(0.001, 3.0), aa(-2.0, 2.0), ll(0.5, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        double d = dd(rng), alpha = aa(rng), len = ll(rng);
        int dim = trial % 4 == 0 ? 2 : 1;
        int n = std::max(3 + trial % 11, min_cells_for_peclet(0.0, len, d, alpha));
        if (dim == 2 && n > 60) continue;
        Grid g = dim == 1 ? Grid::line(0.0, len, n) : Grid::square(0.0, len, n);
        TransportOperator L = assemble(g, d, alpha, trial % 8 == 0 ? Advection2d::diagonal : Advection2d::x_axis);
        CHECK(L.peclet < 2.0);
        CHECK(L.is_metzler());
        CHECK(L.is_irreducible());
        auto gv = oracle::uniform(rng, g.size(), -1.0, 1.0);
        Field Lg = L.apply(Field(g, gv));
        double s = 0.0;
        for (double v : Lg.values) s += v;
        CHECK(std::fabs(s) <= 1e-12 * oracle::max_abs(gv) * static_cast<double>(g.size()) * L.norm_inf());
    }
}

TEST_CASE("Peclet guard names the minimum cell count") {
    CHECK(min_cells_for_peclet(0.0, 1.0, 0.08, 0.05) == 3);
    const int nmin = min_cells_for_peclet(0.0, 1.0, 0.001, 0.05);
    CHECK(nmin == 26);
    CHECK(1.0 / nmin * 0.05 / 0.001 < 2.0);
    CHECK(1.0 / (nmin - 1) * 0.05 / 0.001 >= 2.0);
    // Exact boundary case: h*alpha/d == 2 at n = 25 must be rejected.
    CHECK(min_cells_for_peclet(0.0, 1.0, 0.01, 0.5) == 26);
    try {
        assemble_transport(Grid::line(0.0, 1.0, 10), 0.001, 0.05);
        FAIL("expected a Peclet error");
    } catch (const PecletError& e) {
        CHECK(e.min_cells() == 26);
        CHECK(std::string(e.what()).find("n >= 26") != std::string::npos);
    }
    CHECK_THROWS_AS(assemble_transport(Grid::line(0.0, 1.0, 10), 0.0, 0.05), ConfigError);
}

TEST_CASE("constants are annihilated without drift") {
    for (int dim : {1, 2}) {
        Grid g = dim == 1 ? Grid::line(0.0, 2.0, 9) : Grid::square(0.0, 2.0, 9);
        TransportOperator L = assemble(g, 0.7, 0.0);
        CHECK(L.apply(Field(g, 3.5)).max_abs() < 1e-13);
    }
}

TEST_CASE("separable fields: 2D apply replicates the 1D apply") {
    Grid g1 = Grid::line(0.0, 1.0, 8), g2 = Grid::square(0.0, 1.0, 8);
    TransportOperator L1 = assemble_transport(g1, 0.005, 0.002);
    TransportOperator L2 = assemble_transport_2d(g2, 0.005, 0.002);
    CHECK(L2.max_column_sum() <= 1e-14);
    Field f1 = Field::sample(g1, Expr::parse("1+x*x"));
    Field f2 = Field::sample(g2, Expr::parse("1+x*x"));
    Field o1 = L1.apply(f1), o2 = L2.apply(f2);
    for (std::size_t k = 0; k < g2.size(); ++k) CHECK(o2[k] == doctest::Approx(o1[k % 8]).epsilon(1e-13));
}

TEST_CASE("exact kernel exp(alpha x/d) converges at second order") {
    const double d = 0.08, alpha = 0.05;
    double prev_int = 0.0, prev_l1 = 0.0, prev_max = 0.0;
    for (int n : {32, 64, 128, 256, 512}) {
        Grid g = Grid::line(0.0, 1.0, n);
        TransportOperator L = assemble_transport(g, d, alpha);
        Field u(g);
        for (int i = 0; i < n; ++i) u[i] = std::exp(alpha * g.center(i) / d);
        Field r = L.apply(u);
        double interior = 0.0, l1 = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i > 0 && i + 1 < n) interior = std::max(interior, std::fabs(r[i]));
            l1 += std::fabs(r[i]) * g.h;
        }
        double mx = r.max_abs();
        if (n > 32) {
            CHECK(prev_int / interior == doctest::Approx(4.0).epsilon(0.05));
            CHECK(prev_l1 / l1 == doctest::Approx(4.0).epsilon(0.1));
            CHECK(mx < prev_max);
        }
        prev_int = interior;
        prev_l1 = l1;
        prev_max = mx;
    }
}

TEST_CASE("face fluxes vanish on the boundary and telescope to the operator") {
    Grid g = Grid::line(0.0, 1.0, 12);
    Field f = Field::sample(g, Expr::parse("2+cos(pi*x)"));
    auto F = face_fluxes(f, 0.08, 0.05);
    REQUIRE(F.size() == 13);
    CHECK(F.front() == 0.0);
    CHECK(F.back() == 0.0);
    Field Lf = assemble_transport(g, 0.08, 0.05).apply(f);
    for (int i = 0; i < 12; ++i) CHECK(Lf[i] == doctest::Approx((F[i + 1] - F[i]) / g.h).epsilon(1e-12));
}

TEST_CASE("shape mismatch is rejected") {
    TransportOperator L = assemble_transport(Grid::line(0.0, 1.0, 5), 1.0, 0.0);
    CHECK_THROWS_AS(L.apply(Field(Grid::line(0.0, 1.0, 6), 1.0)), ConfigError);
}
