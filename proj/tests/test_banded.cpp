#include "oracles.hpp"
#include "riverlv/banded.hpp"
#include "riverlv/error.hpp"

#include <doctest.h>

using namespace riverlv;

namespace {

BandedMatrix random_band(std::mt19937_64& rng, std::size_t n, std::size_t kl, std::size_t ku, double diag_boost) {
    BandedMatrix m(n, kl, ku);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = (j > ku ? j - ku : 0); i <= std::min(n - 1, j + kl); ++i) m.at(i, j) = dist(rng);
    for (std::size_t i = 0; i < n; ++i) m.add(i, i, diag_boost);
    return m;
}

}  // namespace

TEST_CASE("band storage round-trips through dense") {
    std::mt19937_64 rng(11);
    BandedMatrix m = random_band(rng, 9, 2, 3, 0.0);
    auto d = m.dense();
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j) {
            if (m.in_band(i, j)) CHECK(d[i * 9 + j] == m.get(i, j));
            else CHECK(d[i * 9 + j] == 0.0);
        }
    auto x = oracle::uniform(rng, 9, -1.0, 1.0);
    std::vector<double> y(9);
    m.multiply(x, y);
    CHECK(oracle::max_abs_diff(y, oracle::matvec(d, x)) < 1e-14);
}

TEST_CASE("LU without pivoting solves diagonally dominant systems") {
    std::mt19937_64 rng(12);
    for (std::size_t n : {3u, 10u, 50u, 200u}) {
        for (std::size_t bw : {1u, 4u}) {
            if (bw >= n) continue;
            BandedMatrix m = random_band(rng, n, bw, bw, 2.0 * bw + 3.0);
            auto b = oracle::uniform(rng, n, -1.0, 1.0);
            auto ref = oracle::solve(m.dense(), b);
            BandedLU lu(m, Pivoting::none);
            std::vector<double> x(b);
            lu.solve(x);
            CHECK(oracle::max_abs_diff(x, ref) < 1e-12);
        }
    }
}

TEST_CASE("LU with partial pivoting handles indefinite band matrices") {
    std::mt19937_64 rng(13);
    for (std::size_t n : {4u, 16u, 60u}) {
        for (std::size_t kl : {1u, 2u, 5u}) {
            BandedMatrix m = random_band(rng, n, kl, kl, 0.0);
            auto b = oracle::uniform(rng, n, -1.0, 1.0);
            std::vector<double> ref;
            try {
                ref = oracle::solve(m.dense(), b);
            } catch (...) {
                continue;
            }
            BandedLU lu(m, Pivoting::partial);
            std::vector<double> x(b);
            lu.solve(x);
            // Residual check: random matrices can be ill-conditioned.
            std::vector<double> r(n);
            m.multiply(x, r);
            CHECK(oracle::max_abs_diff(r, b) < 1e-9);
        }
    }
}

TEST_CASE("zero pivot is a numerical error") {
    BandedMatrix m(3, 1, 1);
    m.at(0, 0) = 0.0;
    m.at(0, 1) = 1.0;
    m.at(1, 0) = 1.0;
    m.at(1, 1) = 1.0;
    m.at(2, 2) = 1.0;
    CHECK_THROWS_AS(BandedLU(m, Pivoting::none), NumericalError);
    BandedLU lu(m, Pivoting::partial);
    std::vector<double> x{1.0, 2.0, 3.0};
    lu.solve(x);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));
    CHECK(x[2] == doctest::Approx(3.0));
    BandedMatrix s(2, 1, 1);
    s.at(0, 0) = 1.0;
    s.at(0, 1) = 1.0;
    s.at(1, 0) = 1.0;
    s.at(1, 1) = 1.0;
    CHECK_THROWS_AS(BandedLU(s, Pivoting::partial), NumericalError);
}

TEST_CASE("pivot ratio reflects conditioning") {
    BandedMatrix m(3, 1, 1);
    m.at(0, 0) = 1.0;
    m.at(1, 1) = 1e-12;
    m.at(2, 2) = 1.0;
    BandedLU lu(m, Pivoting::partial);
    CHECK(lu.pivot_ratio() == doctest::Approx(1e-12));
}
