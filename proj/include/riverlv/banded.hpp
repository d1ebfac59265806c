#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace riverlv {

// Square band matrix with kl sub- and ku super-diagonals, stored by columns with room
// for the fill-in that row pivoting creates (LAPACK general-band layout).
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t size() const { return n_; }
    std::size_t lower() const { return kl_; }
    std::size_t upper() const { return ku_; }
    bool in_band(std::size_t i, std::size_t j) const { return i <= j + kl_ && j <= i + ku_; }

    double get(std::size_t i, std::size_t j) const;
    // (i,j) must lie inside the band.
    double& at(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
    void add(std::size_t i, std::size_t j, double v) { data_[index(i, j)] += v; }

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> dense() const;  // row major, for tests

private:
    friend class BandedLU;
    std::size_t n_ = 0, kl_ = 0, ku_ = 0, ld_ = 1;
    std::vector<double> data_;

    std::size_t index(std::size_t i, std::size_t j) const { return (kl_ + ku_ + i - j) + j * ld_; }
};

enum class Pivoting { none, partial };

// In-place band LU. Without pivoting the matrix should be diagonally dominant by
// columns (true for I - dt*L); partial pivoting handles the Newton Jacobians.
class BandedLU {
public:
    BandedLU() = default;
    BandedLU(BandedMatrix a, Pivoting pivoting);

    void solve(std::span<double> rhs) const;
    std::size_t size() const { return a_.n_; }
    // min |u_jj| / max |u_jj| over the factor; small values flag near singularity.
    double pivot_ratio() const { return pivot_ratio_; }

private:
    BandedMatrix a_;
    Pivoting pivoting_ = Pivoting::none;
    std::vector<std::size_t> ipiv_;
    std::size_t kv_ = 0;
    double pivot_ratio_ = 1.0;
};

}  // namespace riverlv
