#include "riverlv/banded.hpp"

#include "riverlv/error.hpp"
#include "riverlv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace riverlv {

namespace {

// Short columns dominate in 1D; skip the indirect call there.
inline void axpy(const kernels::KernelTable& kt, std::size_t n, double a, const double* x, double* y) {
    if (n < 8) {
        for (std::size_t k = 0; k < n; ++k) y[k] = y[k] + a * x[k];
    } else {
        kt.axpy(n, a, x, y);
    }
}

}  // namespace

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), data_(ld_ * n, 0.0) {}

double BandedMatrix::get(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_ || !in_band(i, j)) return 0.0;
    return data_[index(i, j)];
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
        std::size_t j0 = i > kl_ ? i - kl_ : 0;
        std::size_t j1 = std::min(n_ - 1, i + ku_);
        double acc = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) acc += data_[index(i, j)] * x[j];
        y[i] = acc;
    }
}

std::vector<double> BandedMatrix::dense() const {
    std::vector<double> m(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m[i * n_ + j] = get(i, j);
    return m;
}

BandedLU::BandedLU(BandedMatrix a, Pivoting pivoting) : a_(std::move(a)), pivoting_(pivoting) {
    const std::size_t n = a_.n_, kl = a_.kl_, ku = a_.ku_, ld = a_.ld_;
    kv_ = pivoting == Pivoting::partial ? ku + kl : ku;
    const std::size_t diag = kl + ku;  // storage row of the main diagonal
    double* ab = a_.data_.data();
    const auto& kt = kernels::active();
    ipiv_.assign(n, 0);
    double pmin = INFINITY, pmax = 0.0;
    std::size_t ju = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t km = std::min(kl, n - 1 - j);
        double* col = ab + j * ld + diag;  // col[r] = A(j + r, j)
        std::size_t p = 0;
        if (pivoting == Pivoting::partial) {
            double best = std::fabs(col[0]);
            for (std::size_t r = 1; r <= km; ++r)
                if (std::fabs(col[r]) > best) {
                    best = std::fabs(col[r]);
                    p = r;
                }
        }
        ipiv_[j] = j + p;
        if (col[p] == 0.0 || !std::isfinite(col[p]))
            throw NumericalError("singular band factorization at column " + std::to_string(j));
        ju = std::max(ju, std::min(j + (pivoting == Pivoting::partial ? ku + p : ku), n - 1));
        if (p != 0) {
            for (std::size_t c = j; c <= ju; ++c) {
                double* cc = ab + c * ld + diag;  // cc[i - c] = A(i, c)
                std::swap(cc[static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(c)],
                          cc[static_cast<std::ptrdiff_t>(j + p) - static_cast<std::ptrdiff_t>(c)]);
            }
        }
        const double piv = col[0];
        pmin = std::min(pmin, std::fabs(piv));
        pmax = std::max(pmax, std::fabs(piv));
        const double inv = 1.0 / piv;
        for (std::size_t r = 1; r <= km; ++r) col[r] *= inv;
        for (std::size_t c = j + 1; c <= ju; ++c) {
            double* cc = ab + c * ld + diag;
            const double ujc = cc[static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(c)];
            if (ujc != 0.0)
                axpy(kt, km, -ujc, col + 1, cc + (static_cast<std::ptrdiff_t>(j) + 1 - static_cast<std::ptrdiff_t>(c)));
        }
    }
    pivot_ratio_ = pmax > 0.0 ? pmin / pmax : 0.0;
}

void BandedLU::solve(std::span<double> b) const {
    const std::size_t n = a_.n_, kl = a_.kl_, ku = a_.ku_, ld = a_.ld_;
    if (b.size() != n) throw NumericalError("right-hand side length does not match the factorization");
    const std::size_t diag = kl + ku;
    const double* ab = a_.data_.data();
    const auto& kt = kernels::active();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const std::size_t lm = std::min(kl, n - 1 - j);
        if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
        if (b[j] != 0.0) axpy(kt, lm, -b[j], ab + j * ld + diag + 1, b.data() + j + 1);
    }
    for (std::size_t jj = n; jj-- > 0;) {
        const double* col = ab + jj * ld + diag;  // col[i - jj] = U(i, jj)
        b[jj] /= col[0];
        const std::size_t top = jj > kv_ ? jj - kv_ : 0;
        if (b[jj] != 0.0 && jj > top)
            axpy(kt, jj - top, -b[jj], col - static_cast<std::ptrdiff_t>(jj - top), b.data() + top);
    }
}

}  // namespace riverlv
