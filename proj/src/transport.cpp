#include "riverlv/transport.hpp"

#include "riverlv/error.hpp"
#include "riverlv/kernels.hpp"

#include <cmath>
#include <sstream>

namespace riverlv {

namespace {

void check_peclet(const Grid& grid, double d, double alpha) {
    if (!(std::isfinite(d) && d > 0.0)) throw ConfigError("diffusion must be positive");
    if (!std::isfinite(alpha)) throw ConfigError("advection must be finite");
    double pe = grid.h * std::fabs(alpha) / d;
    if (pe >= 2.0) {
        int nmin = min_cells_for_peclet(grid.a, grid.b, d, alpha);
        std::ostringstream msg;
        msg << "grid Peclet number h*|alpha|/d = " << pe << " must be below 2 (d=" << d << ", alpha=" << alpha
            << "); use n >= " << nmin;
        throw PecletError(msg.str(), nmin);
    }
}

// 1D three-point stencil: row i gets (west, centre, east) coefficients.
struct Stencil1d {
    std::vector<double> west, centre, east;
};

Stencil1d stencil_1d(int n, double h, double d, double alpha) {
    Stencil1d s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    // Face i+1/2 between cells i and i+1: F = cl*u_i + cr*u_{i+1}.
    const double cl = (-d / h - alpha / 2.0) / h;
    const double cr = (d / h - alpha / 2.0) / h;
    for (int i = 0; i + 1 < n; ++i) {
        // (Lu)_i gains +F/h, (Lu)_{i+1} loses F/h.
        s.centre[i] += cl;
        s.east[i] += cr;
        s.west[i + 1] -= cl;
        s.centre[i + 1] -= cr;
    }
    return s;
}

}  // namespace

int min_cells_for_peclet(double a, double b, double d, double alpha) {
    double need = (b - a) * std::fabs(alpha) / (2.0 * d);
    int n = static_cast<int>(std::floor(need)) + 1;
    // Rounding in h may leave the boundary case at exactly 2.
    while (((b - a) / n) * std::fabs(alpha) / d >= 2.0) ++n;
    return std::max(n, 3);
}

std::size_t TransportOperator::bandwidth() const { return grid.dim == 1 ? 1 : static_cast<std::size_t>(grid.n); }

TransportOperator assemble_transport(const Grid& grid, double d, double alpha) {
    if (grid.dim != 1) throw ConfigError("assemble_transport expects a 1D grid");
    check_peclet(grid, d, alpha);
    TransportOperator op;
    op.grid = grid;
    op.d = d;
    op.alpha = alpha;
    op.peclet = grid.h * std::fabs(alpha) / d;
    Stencil1d s = stencil_1d(grid.n, grid.h, d, alpha);
    op.offsets = {-1, 0, 1};
    op.diagonals = {std::move(s.west), std::move(s.centre), std::move(s.east)};
    return op;
}

TransportOperator assemble_transport_2d(const Grid& grid, double d, double alpha, Advection2d advection) {
    if (grid.dim != 2) throw ConfigError("assemble_transport_2d expects a 2D grid");
    check_peclet(grid, d, alpha);
    const int n = grid.n;
    const std::size_t N = grid.size();
    TransportOperator op;
    op.grid = grid;
    op.d = d;
    op.alpha = alpha;
    op.peclet = grid.h * std::fabs(alpha) / d;
    op.advection = advection;
    Stencil1d sx = stencil_1d(n, grid.h, d, alpha);
    Stencil1d sy = stencil_1d(n, grid.h, d, advection == Advection2d::diagonal ? alpha : 0.0);
    std::vector<double> south(N, 0.0), west(N, 0.0), centre(N, 0.0), east(N, 0.0), north(N, 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::size_t k = static_cast<std::size_t>(j) * n + i;
            west[k] = sx.west[i];
            east[k] = sx.east[i];
            south[k] = sy.west[j];
            north[k] = sy.east[j];
            centre[k] = sx.centre[i] + sy.centre[j];
        }
    op.offsets = {-n, -1, 0, 1, n};
    op.diagonals = {std::move(south), std::move(west), std::move(centre), std::move(east), std::move(north)};
    return op;
}

TransportOperator assemble(const Grid& grid, double d, double alpha, Advection2d advection) {
    return grid.dim == 1 ? assemble_transport(grid, d, alpha) : assemble_transport_2d(grid, d, alpha, advection);
}

void TransportOperator::apply(std::span<const double> f, std::span<double> out) const {
    if (f.size() != size() || out.size() != size()) throw ConfigError("field shape does not match operator");
    const double* diag_ptrs[5];
    for (std::size_t q = 0; q < diagonals.size(); ++q) diag_ptrs[q] = diagonals[q].data();
    kernels::active().dia_apply(size(), diagonals.size(), offsets.data(), diag_ptrs, f.data(), out.data());
}

Field TransportOperator::apply(const Field& f) const {
    if (!(f.grid == grid)) throw ConfigError("field grid does not match operator grid");
    Field out(grid);
    apply(f.span(), out.span());
    return out;
}

double TransportOperator::entry(std::size_t i, std::size_t j) const {
    long off = static_cast<long>(j) - static_cast<long>(i);
    for (std::size_t q = 0; q < offsets.size(); ++q)
        if (offsets[q] == off) return diagonals[q][i];
    return 0.0;
}

BandedMatrix TransportOperator::to_banded(double scale, double shift) const {
    const std::size_t N = size(), bw = bandwidth();
    BandedMatrix m(N, bw, bw);
    for (std::size_t q = 0; q < offsets.size(); ++q) {
        for (std::size_t i = 0; i < N; ++i) {
            long j = static_cast<long>(i) + offsets[q];
            if (j < 0 || j >= static_cast<long>(N)) continue;
            m.add(i, static_cast<std::size_t>(j), scale * diagonals[q][i]);
        }
    }
    for (std::size_t i = 0; i < N; ++i) m.add(i, i, shift);
    return m;
}

std::vector<double> TransportOperator::dense() const {
    const std::size_t N = size();
    std::vector<double> m(N * N, 0.0);
    for (std::size_t q = 0; q < offsets.size(); ++q)
        for (std::size_t i = 0; i < N; ++i) {
            long j = static_cast<long>(i) + offsets[q];
            if (j < 0 || j >= static_cast<long>(N)) continue;
            m[i * N + static_cast<std::size_t>(j)] += diagonals[q][i];
        }
    return m;
}

bool TransportOperator::is_metzler() const {
    const std::size_t N = size();
    for (std::size_t q = 0; q < offsets.size(); ++q) {
        if (offsets[q] == 0) continue;
        for (std::size_t i = 0; i < N; ++i)
            if (diagonals[q][i] < 0.0) return false;
    }
    return true;
}

bool TransportOperator::is_irreducible() const {
    // Strong connectivity of the directed graph i -> j for L_ij != 0, via forward and reverse reachability from 0.
    const std::size_t N = size();
    auto reach = [&](bool reverse) {
        std::vector<char> seen(N, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t q = 0; q < offsets.size(); ++q) {
                if (offsets[q] == 0) continue;
                long j = static_cast<long>(i) + offsets[q];
                if (j < 0 || j >= static_cast<long>(N)) continue;
                // Edge i -> j exists when L_ij != 0; the reverse edge j -> i when L_ji != 0.
                double w = reverse ? entry(static_cast<std::size_t>(j), i) : diagonals[q][i];
                if (w != 0.0 && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = 1;
                    ++count;
                    stack.push_back(static_cast<std::size_t>(j));
                }
            }
        }
        return count == N;
    };
    return reach(false) && reach(true);
}

double TransportOperator::max_column_sum() const {
    const std::size_t N = size();
    std::vector<double> col(N, 0.0);
    for (std::size_t q = 0; q < offsets.size(); ++q)
        for (std::size_t i = 0; i < N; ++i) {
            long j = static_cast<long>(i) + offsets[q];
            if (j < 0 || j >= static_cast<long>(N)) continue;
            col[static_cast<std::size_t>(j)] += diagonals[q][i];
        }
    double m = 0.0;
    for (double c : col) m = std::max(m, std::fabs(c));
    return m;
}

double TransportOperator::norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        double s = 0.0;
        for (std::size_t q = 0; q < offsets.size(); ++q) s += std::fabs(diagonals[q][i]);
        m = std::max(m, s);
    }
    return m;
}

std::vector<double> face_fluxes(const Field& f, double d, double alpha) {
    const Grid& g = f.grid;
    if (g.dim != 1) throw ConfigError("face_fluxes expects a 1D field");
    std::vector<double> F(static_cast<std::size_t>(g.n) + 1, 0.0);
    for (int i = 0; i + 1 < g.n; ++i)
        F[i + 1] = d * (f[i + 1] - f[i]) / g.h - alpha * (f[i] + f[i + 1]) / 2.0;
    return F;
}

}  // namespace riverlv
