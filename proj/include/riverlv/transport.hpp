#pragma once

#include "riverlv/banded.hpp"
#include "riverlv/grid.hpp"

#include <span>
#include <vector>

namespace riverlv {

enum class Advection2d {
    x_axis,   // drift along x only, diffusion in both directions
    diagonal  // drift alpha in both x and y
};

// Finite-volume discretisation of u -> (d u_x - alpha u)_x with zero flux through the
// boundary faces. Stored by diagonals: offsets {-n,-1,0,1,n} in 2D, {-1,0,1} in 1D.
struct TransportOperator {
    Grid grid;
    double d = 0.0;
    double alpha = 0.0;
    double peclet = 0.0;
    Advection2d advection = Advection2d::x_axis;
    std::vector<long> offsets;
    std::vector<std::vector<double>> diagonals;

    std::size_t size() const { return grid.size(); }
    std::size_t bandwidth() const;

    void apply(std::span<const double> f, std::span<double> out) const;
    Field apply(const Field& f) const;
    double entry(std::size_t i, std::size_t j) const;

    // shift*I + scale*L in band storage.
    BandedMatrix to_banded(double scale, double shift) const;
    std::vector<double> dense() const;  // row major

    bool is_metzler() const;
    bool is_irreducible() const;
    // Largest |column sum|, which vanishes up to rounding.
    double max_column_sum() const;
    double norm_inf() const;
};

// Smallest n on [a,b] with h*|alpha|/d < 2.
int min_cells_for_peclet(double a, double b, double d, double alpha);

TransportOperator assemble_transport(const Grid& grid, double d, double alpha);
TransportOperator assemble_transport_2d(const Grid& grid, double d, double alpha,
                                        Advection2d advection = Advection2d::x_axis);
// Dispatches on grid.dim.
TransportOperator assemble(const Grid& grid, double d, double alpha, Advection2d advection = Advection2d::x_axis);

// Face fluxes d*(f_{i+1}-f_i)/h - alpha*(f_i+f_{i+1})/2 along x for a 1D field, n+1 values
// with both boundary faces exactly zero.
std::vector<double> face_fluxes(const Field& f, double d, double alpha);

}  // namespace riverlv
