#pragma once

#include "riverlv/expr.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace riverlv {

// Uniform cell-centred grid on [a,b] or [a,b]^2. Cells are indexed k = j*n + i with x fastest.
struct Grid {
    int dim = 1;
    double a = 0.0;
    double b = 1.0;
    int n = 0;
    double h = 0.0;

    static Grid line(double a, double b, int n);
    static Grid square(double a, double b, int n);

    std::size_t size() const { return dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n; }
    double center(int i) const { return a + (i + 0.5) * h; }
    double x(std::size_t k) const { return center(static_cast<int>(k % static_cast<std::size_t>(n))); }
    double y(std::size_t k) const { return dim == 1 ? 0.0 : center(static_cast<int>(k / static_cast<std::size_t>(n))); }
    double cell_volume() const { return dim == 1 ? h : h * h; }

    bool operator==(const Grid&) const = default;
};

struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    Field(const Grid& g, std::vector<double> v);

    static Field sample(const Grid& g, const Expr& e);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
    std::span<double> span() { return values; }
    std::span<const double> span() const { return values; }

    double max_abs() const;
    double min() const;
    double max() const;
    // Sum of cell values times cell volume.
    double mass() const;
};

}  // namespace riverlv
