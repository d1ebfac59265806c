#include "riverlv/grid.hpp"

#include "riverlv/error.hpp"
#include "riverlv/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace riverlv {

namespace {

Grid make_grid(int dim, double a, double b, int n) {
    if (!(std::isfinite(a) && std::isfinite(b)) || !(b > a))
        throw ConfigError("domain must satisfy a < b");
    if (n < 3) throw ConfigError("grid needs at least 3 cells per axis, got " + std::to_string(n));
    Grid g;
    g.dim = dim;
    g.a = a;
    g.b = b;
    g.n = n;
    g.h = (b - a) / n;
    return g;
}

}  // namespace

Grid Grid::line(double a, double b, int n) { return make_grid(1, a, b, n); }
Grid Grid::square(double a, double b, int n) { return make_grid(2, a, b, n); }

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) throw ConfigError("field length does not match grid");
}

Field Field::sample(const Grid& g, const Expr& e) {
    Field f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = e(g.x(k), g.y(k));
    return f;
}

double Field::max_abs() const { return kernels::active().max_abs(values.size(), values.data()); }

double Field::min() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }

double Field::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

double Field::mass() const { return kernels::active().sum(values.size(), values.data()) * grid.cell_volume(); }

}  // namespace riverlv
