#include "riverlv/kernels.hpp"
#include "scalar_rows.hpp"

#include <cmath>

namespace riverlv::kernels {

namespace {

void rate(std::size_t n, const double* u, const double* v, const double* g, const double* cap, double harvest,
          double* out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = detail::logistic_rate_one(u[k], v[k], g[k], cap[k], harvest);
}

void step(std::size_t n, const double* u, const double* v, const double* g, const double* cap, double harvest,
          double dt, double* out) {
    for (std::size_t k = 0; k < n; ++k)
        out[k] = u[k] + dt * detail::logistic_rate_one(u[k], v[k], g[k], cap[k], harvest);
}

void dia(std::size_t n, std::size_t ndiag, const long* offsets, const double* const* diags, const double* x,
         double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = detail::dia_row(n, ndiag, offsets, diags, x, i);
}

void axpy(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t k = 0; k < n; ++k) y[k] = y[k] + a * x[k];
}

double sum(std::size_t n, const double* x) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        for (int l = 0; l < 4; ++l) acc[l] = acc[l] + x[k + l];
    double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (; k < n; ++k) total = total + x[k];
    return total;
}

double dot(std::size_t n, const double* x, const double* y) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        for (int l = 0; l < 4; ++l) acc[l] = acc[l] + x[k + l] * y[k + l];
    double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (; k < n; ++k) total = total + x[k] * y[k];
    return total;
}

double max_abs(std::size_t n, const double* x) {
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) m = std::fmax(m, std::fabs(x[k]));
    return m;
}

double max_abs_diff(std::size_t n, const double* x, const double* y) {
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) m = std::fmax(m, std::fabs(x[k] - y[k]));
    return m;
}

const KernelTable table{"scalar", rate, step, dia, axpy, sum, dot, max_abs, max_abs_diff};

}  // namespace

const KernelTable& scalar() { return table; }

}  // namespace riverlv::kernels
