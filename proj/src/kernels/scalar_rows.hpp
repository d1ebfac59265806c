#pragma once

#include <cstddef>

namespace riverlv::kernels::detail {

inline double logistic_rate_one(double u, double v, double growth, double cap, double harvest) {
    double w = 1.0 - (u + v) / cap;
    w = w - harvest;
    return (growth * u) * w;
}

inline double dia_row(std::size_t n, std::size_t ndiag, const long* offsets, const double* const* diags,
                      const double* x, std::size_t i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < ndiag; ++d) {
        long j = static_cast<long>(i) + offsets[d];
        if (j < 0 || j >= static_cast<long>(n)) continue;
        acc = acc + diags[d][i] * x[j];
    }
    return acc;
}

// Rows whose every stencil entry lies inside [0,n).
inline void dia_interior(std::size_t n, std::size_t ndiag, const long* offsets, std::size_t& lo,
                         std::size_t& hi) {
    long min_off = 0, max_off = 0;
    for (std::size_t d = 0; d < ndiag; ++d) {
        if (offsets[d] < min_off) min_off = offsets[d];
        if (offsets[d] > max_off) max_off = offsets[d];
    }
    lo = static_cast<std::size_t>(-min_off);
    hi = n > static_cast<std::size_t>(max_off) ? n - static_cast<std::size_t>(max_off) : 0;
    if (lo > hi) lo = hi;
}

}  // namespace riverlv::kernels::detail
