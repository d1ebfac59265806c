#include "riverlv/kernels.hpp"
#include "scalar_rows.hpp"

#include <immintrin.h>

#include <cmath>

namespace riverlv::kernels {

namespace {

inline __m256d rate4(__m256d u, __m256d v, __m256d g, __m256d cap, __m256d harvest) {
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d w = _mm256_sub_pd(one, _mm256_div_pd(_mm256_add_pd(u, v), cap));
    w = _mm256_sub_pd(w, harvest);
    return _mm256_mul_pd(_mm256_mul_pd(g, u), w);
}

void rate(std::size_t n, const double* u, const double* v, const double* g, const double* cap, double harvest,
          double* out) {
    const __m256d hv = _mm256_set1_pd(harvest);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d r = rate4(_mm256_loadu_pd(u + k), _mm256_loadu_pd(v + k), _mm256_loadu_pd(g + k),
                          _mm256_loadu_pd(cap + k), hv);
        _mm256_storeu_pd(out + k, r);
    }
    for (; k < n; ++k) out[k] = detail::logistic_rate_one(u[k], v[k], g[k], cap[k], harvest);
}

void step(std::size_t n, const double* u, const double* v, const double* g, const double* cap, double harvest,
          double dt, double* out) {
    const __m256d hv = _mm256_set1_pd(harvest);
    const __m256d dtv = _mm256_set1_pd(dt);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d uk = _mm256_loadu_pd(u + k);
        __m256d r = rate4(uk, _mm256_loadu_pd(v + k), _mm256_loadu_pd(g + k), _mm256_loadu_pd(cap + k), hv);
        _mm256_storeu_pd(out + k, _mm256_add_pd(uk, _mm256_mul_pd(dtv, r)));
    }
    for (; k < n; ++k) out[k] = u[k] + dt * detail::logistic_rate_one(u[k], v[k], g[k], cap[k], harvest);
}

void dia(std::size_t n, std::size_t ndiag, const long* offsets, const double* const* diags, const double* x,
         double* y) {
    std::size_t lo, hi;
    detail::dia_interior(n, ndiag, offsets, lo, hi);
    for (std::size_t i = 0; i < lo; ++i) y[i] = detail::dia_row(n, ndiag, offsets, diags, x, i);
    std::size_t i = lo;
    for (; i + 4 <= hi; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t d = 0; d < ndiag; ++d) {
            __m256d c = _mm256_loadu_pd(diags[d] + i);
            __m256d xv = _mm256_loadu_pd(x + static_cast<long>(i) + offsets[d]);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(c, xv));
        }
        _mm256_storeu_pd(y + i, acc);
    }
    for (; i < n; ++i) y[i] = detail::dia_row(n, ndiag, offsets, diags, x, i);
}

void axpy(std::size_t n, double a, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d yv = _mm256_loadu_pd(y + k);
        _mm256_storeu_pd(y + k, _mm256_add_pd(yv, _mm256_mul_pd(av, _mm256_loadu_pd(x + k))));
    }
    for (; k < n; ++k) y[k] = y[k] + a * x[k];
}

inline double fold(__m256d acc) {
    alignas(32) double l[4];
    _mm256_store_pd(l, acc);
    return (l[0] + l[1]) + (l[2] + l[3]);
}

double sum(std::size_t n, const double* x) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + k));
    double total = fold(acc);
    for (; k < n; ++k) total = total + x[k];
    return total;
}

double dot(std::size_t n, const double* x, const double* y) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
    double total = fold(acc);
    for (; k < n; ++k) total = total + x[k] * y[k];
    return total;
}

inline __m256d abs4(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double fold_max(__m256d m) {
    alignas(32) double l[4];
    _mm256_store_pd(l, m);
    return std::fmax(std::fmax(l[0], l[1]), std::fmax(l[2], l[3]));
}

double max_abs(std::size_t n, const double* x) {
    __m256d m = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) m = _mm256_max_pd(m, abs4(_mm256_loadu_pd(x + k)));
    double r = fold_max(m);
    for (; k < n; ++k) r = std::fmax(r, std::fabs(x[k]));
    return r;
}

double max_abs_diff(std::size_t n, const double* x, const double* y) {
    __m256d m = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        m = _mm256_max_pd(m, abs4(_mm256_sub_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k))));
    double r = fold_max(m);
    for (; k < n; ++k) r = std::fmax(r, std::fabs(x[k] - y[k]));
    return r;
}

}  // namespace

extern const KernelTable avx2_table;
const KernelTable avx2_table{"avx2", rate, step, dia, axpy, sum, dot, max_abs, max_abs_diff};

}  // namespace riverlv::kernels
