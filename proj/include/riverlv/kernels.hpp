#pragma once

#include <cstddef>

// Data-parallel inner loops. Every entry has a scalar reference and, where the CPU
// allows, an AVX2 variant chosen once at startup. Variants agree bit for bit: the
// elementwise kernels use the same operation order without FMA, and the reductions
// in the scalar reference accumulate in four interleaved lanes exactly like the
// vector code.
namespace riverlv::kernels {

struct KernelTable {
    const char* name;

    // out_k = growth_k*u_k * ((1 - (u_k+v_k)/cap_k) - harvest)
    void (*logistic_rate)(std::size_t n, const double* u, const double* v, const double* growth,
                          const double* cap, double harvest, double* out);
    // out_k = u_k + dt * logistic_rate_k
    void (*logistic_step)(std::size_t n, const double* u, const double* v, const double* growth,
                          const double* cap, double harvest, double dt, double* out);
    // y_i = sum_d diag_d[i] * x[i + offset_d], terms falling outside [0,n) are skipped.
    void (*dia_apply)(std::size_t n, std::size_t ndiag, const long* offsets, const double* const* diags,
                      const double* x, double* y);
    // y += a*x
    void (*axpy)(std::size_t n, double a, const double* x, double* y);
    double (*sum)(std::size_t n, const double* x);
    double (*dot)(std::size_t n, const double* x, const double* y);
    double (*max_abs)(std::size_t n, const double* x);
    double (*max_abs_diff)(std::size_t n, const double* x, const double* y);
};

const KernelTable& scalar();
// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2();
// AVX2 when available unless RIVERLV_ISA=scalar is set in the environment.
const KernelTable& active();
// Test hook; not thread safe.
void set_active(const KernelTable& table);

}  // namespace riverlv::kernels
