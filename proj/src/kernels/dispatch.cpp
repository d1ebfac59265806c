#include "riverlv/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace riverlv::kernels {

#ifdef RIVERLV_HAVE_AVX2
extern const KernelTable avx2_table;
#endif

const KernelTable* avx2() {
#ifdef RIVERLV_HAVE_AVX2
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok ? &avx2_table : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable* choose() {
    const char* env = std::getenv("RIVERLV_ISA");
    if (env && std::string_view(env) == "scalar") return &scalar();
    if (const KernelTable* t = avx2()) return t;
    return &scalar();
}

const KernelTable*& current() {
    static const KernelTable* t = choose();
    return t;
}

}  // namespace

const KernelTable& active() { return *current(); }

void set_active(const KernelTable& table) { current() = &table; }

}  // namespace riverlv::kernels
