// SPDX-License-Identifier: MIT
#include "kernel_variants.hpp"

#include <cstdlib>
#include <string>

namespace mhjb::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, "scalar", scalar::blend_argmin, scalar::max_abs_diff};
#if MHJB_HAVE_AVX2
constexpr KernelTable kAvx2{Isa::avx2, "avx2", avx2::blend_argmin, avx2::max_abs_diff};
#endif
#if MHJB_HAVE_NEON
constexpr KernelTable kNeon{Isa::neon, "neon", neon::blend_argmin, neon::max_abs_diff};
#endif

bool cpu_has_avx2() {
#if MHJB_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable& select_default() {
    const char* forced = std::getenv("MHJB_SIMD");
    if (forced != nullptr && *forced != '\0' && std::string(forced) != "auto") {
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (isa_name(isa) == forced) {
                if (const KernelTable* t = table_for(isa)) return *t;
            }
        }
        // Unknown or unavailable request: fall back to the portable path.
        return kScalar;
    }
    const auto isas = available();
    return *table_for(isas.back());
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

const KernelTable* table_for(Isa isa) {
    switch (isa) {
        case Isa::scalar: return &kScalar;
        case Isa::avx2:
#if MHJB_HAVE_AVX2
            if (cpu_has_avx2()) return &kAvx2;
#endif
            return nullptr;
        case Isa::neon:
#if MHJB_HAVE_NEON
            return &kNeon;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

std::vector<Isa> available() {
    std::vector<Isa> out{Isa::scalar};
    for (Isa isa : {Isa::avx2, Isa::neon}) {
        if (table_for(isa) != nullptr) out.push_back(isa);
    }
    return out;
}

const KernelTable& active() {
    static const KernelTable& table = select_default();
    return table;
}

}  // namespace mhjb::kernels
