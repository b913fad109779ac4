// SPDX-License-Identifier: MIT
/**
 * @file kernels.hpp
 * @brief Data-parallel inner loops with scalar and SIMD variants.
 *
 * Every variant performs the same IEEE operations in the same order (no
 * fused multiply-add: the library is built with -ffp-contract=off), so the
 * results are bit-identical across ISAs. The variant is chosen once at
 * startup from CPU features, or forced with MHJB_SIMD=scalar|avx2|neon.
 */
#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace mhjb::kernels {

enum class Isa { scalar, avx2, neon };

struct ArgMin {
    double value;
    std::size_t index;
};

/// For b in [begin, end):
///   cand_b = scale * (w_0 r_0[b] + w_1 r_1[b] + ... + w_{n-1} r_{n-1}[b]) + offset
/// returns the smallest cand_b and the first index attaining it.
/// Requires begin < end.
using BlendArgMinFn = ArgMin (*)(const double* const* rows, const double* weights, std::size_t row_count,
                                 std::size_t begin, std::size_t end, double scale, double offset);

/// max_i |a_i - b_i| (0 for n == 0).
using MaxAbsDiffFn = double (*)(const double* a, const double* b, std::size_t n);

struct KernelTable {
    Isa isa;
    std::string_view name;
    BlendArgMinFn blend_argmin;
    MaxAbsDiffFn max_abs_diff;
};

/// Table in use for this process.
const KernelTable& active();

/// Table for a specific ISA, or nullptr if it is not compiled in or the CPU
/// lacks it.
const KernelTable* table_for(Isa isa);

/// ISAs usable on this machine, scalar first.
std::vector<Isa> available();

std::string_view isa_name(Isa isa);

}  // namespace mhjb::kernels
