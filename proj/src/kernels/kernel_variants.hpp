// SPDX-License-Identifier: MIT
// Per-ISA entry points; only dispatch.cpp should include this.
#pragma once

#include "mhjb/kernels/kernels.hpp"

namespace mhjb::kernels {

namespace scalar {
ArgMin blend_argmin(const double* const* rows, const double* weights, std::size_t row_count, std::size_t begin,
                    std::size_t end, double scale, double offset);
double max_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if MHJB_HAVE_AVX2
namespace avx2 {
ArgMin blend_argmin(const double* const* rows, const double* weights, std::size_t row_count, std::size_t begin,
                    std::size_t end, double scale, double offset);
double max_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

#if MHJB_HAVE_NEON
namespace neon {
ArgMin blend_argmin(const double* const* rows, const double* weights, std::size_t row_count, std::size_t begin,
                    std::size_t end, double scale, double offset);
double max_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace neon
#endif

}  // namespace mhjb::kernels
