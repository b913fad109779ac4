// SPDX-License-Identifier: MIT
// Compiled with -mavx2 (and without -mfma); only reached after a CPUID check.
#include "kernel_variants.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace mhjb::kernels::avx2 {

ArgMin blend_argmin(const double* const* rows, const double* weights, std::size_t row_count, std::size_t begin,
                    std::size_t end, double scale, double offset) {
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m256d voffset = _mm256_set1_pd(offset);
    const __m256d step = _mm256_set1_pd(4.0);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d best_idx = _mm256_set1_pd(static_cast<double>(begin));
    __m256d idx = _mm256_setr_pd(static_cast<double>(begin), static_cast<double>(begin + 1),
                                 static_cast<double>(begin + 2), static_cast<double>(begin + 3));

    std::size_t b = begin;
    for (; b + 4 <= end; b += 4) {
        __m256d acc = _mm256_mul_pd(_mm256_set1_pd(weights[0]), _mm256_loadu_pd(rows[0] + b));
        for (std::size_t j = 1; j < row_count; ++j) {
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(weights[j]), _mm256_loadu_pd(rows[j] + b)));
        }
        const __m256d cand = _mm256_add_pd(_mm256_mul_pd(vscale, acc), voffset);
        const __m256d less = _mm256_cmp_pd(cand, best, _CMP_LT_OQ);
        best = _mm256_blendv_pd(best, cand, less);
        best_idx = _mm256_blendv_pd(best_idx, idx, less);
        idx = _mm256_add_pd(idx, step);
    }

    ArgMin result{std::numeric_limits<double>::infinity(), begin};
    bool have = false;
    if (b > begin) {
        alignas(32) double vals[4];
        alignas(32) double ids[4];
        _mm256_store_pd(vals, best);
        _mm256_store_pd(ids, best_idx);
        for (int lane = 0; lane < 4; ++lane) {
            const auto lane_idx = static_cast<std::size_t>(ids[lane]);
            if (!have || vals[lane] < result.value || (vals[lane] == result.value && lane_idx < result.index)) {
                result = {vals[lane], lane_idx};
                have = true;
            }
        }
    }
    for (; b < end; ++b) {
        double acc = weights[0] * rows[0][b];
        for (std::size_t j = 1; j < row_count; ++j) acc = acc + weights[j] * rows[j][b];
        const double cand = scale * acc + offset;
        if (!have || cand < result.value) {
            result = {cand, b};
            have = true;
        }
    }
    return result;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double out = 0.0;
    for (double v : lanes) out = v > out ? v : out;
    for (; i < n; ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (d > out) out = d;
    }
    return out;
}

}  // namespace mhjb::kernels::avx2
