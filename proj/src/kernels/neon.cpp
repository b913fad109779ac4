// SPDX-License-Identifier: MIT
// AdvSIMD is baseline on aarch64; this file is only built there.
#include "kernel_variants.hpp"

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace mhjb::kernels::neon {

ArgMin blend_argmin(const double* const* rows, const double* weights, std::size_t row_count, std::size_t begin,
                    std::size_t end, double scale, double offset) {
    const float64x2_t vscale = vdupq_n_f64(scale);
    const float64x2_t voffset = vdupq_n_f64(offset);
    const float64x2_t step = vdupq_n_f64(2.0);
    float64x2_t best = vdupq_n_f64(std::numeric_limits<double>::infinity());
    float64x2_t best_idx = vdupq_n_f64(static_cast<double>(begin));
    const double start[2] = {static_cast<double>(begin), static_cast<double>(begin + 1)};
    float64x2_t idx = vld1q_f64(start);

    std::size_t b = begin;
    for (; b + 2 <= end; b += 2) {
        float64x2_t acc = vmulq_f64(vdupq_n_f64(weights[0]), vld1q_f64(rows[0] + b));
        for (std::size_t j = 1; j < row_count; ++j) {
            acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(weights[j]), vld1q_f64(rows[j] + b)));
        }
        const float64x2_t cand = vaddq_f64(vmulq_f64(vscale, acc), voffset);
        const uint64x2_t less = vcltq_f64(cand, best);
        best = vbslq_f64(less, cand, best);
        best_idx = vbslq_f64(less, idx, best_idx);
        idx = vaddq_f64(idx, step);
    }

    ArgMin result{std::numeric_limits<double>::infinity(), begin};
    bool have = false;
    if (b > begin) {
        double vals[2];
        double ids[2];
        vst1q_f64(vals, best);
        vst1q_f64(ids, best_idx);
        for (int lane = 0; lane < 2; ++lane) {
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
    float64x2_t m = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    double out = vmaxvq_f64(m);
    for (; i < n; ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (d > out) out = d;
    }
    return out;
}

}  // namespace mhjb::kernels::neon
