// SPDX-License-Identifier: MIT
#include "kernel_variants.hpp"

#include <cmath>

namespace mhjb::kernels::scalar {

ArgMin blend_argmin(const double* const* rows, const double* weights, std::size_t row_count, std::size_t begin,
                    std::size_t end, double scale, double offset) {
    ArgMin best{0.0, begin};
    for (std::size_t b = begin; b < end; ++b) {
        double acc = weights[0] * rows[0][b];
        for (std::size_t j = 1; j < row_count; ++j) acc = acc + weights[j] * rows[j][b];
        const double cand = scale * acc + offset;
        if (b == begin || cand < best.value) best = {cand, b};
    }
    return best;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

}  // namespace mhjb::kernels::scalar
