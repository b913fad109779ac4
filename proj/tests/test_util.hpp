// SPDX-License-Identifier: MIT
#pragma once

#include "mhjb/fespace.hpp"

#include <cstdint>
#include <random>

namespace mhjb::test {

inline GridFunction random_grid_function(std::size_t nodes, std::size_t levels, std::mt19937_64& rng,
                                         double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    GridFunction gf(nodes, levels);
    for (double& v : gf.values()) v = dist(rng);
    return gf;
}

}  // namespace mhjb::test
