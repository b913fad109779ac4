// SPDX-License-Identifier: MIT
#include "mhjb/fespace.hpp"

#include "mhjb/error.hpp"
#include "mhjb/io.hpp"
#include "mhjb/kernels/kernels.hpp"

#include <ostream>

namespace mhjb {

double evaluate(const GridFunction& gf, const BarycentricCoords& where, std::size_t level) {
    if (level >= gf.level_count()) throw DimensionError("control level index out of range");
    double acc = where.weights[0] * gf.at(where.vertices[0], level);
    for (std::size_t j = 1; j < where.vertices.size(); ++j) acc = acc + where.weights[j] * gf.at(where.vertices[j], level);
    return acc;
}

double evaluate(const GridFunction& gf, const Triangulation& tri, std::span<const double> p, std::size_t level) {
    if (gf.node_count() != tri.vertex_count()) throw DimensionError("grid function does not match the mesh");
    return evaluate(gf, tri.locate(p), level);
}

double sup_norm_diff(const GridFunction& a, const GridFunction& b) {
    if (!a.same_shape(b)) throw DimensionError("sup_norm_diff: grid functions have different shapes");
    return kernels::active().max_abs_diff(a.values().data(), b.values().data(), a.values().size());
}

double sup_norm(const GridFunction& gf) {
    const GridFunction zero(gf.node_count(), gf.level_count());
    return sup_norm_diff(gf, zero);
}

void write_nodal_csv(std::ostream& os, const GridFunction& gf, const Triangulation& tri, const ControlGrid& grid) {
    if (gf.node_count() != tri.vertex_count() || gf.level_count() != grid.level_count()) {
        throw DimensionError("grid function does not match mesh/control grid");
    }
    os << "node";
    for (std::size_t d = 0; d < tri.dimension(); ++d) os << ",x" << d + 1;
    os << ",a,value\n";
    for (std::size_t i = 0; i < gf.node_count(); ++i) {
        const auto x = tri.vertex(i);
        for (std::size_t l = 0; l < gf.level_count(); ++l) {
            os << i;
            for (double c : x) os << ',' << format_double(c);
            os << ',' << format_double(grid.level(l)) << ',' << format_double(gf.at(i, l)) << '\n';
        }
    }
}

}  // namespace mhjb
