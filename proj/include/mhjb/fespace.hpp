// SPDX-License-Identifier: MIT
#pragma once

#include "mhjb/control.hpp"
#include "mhjb/mesh.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace mhjb {

/// Element of W_k x I_h: one piecewise-linear field per control level,
/// stored node-major (all levels of a node are contiguous).
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::size_t nodes, std::size_t levels, double fill = 0.0)
        : nodes_(nodes), levels_(levels), values_(nodes * levels, fill) {}
    GridFunction(const Triangulation& tri, const ControlGrid& grid, double fill = 0.0)
        : GridFunction(tri.vertex_count(), grid.level_count(), fill) {}

    std::size_t node_count() const noexcept { return nodes_; }
    std::size_t level_count() const noexcept { return levels_; }

    double& at(std::size_t node, std::size_t level) { return values_[node * levels_ + level]; }
    double at(std::size_t node, std::size_t level) const { return values_[node * levels_ + level]; }

    std::span<double> row(std::size_t node) { return {values_.data() + node * levels_, levels_}; }
    std::span<const double> row(std::size_t node) const { return {values_.data() + node * levels_, levels_}; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool same_shape(const GridFunction& other) const noexcept {
        return nodes_ == other.nodes_ && levels_ == other.levels_;
    }

    friend bool operator==(const GridFunction&, const GridFunction&) = default;

private:
    std::size_t nodes_ = 0;
    std::size_t levels_ = 0;
    std::vector<double> values_;
};

/// Interpolated value at already-located coordinates. Accumulates
/// w_0 v_0 + w_1 v_1 + ... left to right; the Bellman kernels use the same
/// order so both paths agree bit for bit.
double evaluate(const GridFunction& gf, const BarycentricCoords& where, std::size_t level);

/// Barycentric interpolation of the level-`level` field at p.
double evaluate(const GridFunction& gf, const Triangulation& tri, std::span<const double> p, std::size_t level);

/// max over (node, level) of |a - b|; DimensionError on shape mismatch.
double sup_norm_diff(const GridFunction& a, const GridFunction& b);
double sup_norm(const GridFunction& gf);

/// CSV "node,x1,..,xnu,a,value", 17 significant digits.
void write_nodal_csv(std::ostream& os, const GridFunction& gf, const Triangulation& tri, const ControlGrid& grid);

}  // namespace mhjb
