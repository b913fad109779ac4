// SPDX-License-Identifier: MIT
/**
 * @file mesh.hpp
 * @brief Uniform simplicial triangulation of the inner box omega_k.
 *
 * The box [lower + k, upper - k] is covered by a tensor grid of spacing k.
 * Each grid cell is cut into nu! Kuhn simplices: simplex pi (a permutation
 * of the axes) has vertices c, c + e_pi0, c + e_pi0 + e_pi1, ... so in 2-D
 * every square is split along its lower-left/upper-right diagonal.
 *
 * Point location is O(nu log nu): cell by floor division, simplex by sorting
 * the local coordinates.
 */
#pragma once

#include "mhjb/control.hpp"
#include "mhjb/problem.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mhjb {

using VertexId = std::uint32_t;

struct BarycentricCoords {
    std::size_t simplex = 0;
    std::vector<VertexId> vertices;  // nu + 1 entries
    std::vector<double> weights;     // same order as vertices, sum 1
};

class Triangulation {
public:
    std::size_t dimension() const noexcept { return omega_.dimension(); }
    /// Grid spacing; the discretisation parameter k of every error bound.
    double k() const noexcept { return k_; }
    /// Largest simplex diameter (k * sqrt(nu) for the Kuhn split).
    double max_diameter() const noexcept { return max_diameter_; }
    const Box& omega() const noexcept { return omega_; }
    const std::vector<std::size_t>& cells_per_axis() const noexcept { return cells_; }
    /// Clamp/snap tolerance for point location, 1e-9 k.
    double snap_tolerance() const noexcept { return 1e-9 * k_; }

    std::size_t vertex_count() const noexcept { return vertex_coords_.size() / dimension(); }
    std::span<const double> vertex(std::size_t i) const {
        return {vertex_coords_.data() + i * dimension(), dimension()};
    }

    std::size_t simplex_count() const noexcept { return simplex_vertices_.size() / (dimension() + 1); }
    std::span<const VertexId> simplex(std::size_t j) const {
        return {simplex_vertices_.data() + j * (dimension() + 1), dimension() + 1};
    }

    /// Containing simplex and barycentric weights of p. Points within
    /// snap_tolerance() outside omega_k are clamped onto it; anything further
    /// out raises OutOfDomainError naming the axis.
    BarycentricCoords locate(std::span<const double> p) const;

    friend bool operator==(const Triangulation&, const Triangulation&) = default;

private:
    friend Triangulation build_uniform(const Box& domain, double k);

    double k_ = 0.0;
    double max_diameter_ = 0.0;
    Box omega_;
    std::vector<std::size_t> cells_;
    std::vector<std::size_t> vertex_strides_;
    std::vector<double> vertex_coords_;
    std::vector<VertexId> simplex_vertices_;
    std::vector<std::vector<std::size_t>> permutations_;
};

/// Uniform triangulation of [lower + k, upper - k]. Throws MeshError when the
/// inner box is empty or (width - 2k)/k is not an integer within 1e-9 on
/// some axis.
Triangulation build_uniform(const Box& domain, double k);

/// Nearest k' for which (width - 2k')/k' is an integer on the first axis.
double snap_mesh_size(const Box& domain, double k);

struct MeshReport {
    bool hip1_ok = false;
    double max_diameter = 0.0;
    double min_diameter = 0.0;

    bool hip2_ok = false;
    double hip2_h = 0.0;
    std::size_t hip2_levels = 0;
    std::size_t hip2_violations = 0;
    std::string hip2_first_violation;

    std::optional<double> hip3_margin;

    double chi1 = 0.0;  // min over simplices of inradius / diameter
    bool hip4_ok = false;

    double k_over_d_max = 0.0;  // max_diameter / d_i
    bool hip5_ok = false;

    bool all_ok() const noexcept { return hip1_ok && hip2_ok && hip4_ok && hip5_ok; }
};

/// Evaluates the triangulation hypotheses for the time step h and control
/// grid. HIP2 is tested on exactly the points the Bellman operator visits:
/// x^i + h g(x^i, a) for every vertex and every level. `compact`, when
/// given, yields the HIP3 margin (negative if it is not inside omega_k).
MeshReport check_hypotheses(const Triangulation& tri, const ProblemSpec& spec, double h,
                            const ControlGrid& grid, const std::optional<Box>& compact = std::nullopt);

/// Inradius of the simplex with the given vertex coordinates (nu + 1 points).
double simplex_inradius(const std::vector<std::vector<double>>& points);
/// Largest pairwise vertex distance.
double simplex_diameter(const std::vector<std::vector<double>>& points);

/// Text dump: "i x1 .. xnu" per vertex, "j v0 .. vnu" per simplex.
void write_vertices(std::ostream& os, const Triangulation& tri);
void write_simplices(std::ostream& os, const Triangulation& tri);

}  // namespace mhjb
