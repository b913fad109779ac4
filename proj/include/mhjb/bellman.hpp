// SPDX-License-Identifier: MIT
/**
 * @file bellman.hpp
 * @brief Discrete dynamic-programming operator on W_k x I_h.
 *
 *   (A w)(x^i, a) = min_{b in I_h(a)} (1 - lambda h) w(x^i + h g(x^i, a), b) + h f(x^i, a)
 *
 * The image point x^i + h g(x^i, a) does not depend on b or on w, so the
 * operator precomputes one interpolation stencil per (node, level) and each
 * sweep reduces to a blended row scan over b, which is the SIMD kernel.
 */
#pragma once

#include "mhjb/control.hpp"
#include "mhjb/fespace.hpp"
#include "mhjb/mesh.hpp"
#include "mhjb/problem.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mhjb {

/// Next-control index b >= a chosen at every (node, level a).
class PolicyField {
public:
    PolicyField() = default;
    PolicyField(std::size_t nodes, std::size_t levels) : nodes_(nodes), levels_(levels), choice_(nodes * levels) {
        for (std::size_t i = 0; i < nodes; ++i) {
            for (std::size_t a = 0; a < levels; ++a) choice_[i * levels + a] = static_cast<std::uint32_t>(a);
        }
    }

    std::size_t node_count() const noexcept { return nodes_; }
    std::size_t level_count() const noexcept { return levels_; }
    std::uint32_t& at(std::size_t node, std::size_t level) { return choice_[node * levels_ + level]; }
    std::uint32_t at(std::size_t node, std::size_t level) const { return choice_[node * levels_ + level]; }

    /// b >= a everywhere.
    bool admissible() const noexcept;

    friend bool operator==(const PolicyField&, const PolicyField&) = default;

private:
    std::size_t nodes_ = 0;
    std::size_t levels_ = 0;
    std::vector<std::uint32_t> choice_;
};

struct BellmanOptions {
    /// Project images that leave omega_k back onto it instead of failing.
    /// Off by default: it changes the scheme.
    bool clamp = false;
    std::size_t workers = 0;
};

class BellmanOperator {
public:
    /// Throws ConfigError unless 0 < h < 1/lambda and grid.h() == h, and
    /// OutOfDomainError (naming node and control) when an image point leaves
    /// omega_k and clamping is off.
    BellmanOperator(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid, double h,
                    BellmanOptions options = {});

    double h() const noexcept { return h_; }
    double discount() const noexcept { return discount_; }
    /// 1 - lambda h, the contraction factor.
    double contraction() const noexcept { return scale_; }
    std::size_t node_count() const noexcept { return nodes_; }
    std::size_t level_count() const noexcept { return levels_; }
    std::size_t workers() const noexcept { return options_.workers; }
    void set_workers(std::size_t workers) noexcept { options_.workers = workers; }

    /// Full Jacobi sweep: out = A(in); `policy`, if given, receives the
    /// minimising b (smallest on ties). `out` must not alias `in`.
    void apply(const GridFunction& in, GridFunction& out, PolicyField* policy = nullptr) const;

    /// out = T_pi(in): the same update with b frozen to pi(node, a).
    void apply_policy(const GridFunction& in, const PolicyField& policy, GridFunction& out) const;

    /// (1 - lambda h) in(image(node, a), b) + h f(x^node, a).
    double apply_fixed_control(const GridFunction& in, std::size_t node, std::size_t a, std::size_t b) const;

    PolicyField greedy_policy(const GridFunction& in) const;

    /// Interpolation stencil of the image point for (node, a).
    std::span<const VertexId> stencil_vertices(std::size_t node, std::size_t a) const;
    std::span<const double> stencil_weights(std::size_t node, std::size_t a) const;
    /// h f(x^node, a)
    double running_cost(std::size_t node, std::size_t a) const { return cost_[node * levels_ + a]; }

private:
    void check_shape(const GridFunction& gf) const;

    double h_;
    double discount_;
    double scale_;
    std::size_t nodes_;
    std::size_t levels_;
    std::size_t width_;  // nu + 1
    BellmanOptions options_;
    std::vector<VertexId> stencil_vertices_;
    std::vector<double> stencil_weights_;
    std::vector<double> cost_;
};

/// One-shot conveniences that build the operator internally.
double apply_fixed_control(const GridFunction& gf, const ProblemSpec& spec, const Triangulation& tri,
                           const ControlGrid& grid, double h, std::size_t node, std::size_t a, std::size_t b);
std::pair<GridFunction, PolicyField> apply(const GridFunction& gf, const ProblemSpec& spec, const Triangulation& tri,
                                           const ControlGrid& grid, double h, BellmanOptions options = {});
PolicyField greedy_policy(const GridFunction& gf, const ProblemSpec& spec, const Triangulation& tri,
                          const ControlGrid& grid, double h, BellmanOptions options = {});

/// Checks 0 < h < 1/lambda; ConfigError otherwise.
void require_contractive_step(const ProblemSpec& spec, double h);

}  // namespace mhjb
