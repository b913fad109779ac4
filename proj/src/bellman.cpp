// SPDX-License-Identifier: MIT
#include "mhjb/bellman.hpp"

#include "mhjb/error.hpp"
#include "mhjb/io.hpp"
#include "mhjb/kernels/kernels.hpp"
#include "mhjb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mhjb {

namespace {

void image_point(const ProblemSpec& spec, std::span<const double> x, double a, double h, std::span<double> velocity,
                 std::span<double> image) {
    spec.dynamics(x, a, velocity);
    for (std::size_t d = 0; d < x.size(); ++d) image[d] = x[d] + h * velocity[d];
}

BarycentricCoords locate_image(const Triangulation& tri, std::span<double> image, bool clamp, std::size_t node,
                               double a) {
    if (clamp) {
        for (std::size_t d = 0; d < image.size(); ++d) {
            image[d] = std::clamp(image[d], tri.omega().lower[d], tri.omega().upper[d]);
        }
    }
    try {
        return tri.locate(image);
    } catch (const OutOfDomainError& e) {
        std::ostringstream os;
        os << "image of node " << node << " under control a = " << format_double(a)
           << " leaves omega_k (HIP2 fails): " << e.what();
        throw OutOfDomainError(os.str(), e.axis(), e.coordinate());
    }
}

}  // namespace

bool PolicyField::admissible() const noexcept {
    for (std::size_t i = 0; i < nodes_; ++i) {
        for (std::size_t a = 0; a < levels_; ++a) {
            const auto b = choice_[i * levels_ + a];
            if (b < a || b >= levels_) return false;
        }
    }
    return true;
}

void require_contractive_step(const ProblemSpec& spec, double h) {
    if (!(h > 0.0) || !(h * spec.discount < 1.0)) {
        std::ostringstream os;
        os << "time step must satisfy 0 < h < 1/lambda (h = " << format_double(h)
           << ", lambda = " << format_double(spec.discount) << ")";
        throw ConfigError(os.str());
    }
}

BellmanOperator::BellmanOperator(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid, double h,
                                 BellmanOptions options)
    : h_(h),
      discount_(spec.discount),
      scale_(1.0 - spec.discount * h),
      nodes_(tri.vertex_count()),
      levels_(grid.level_count()),
      width_(tri.dimension() + 1),
      options_(options) {
    require_contractive_step(spec, h);
    if (std::abs(grid.h() - h) > 1e-12 * h) throw ConfigError("control grid spacing differs from the time step h");
    if (spec.dimension() != tri.dimension()) throw DimensionError("problem and mesh dimensions differ");

    const std::size_t nu = tri.dimension();
    stencil_vertices_.resize(nodes_ * levels_ * width_);
    stencil_weights_.resize(nodes_ * levels_ * width_);
    cost_.resize(nodes_ * levels_);

    parallel_for(nodes_, options_.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> velocity(nu), image(nu);
        for (std::size_t i = begin; i < end; ++i) {
            const auto x = tri.vertex(i);
            for (std::size_t a = 0; a < levels_; ++a) {
                const double level = grid.level(a);
                image_point(spec, x, level, h_, velocity, image);
                const BarycentricCoords bc = locate_image(tri, image, options_.clamp, i, level);
                const std::size_t slot = (i * levels_ + a) * width_;
                std::copy(bc.vertices.begin(), bc.vertices.end(), stencil_vertices_.begin() + slot);
                std::copy(bc.weights.begin(), bc.weights.end(), stencil_weights_.begin() + slot);
                cost_[i * levels_ + a] = h_ * spec.cost(x, level);
            }
        }
    });
}

std::span<const VertexId> BellmanOperator::stencil_vertices(std::size_t node, std::size_t a) const {
    return {stencil_vertices_.data() + (node * levels_ + a) * width_, width_};
}

std::span<const double> BellmanOperator::stencil_weights(std::size_t node, std::size_t a) const {
    return {stencil_weights_.data() + (node * levels_ + a) * width_, width_};
}

void BellmanOperator::check_shape(const GridFunction& gf) const {
    if (gf.node_count() != nodes_ || gf.level_count() != levels_) {
        throw DimensionError("grid function shape does not match the Bellman operator");
    }
}

void BellmanOperator::apply(const GridFunction& in, GridFunction& out, PolicyField* policy) const {
    check_shape(in);
    if (!out.same_shape(in)) out = GridFunction(nodes_, levels_);
    if (policy != nullptr && (policy->node_count() != nodes_ || policy->level_count() != levels_)) {
        *policy = PolicyField(nodes_, levels_);
    }
    const kernels::KernelTable& k = kernels::active();
    parallel_for(nodes_, options_.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<const double*> rows(width_);
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t a = 0; a < levels_; ++a) {
                const std::size_t slot = (i * levels_ + a) * width_;
                for (std::size_t j = 0; j < width_; ++j) rows[j] = in.row(stencil_vertices_[slot + j]).data();
                const kernels::ArgMin best = k.blend_argmin(rows.data(), stencil_weights_.data() + slot, width_, a,
                                                            levels_, scale_, cost_[i * levels_ + a]);
                out.at(i, a) = best.value;
                if (policy != nullptr) policy->at(i, a) = static_cast<std::uint32_t>(best.index);
            }
        }
    });
}

void BellmanOperator::apply_policy(const GridFunction& in, const PolicyField& policy, GridFunction& out) const {
    check_shape(in);
    if (policy.node_count() != nodes_ || policy.level_count() != levels_) {
        throw DimensionError("policy shape does not match the Bellman operator");
    }
    if (!out.same_shape(in)) out = GridFunction(nodes_, levels_);
    parallel_for(nodes_, options_.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t a = 0; a < levels_; ++a) out.at(i, a) = apply_fixed_control(in, i, a, policy.at(i, a));
        }
    });
}

double BellmanOperator::apply_fixed_control(const GridFunction& in, std::size_t node, std::size_t a,
                                            std::size_t b) const {
    const std::size_t slot = (node * levels_ + a) * width_;
    double acc = stencil_weights_[slot] * in.at(stencil_vertices_[slot], b);
    for (std::size_t j = 1; j < width_; ++j) acc = acc + stencil_weights_[slot + j] * in.at(stencil_vertices_[slot + j], b);
    return scale_ * acc + cost_[node * levels_ + a];
}

PolicyField BellmanOperator::greedy_policy(const GridFunction& in) const {
    GridFunction scratch(nodes_, levels_);
    PolicyField policy(nodes_, levels_);
    apply(in, scratch, &policy);
    return policy;
}

double apply_fixed_control(const GridFunction& gf, const ProblemSpec& spec, const Triangulation& tri,
                           const ControlGrid& grid, double h, std::size_t node, std::size_t a, std::size_t b) {
    require_contractive_step(spec, h);
    if (node >= tri.vertex_count() || a > grid.top() || b > grid.top()) {
        throw DimensionError("node or control index out of range");
    }
    if (b < a) throw ConfigError("next control must satisfy b >= a (monotone controls)");
    const std::size_t nu = tri.dimension();
    std::vector<double> velocity(nu), image(nu);
    const auto x = tri.vertex(node);
    image_point(spec, x, grid.level(a), h, velocity, image);
    const BarycentricCoords bc = locate_image(tri, image, false, node, grid.level(a));
    return (1.0 - spec.discount * h) * evaluate(gf, bc, b) + h * spec.cost(x, grid.level(a));
}

std::pair<GridFunction, PolicyField> apply(const GridFunction& gf, const ProblemSpec& spec, const Triangulation& tri,
                                           const ControlGrid& grid, double h, BellmanOptions options) {
    const BellmanOperator op(spec, tri, grid, h, options);
    GridFunction out(tri, grid);
    PolicyField policy(tri.vertex_count(), grid.level_count());
    op.apply(gf, out, &policy);
    return {std::move(out), std::move(policy)};
}

PolicyField greedy_policy(const GridFunction& gf, const ProblemSpec& spec, const Triangulation& tri,
                          const ControlGrid& grid, double h, BellmanOptions options) {
    return BellmanOperator(spec, tri, grid, h, options).greedy_policy(gf);
}

}  // namespace mhjb
