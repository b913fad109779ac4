// SPDX-License-Identifier: MIT
/**
 * @file problem.hpp
 * @brief Infinite-horizon discounted control problem with monotone controls.
 *
 * The state x lives in an axis-aligned box Omega of R^nu, the scalar control
 * a lies in [0,1] and may only increase along a trajectory. A problem is the
 * tuple (g, f, lambda, Omega) plus the Lipschitz/bound constants
 *
 *   |g(x,a) - g(y,b)| <= L_g (|x-y| + |a-b|),   |g| <= M_g,
 *   |f(x,a) - f(y,b)| <= L_f (|x-y| + |a-b|),   |f| <= M_f,
 *
 * which drive the Hoelder exponent of the value function and every error
 * bound in harness.hpp.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mhjb {

/// Axis-aligned box [lower, upper] in R^nu.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dimension() const noexcept { return lower.size(); }
    double width(std::size_t axis) const { return upper[axis] - lower[axis]; }

    friend bool operator==(const Box&, const Box&) = default;
};

/// Writes g(x, a) into `velocity` (same length as x).
using DynamicsFn = std::function<void(std::span<const double> x, double a, std::span<double> velocity)>;
/// Running cost f(x, a).
using CostFn = std::function<double(std::span<const double> x, double a)>;
/// Closed-form u(x, 1) when the problem has one (trajectory under a == 1).
using SliceFn = std::function<double(std::span<const double> x)>;

struct ProblemSpec {
    std::string name;
    DynamicsFn dynamics;
    CostFn cost;
    double discount = 1.0;
    Box domain;
    double lip_g = 0.0;
    double bound_g = 0.0;
    double lip_f = 0.0;
    double bound_f = 0.0;
    std::optional<double> gamma_override;
    SliceFn top_level_value;  // empty when no closed form is known

    std::size_t dimension() const noexcept { return domain.dimension(); }

    /// Throws ConfigError unless discount > 0, lower < upper per axis and
    /// every constant is non-negative.
    void validate() const;
};

/// Names accepted by builtin().
std::vector<std::string> builtin_ids();

/// Registered example problems:
///  - "paper_example_2d": Omega=(-1,1)^2, lambda=1, g=-(a+1)x, f=a(1/4-|x|^2)
///  - "zero_cost_2d":     same dynamics, f == 0
///  - "toy_1d":           Omega=(-1,1), g=-(1+a)x+a/5, f=x^2+a(x-1/5)
/// Throws RegistryError for anything else.
ProblemSpec builtin(std::string_view id);

/// Hoelder exponent of the value function: 1 if lambda > L_g, lambda/L_g if
/// lambda < L_g, the override when they are equal (ConfigError if absent).
double holder_exponent(const ProblemSpec& spec);

struct ConstantEstimate {
    double lip_g = 0.0;
    double bound_g = 0.0;
    double lip_f = 0.0;
    double bound_f = 0.0;
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Relative slack allowed before an estimate counts as a violation.
inline constexpr double kConstantSlack = 1e-6;

/// Empirical maxima of the difference quotients and magnitudes over
/// `samples` random pairs in Omega x [0,1]. The pair sequence depends only on
/// `seed`, so a longer run sees a superset of a shorter one's samples.
ConstantEstimate estimate_constants(const ProblemSpec& spec, std::size_t samples,
                                    std::uint64_t seed = 20240611);

}  // namespace mhjb
