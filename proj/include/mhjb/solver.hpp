// SPDX-License-Identifier: MIT
/**
 * @file solver.hpp
 * @brief Fixed-point solvers for u = A(u) and the finite-horizon recursion.
 *
 * A is a (1 - lambda h)-contraction in the nodal max norm, so after a Picard
 * step with residual D = |u_n - u_{n-1}| the distance to the fixed point is
 * at most D (1 - lambda h) / (lambda h). Every solver reports that bound as
 * `guaranteed_error` for the value it returns.
 */
#pragma once

#include "mhjb/bellman.hpp"
#include "mhjb/error.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mhjb {

enum class Method { picard, howard };

struct StopRule {
    enum class Kind {
        h_squared,     ///< stop once |u_n - u_{n-1}| <= h^2
        target_bound,  ///< stop once guaranteed_error <= epsilon
    };
    Kind kind = Kind::h_squared;
    double epsilon = 0.0;
};

struct SolveOptions {
    double h = 0.0;
    Method method = Method::picard;
    StopRule stop;
    std::size_t max_iterations = 100000;
    /// Howard policy-evaluation tolerance; h^2/10 when unset.
    std::optional<double> eval_tolerance;
    std::size_t max_eval_sweeps = 10000000;
    std::size_t workers = 0;
    bool clamp = false;
    /// Initial iterate; zero function when unset.
    std::optional<GridFunction> warm_start;

    /// ConfigError on h outside (0, 1/lambda), zero max_iterations, bad epsilon.
    void validate(const ProblemSpec& spec) const;
};

struct SolveReport {
    Method method = Method::picard;
    std::size_t iterations = 0;
    std::vector<double> residual_history;
    double final_residual = 0.0;
    double guaranteed_error = 0.0;
    double wall_time_seconds = 0.0;
    bool converged = false;
    std::size_t evaluation_sweeps = 0;  // Howard inner sweeps
    std::string kernel;
};

struct SolveResult {
    GridFunction value;
    PolicyField policy;
    SolveReport report;
};

/// max_iterations reached; carries everything computed so far.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, SolveResult partial) : Error(what), partial_(std::move(partial)) {}
    const SolveResult& partial() const noexcept { return partial_; }

private:
    SolveResult partial_;
};

/// D (1 - lambda h) / (lambda h)
double guaranteed_error_bound(double residual, double discount, double h);

/// Picard iteration u_n = A(u_{n-1}) from the zero function.
SolveResult solve_picard(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid,
                         const SolveOptions& opts);

/// Howard policy iteration: iterative evaluation of the frozen policy,
/// greedy improvement, until the policy is stable and the Picard residual
/// meets the stop rule.
SolveResult solve_howard(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid,
                         const SolveOptions& opts);

/// Dispatches on opts.method.
SolveResult solve(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid, const SolveOptions& opts);

/// A^mu(0): the fully discrete finite-horizon value at n = 0 for T = mu h.
GridFunction solve_finite_horizon(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid, double h,
                                  std::size_t mu, std::size_t workers = 0);

std::string method_name(Method method);

}  // namespace mhjb
