// SPDX-License-Identifier: MIT
#include "mhjb/solver.hpp"

#include "mhjb/io.hpp"
#include "mhjb/kernels/kernels.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace mhjb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool stop_reached(const StopRule& rule, double residual, double discount, double h) {
    if (rule.kind == StopRule::Kind::h_squared) return residual <= h * h;
    return guaranteed_error_bound(residual, discount, h) <= rule.epsilon;
}

GridFunction initial_iterate(const Triangulation& tri, const ControlGrid& grid, const SolveOptions& opts) {
    if (!opts.warm_start) return GridFunction(tri, grid);
    if (opts.warm_start->node_count() != tri.vertex_count() || opts.warm_start->level_count() != grid.level_count()) {
        throw DimensionError("warm start does not match the mesh/control grid");
    }
    return *opts.warm_start;
}

[[noreturn]] void fail_to_converge(const char* what, SolveResult partial) {
    std::ostringstream os;
    os << what << " did not meet the stop rule within " << partial.report.iterations
       << " iterations (last residual " << format_double(partial.report.final_residual) << ")";
    throw NonConvergenceError(os.str(), std::move(partial));
}

}  // namespace

std::string method_name(Method method) {
    return method == Method::picard ? "picard" : "howard";
}

void SolveOptions::validate(const ProblemSpec& spec) const {
    require_contractive_step(spec, h);
    if (max_iterations == 0) throw ConfigError("max_iterations must be at least 1");
    if (stop.kind == StopRule::Kind::target_bound && !(stop.epsilon > 0.0)) {
        throw ConfigError("target_bound stop rule needs a positive epsilon");
    }
    if (eval_tolerance && !(*eval_tolerance > 0.0)) throw ConfigError("eval_tolerance must be positive");
}

double guaranteed_error_bound(double residual, double discount, double h) {
    return residual * (1.0 - discount * h) / (discount * h);
}

SolveResult solve_picard(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid,
                         const SolveOptions& opts) {
    opts.validate(spec);
    const auto start = Clock::now();
    const BellmanOperator op(spec, tri, grid, opts.h, {opts.clamp, opts.workers});

    SolveResult result;
    result.report.method = Method::picard;
    result.report.kernel = std::string(kernels::active().name);
    GridFunction current = initial_iterate(tri, grid, opts);
    GridFunction next(tri, grid);
    for (std::size_t n = 1; n <= opts.max_iterations; ++n) {
        op.apply(current, next);
        const double residual = sup_norm_diff(next, current);
        std::swap(current, next);
        result.report.iterations = n;
        result.report.residual_history.push_back(residual);
        result.report.final_residual = residual;
        if (stop_reached(opts.stop, residual, spec.discount, opts.h)) {
            result.report.converged = true;
            break;
        }
    }
    result.report.guaranteed_error = guaranteed_error_bound(result.report.final_residual, spec.discount, opts.h);
    result.policy = op.greedy_policy(current);
    result.value = std::move(current);
    result.report.wall_time_seconds = seconds_since(start);
    if (!result.report.converged) fail_to_converge("Picard iteration", std::move(result));
    return result;
}

SolveResult solve_howard(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid,
                         const SolveOptions& opts) {
    opts.validate(spec);
    const auto start = Clock::now();
    const BellmanOperator op(spec, tri, grid, opts.h, {opts.clamp, opts.workers});

    SolveResult result;
    result.report.method = Method::howard;
    result.report.kernel = std::string(kernels::active().name);

    double tolerance = opts.eval_tolerance.value_or(opts.h * opts.h / 10.0);
    GridFunction w = initial_iterate(tri, grid, opts);
    GridFunction scratch(tri, grid);
    GridFunction improved(tri, grid);
    PolicyField policy = op.greedy_policy(w);
    PolicyField candidate(tri.vertex_count(), grid.level_count());

    for (std::size_t outer = 1; outer <= opts.max_iterations; ++outer) {
        // Policy evaluation: T_pi is a (1 - lambda h)-contraction.
        for (;;) {
            op.apply_policy(w, policy, scratch);
            const double change = sup_norm_diff(scratch, w);
            std::swap(w, scratch);
            if (++result.report.evaluation_sweeps > opts.max_eval_sweeps) {
                result.report.iterations = outer;
                result.value = w;
                result.policy = policy;
                result.report.wall_time_seconds = seconds_since(start);
                fail_to_converge("Howard policy evaluation", std::move(result));
            }
            if (change <= tolerance) break;
        }

        op.apply(w, improved, &candidate);
        const double residual = sup_norm_diff(improved, w);
        result.report.iterations = outer;
        result.report.residual_history.push_back(residual);
        result.report.final_residual = residual;

        const bool stable = candidate == policy;
        std::swap(w, improved);
        if (stable && stop_reached(opts.stop, residual, spec.discount, opts.h)) {
            result.report.converged = true;
            break;
        }
        if (stable) tolerance /= 10.0;
        policy = candidate;
    }

    // w is now A(previous iterate), so the Picard bound applies to it.
    result.report.guaranteed_error = guaranteed_error_bound(result.report.final_residual, spec.discount, opts.h);
    result.policy = op.greedy_policy(w);
    result.value = std::move(w);
    result.report.wall_time_seconds = seconds_since(start);
    if (!result.report.converged) fail_to_converge("Howard iteration", std::move(result));
    return result;
}

SolveResult solve(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid, const SolveOptions& opts) {
    return opts.method == Method::picard ? solve_picard(spec, tri, grid, opts) : solve_howard(spec, tri, grid, opts);
}

GridFunction solve_finite_horizon(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid, double h,
                                  std::size_t mu, std::size_t workers) {
    GridFunction current(tri, grid);
    if (mu == 0) {
        require_contractive_step(spec, h);
        return current;
    }
    const BellmanOperator op(spec, tri, grid, h, {false, workers});
    GridFunction next(tri, grid);
    for (std::size_t n = 0; n < mu; ++n) {
        op.apply(current, next);
        std::swap(current, next);
    }
    return current;
}

}  // namespace mhjb
