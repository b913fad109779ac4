// SPDX-License-Identifier: MIT
#include "mhjb/error.hpp"
#include "mhjb/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace mhjb;

namespace {

SolveOptions options(double h, Method method = Method::picard) {
    SolveOptions o;
    o.h = h;
    o.method = method;
    return o;
}

}  // namespace

TEST_CASE("k = h = 0.5 stops after one Picard iteration") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const Triangulation tri = build_uniform(spec.domain, 0.5);
    const SolveResult r = solve_picard(spec, tri, control_grid(0.5), options(0.5));
    CHECK(r.report.iterations == 1);
    CHECK(r.report.converged);
    CHECK(r.report.final_residual <= 0.25);
    // Residual 0.125 = max h|f| on the 3 x 3 grid; bound D (1 - h)/h = D.
    CHECK(r.report.final_residual == 0.125);
    CHECK(r.report.guaranteed_error == 0.125);
}

TEST_CASE("k = h = 0.1 takes about ten iterations") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const Triangulation tri = build_uniform(spec.domain, 0.1);
    const SolveResult r = solve_picard(spec, tri, control_grid(0.1), options(0.1));
    CHECK(r.report.iterations >= 5);
    CHECK(r.report.iterations <= 20);
    CHECK(r.report.final_residual <= 0.01);
}

TEST_CASE("zero cost converges immediately to zero") {
    const ProblemSpec spec = builtin("zero_cost_2d");
    const Triangulation tri = build_uniform(spec.domain, 0.2);
    for (Method m : {Method::picard, Method::howard}) {
        const SolveResult r = solve(spec, tri, control_grid(0.2), options(0.2, m));
        CHECK(r.report.iterations == 1);
        CHECK(r.report.final_residual == 0.0);
        CHECK(sup_norm(r.value) == 0.0);
    }
}

TEST_CASE("residuals decay geometrically and the result is a near fixed point") {
    const ProblemSpec spec = builtin("paper_example_2d");
    for (double h : {0.5, 0.2, 0.1}) {
        const Triangulation tri = build_uniform(spec.domain, h);
        const ControlGrid grid = control_grid(h);
        SolveOptions o = options(h);
        o.stop = {StopRule::Kind::target_bound, 1e-6};
        const SolveResult r = solve_picard(spec, tri, grid, o);
        const auto& hist = r.report.residual_history;
        for (std::size_t n = 1; n < hist.size(); ++n) CHECK(hist[n] <= (1.0 - h) * hist[n - 1] + 1e-12);
        CHECK(r.report.guaranteed_error <= 1e-6);

        const auto [next, policy] = apply(r.value, spec, tri, grid, h);
        CHECK(sup_norm_diff(next, r.value) <= r.report.final_residual);
        CHECK(sup_norm(r.value) <= spec.bound_f / spec.discount + r.report.guaranteed_error);
        CHECK(policy == r.policy);
    }
}

TEST_CASE("guaranteed error formula") {
    CHECK(guaranteed_error_bound(0.01, 1.0, 0.1) == doctest::Approx(0.09));
    CHECK(guaranteed_error_bound(0.0, 1.0, 0.1) == 0.0);
}

TEST_CASE("Howard and Picard agree within their guaranteed errors") {
    const ProblemSpec spec = builtin("paper_example_2d");
    for (double h : {0.2, 0.1}) {
        const Triangulation tri = build_uniform(spec.domain, h);
        const ControlGrid grid = control_grid(h);
        const SolveResult p = solve(spec, tri, grid, options(h));
        const SolveResult q = solve(spec, tri, grid, options(h, Method::howard));
        CHECK(q.report.converged);
        CHECK(q.policy.admissible());
        CHECK(sup_norm_diff(p.value, q.value) <= p.report.guaranteed_error + q.report.guaranteed_error);
        CHECK(sup_norm_diff(p.value, q.value) <= 2.0 * std::max(p.report.guaranteed_error, q.report.guaranteed_error));
        const auto [next, policy] = apply(q.value, spec, tri, grid, h);
        CHECK(sup_norm_diff(next, q.value) <= q.report.final_residual);
    }
}

TEST_CASE("tight target bound drives both methods to the same fixed point") {
    const ProblemSpec spec = builtin("toy_1d");
    const Triangulation tri = build_uniform(spec.domain, 0.05);
    const ControlGrid grid = control_grid(0.1);
    SolveOptions o = options(0.1);
    o.stop = {StopRule::Kind::target_bound, 1e-9};
    const SolveResult p = solve(spec, tri, grid, o);
    o.method = Method::howard;
    const SolveResult q = solve(spec, tri, grid, o);
    CHECK(sup_norm_diff(p.value, q.value) <= 2e-9);
    CHECK(q.report.iterations < p.report.iterations);
}

TEST_CASE("non-convergence carries the partial result") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const Triangulation tri = build_uniform(spec.domain, 0.1);
    SolveOptions o = options(0.1);
    o.max_iterations = 3;
    try {
        solve_picard(spec, tri, control_grid(0.1), o);
        FAIL("expected NonConvergenceError");
    } catch (const NonConvergenceError& e) {
        CHECK(e.partial().report.iterations == 3);
        CHECK_FALSE(e.partial().report.converged);
        CHECK(e.partial().report.residual_history.size() == 3);
        CHECK(e.partial().value.node_count() == tri.vertex_count());
    }
}

TEST_CASE("option validation") {
    const ProblemSpec spec = builtin("paper_example_2d");
    SolveOptions o = options(1.0);
    CHECK_THROWS_AS(o.validate(spec), ConfigError);
    o = options(0.1);
    o.max_iterations = 0;
    CHECK_THROWS_AS(o.validate(spec), ConfigError);
    o = options(0.1);
    o.stop = {StopRule::Kind::target_bound, 0.0};
    CHECK_THROWS_AS(o.validate(spec), ConfigError);
}

TEST_CASE("warm start at the fixed point converges in one step") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const Triangulation tri = build_uniform(spec.domain, 0.2);
    const ControlGrid grid = control_grid(0.2);
    const SolveResult cold = solve(spec, tri, grid, options(0.2));
    SolveOptions o = options(0.2);
    o.warm_start = cold.value;
    const SolveResult warm = solve(spec, tri, grid, o);
    CHECK(warm.report.iterations == 1);
    o.warm_start = GridFunction(3, 2);
    CHECK_THROWS_AS(solve(spec, tri, grid, o), DimensionError);
}

TEST_CASE("finite horizon: mu = 0 is zero, mu = 1 is h f") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const Triangulation tri = build_uniform(spec.domain, 0.2);
    const ControlGrid grid = control_grid(0.2);
    CHECK(sup_norm(solve_finite_horizon(spec, tri, grid, 0.2, 0)) == 0.0);
    const GridFunction one = solve_finite_horizon(spec, tri, grid, 0.2, 1);
    for (std::size_t i = 0; i < tri.vertex_count(); ++i) {
        for (std::size_t a = 0; a < grid.level_count(); ++a) {
            CHECK(one.at(i, a) == 0.2 * spec.cost(tri.vertex(i), grid.level(a)));
        }
    }
}

TEST_CASE("finite horizon tail bounds") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const double h = 0.1;
    const Triangulation tri = build_uniform(spec.domain, h);
    const ControlGrid grid = control_grid(h);
    const SolveResult star = solve(spec, tri, grid, options(h));
    for (std::size_t mu : {10u, 20u, 40u}) {
        const GridFunction u = solve_finite_horizon(spec, tri, grid, h, mu);
        const double gap = sup_norm_diff(u, star.value);
        const double T = static_cast<double>(mu) * h;
        CHECK(gap <= std::pow(1.0 - h, static_cast<double>(mu)) * spec.bound_f + star.report.guaranteed_error);
        CHECK(gap <= spec.bound_f * std::exp(-T) + star.report.guaranteed_error);
    }
}

TEST_CASE("worker count does not change the solution") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const Triangulation tri = build_uniform(spec.domain, 0.05);
    const ControlGrid grid = control_grid(0.05);
    SolveOptions o = options(0.05);
    o.workers = 1;
    const SolveResult one = solve(spec, tri, grid, o);
    for (std::size_t w : {0u, 2u, 4u}) {
        o.workers = w;
        const SolveResult many = solve(spec, tri, grid, o);
        CHECK(many.value == one.value);
        CHECK(many.report.residual_history == one.report.residual_history);
    }
}
