// SPDX-License-Identifier: MIT
#include "mhjb/error.hpp"
#include "mhjb/policy.hpp"
#include "mhjb/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mhjb;

namespace {

struct Solved {
    ProblemSpec spec;
    Triangulation tri;
    ControlGrid grid;
    double h;
    GridFunction value;
};

Solved solved(ProblemSpec spec, double k, double h, double target = 0.0) {
    Triangulation tri = build_uniform(spec.domain, k);
    const ControlGrid grid = control_grid(h);
    SolveOptions o;
    o.h = h;
    if (target > 0.0) o.stop = {StopRule::Kind::target_bound, target};
    GridFunction value = solve(spec, tri, grid, o).value;
    return {std::move(spec), std::move(tri), grid, h, std::move(value)};
}

ProblemSpec still_problem() {
    ProblemSpec spec = builtin("toy_1d");
    spec.dynamics = [](std::span<const double>, double, std::span<double> v) { v[0] = 0.0; };
    return spec;
}

}  // namespace

TEST_CASE("no dynamics and no cost: the state stays put at zero cost") {
    ProblemSpec spec = builtin("zero_cost_2d");
    spec.dynamics = [](std::span<const double>, double, std::span<double> v) {
        v[0] = 0.0;
        v[1] = 0.0;
    };
    const Solved s = solved(spec, 0.2, 0.2);
    const std::vector<double> x0{0.2, -0.4};
    const Trajectory t = simulate(s.spec, s.tri, s.grid, s.value, x0, 1, s.h, 25);
    CHECK(t.steps() == 25);
    for (const auto& y : t.states) CHECK(y == x0);
    CHECK(t.discounted_total == 0.0);
    CHECK(cost_consistency(s.value, s.tri, t) == 0.0);
}

TEST_CASE("starting at the top level keeps the control at 1 and decays by 1 - 2h") {
    const Solved s = solved(builtin("paper_example_2d"), 0.1, 0.1);
    const std::vector<double> x0{0.5, 0.5};
    const Trajectory t = simulate(s.spec, s.tri, s.grid, s.value, x0, s.grid.top(), s.h, 60);
    for (double a : t.control_values) CHECK(a == 1.0);
    CHECK(t.terminal_control == s.grid.top());
    // y + h g(y, 1) rounds differently from (1 - 2h) y.
    for (std::size_t j = 0; j + 1 < t.states.size(); ++j) {
        for (std::size_t d = 0; d < 2; ++d) {
            CHECK(t.states[j + 1][d] == doctest::Approx((1.0 - 2.0 * s.h) * t.states[j][d]).epsilon(1e-14));
        }
    }
}

TEST_CASE("long horizon from (0.5, 0.5) at a = 1 approaches the closed-form 0.15") {
    const Solved s = solved(builtin("paper_example_2d"), 0.05, 0.05);
    const std::vector<double> x0{0.5, 0.5};
    const Trajectory t = simulate(s.spec, s.tri, s.grid, s.value, x0, s.grid.top(), s.h, 400);
    CHECK(std::abs(t.discounted_total - 0.15) <= 0.05);
}

TEST_CASE("controls never decrease") {
    const Solved s = solved(builtin("paper_example_2d"), 0.1, 0.1);
    for (const std::vector<double>& x0 : {std::vector<double>{0.5, 0.5}, {0.0, 0.0}, {-0.8, 0.3}, {0.9, -0.9}}) {
        for (std::size_t a0 = 0; a0 <= s.grid.top(); a0 += 3) {
            const Trajectory t = simulate(s.spec, s.tri, s.grid, s.value, x0, a0, s.h, 80);
            CHECK(t.controls.front() == a0);
            for (std::size_t j = 1; j < t.controls.size(); ++j) CHECK(t.controls[j] >= t.controls[j - 1]);
            CHECK(t.terminal_control >= t.controls.back());
        }
    }
}

TEST_CASE("greedy consistency gap at an exact nodal fixed point") {
    // With g == 0 every image is its own node, so no interpolation occurs.
    const Solved s = solved(still_problem(), 0.25, 0.25, 1e-13);
    const std::vector<double> x0{0.25};
    for (std::size_t a0 = 0; a0 <= s.grid.top(); ++a0) {
        const Trajectory t = simulate(s.spec, s.tri, s.grid, s.value, x0, a0, s.h, 40);
        CHECK(cost_consistency(s.value, s.tri, t) <= 1e-10);
    }
}

TEST_CASE("consistency gap from (0.5, 0.5) at a = 0 stays below 0.1") {
    const Solved s = solved(builtin("paper_example_2d"), 0.05, 0.05);
    const std::vector<double> x0{0.5, 0.5};
    const Trajectory t = simulate(s.spec, s.tri, s.grid, s.value, x0, 0, s.h, 200);
    CHECK(cost_consistency(s.value, s.tri, t) <= 0.1);
}

TEST_CASE("appending steps moves the total by at most the geometric tail") {
    const Solved s = solved(builtin("paper_example_2d"), 0.1, 0.1);
    const std::vector<double> x0{-0.6, 0.4};
    const Trajectory short_run = simulate(s.spec, s.tri, s.grid, s.value, x0, 0, s.h, 30);
    const Trajectory long_run = simulate(s.spec, s.tri, s.grid, s.value, x0, 0, s.h, 90);
    const double tail = s.spec.bound_f / s.spec.discount * std::pow(1.0 - s.h, 30.0);
    CHECK(std::abs(long_run.discounted_total - short_run.discounted_total) <= tail);
    for (std::size_t j = 0; j < 30; ++j) CHECK(long_run.controls[j] == short_run.controls[j]);
}

TEST_CASE("leaving omega_k reports the step") {
    ProblemSpec spec = builtin("zero_cost_2d");
    spec.dynamics = [](std::span<const double>, double, std::span<double> v) {
        v[0] = 1.0;
        v[1] = 0.0;
    };
    const Triangulation tri = build_uniform(spec.domain, 0.2);
    const ControlGrid grid = control_grid(0.2);
    const GridFunction zero(tri, grid);
    try {
        simulate(spec, tri, grid, zero, std::vector<double>{0.0, 0.0}, 0, 0.2, 10);
        FAIL("expected OutOfDomainError");
    } catch (const OutOfDomainError& e) {
        CHECK(std::string(e.what()).find("step 5") != std::string::npos);
    }
}

TEST_CASE("bad inputs are rejected") {
    const Solved s = solved(builtin("paper_example_2d"), 0.5, 0.5);
    CHECK_THROWS_AS(simulate(s.spec, s.tri, s.grid, s.value, std::vector<double>{0.0, 0.0}, 3, s.h, 1),
                    DimensionError);
    CHECK_THROWS_AS(simulate(s.spec, s.tri, s.grid, s.value, std::vector<double>{0.0}, 0, s.h, 1), DimensionError);
    CHECK_THROWS_AS(simulate(s.spec, s.tri, s.grid, s.value, std::vector<double>{0.9, 0.0}, 0, s.h, 1),
                    OutOfDomainError);
}

TEST_CASE("trajectory csv layout") {
    const Solved s = solved(builtin("paper_example_2d"), 0.5, 0.5);
    const Trajectory t = simulate(s.spec, s.tri, s.grid, s.value, std::vector<double>{0.5, 0.5}, 2, s.h, 2);
    std::ostringstream os;
    write_trajectory_csv(os, t, s.grid);
    CHECK(os.str() ==
          "step,x1,x2,a,stage_cost,discounted_cumulative\n"
          "0,0.5,0.5,1,-0.125,-0.125\n"
          "1,0,0,1,0.125,-0.0625\n"
          "2,0,0,1,,-0.0625\n");
}
