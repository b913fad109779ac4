// SPDX-License-Identifier: MIT
#pragma once

#include "mhjb/control.hpp"
#include "mhjb/fespace.hpp"
#include "mhjb/mesh.hpp"
#include "mhjb/problem.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace mhjb {

/// Closed-loop run of the explicit Euler dynamics y_{j+1} = y_j + h g(y_j, a_j).
struct Trajectory {
    std::vector<std::vector<double>> states;  // y_0 .. y_n
    std::vector<std::size_t> controls;        // level indices a_0 .. a_{n-1}
    std::size_t terminal_control = 0;         // a_n, chosen at the last step
    std::vector<double> control_values;       // I_h values of `controls`
    std::vector<double> stage_costs;          // h f(y_j, a_j)
    double discounted_total = 0.0;            // sum_j (1 - lambda h)^j h f(y_j, a_j)
    double discount_factor = 1.0;             // 1 - lambda h

    std::size_t steps() const noexcept { return controls.size(); }
};

/// Greedy feedback from a value function: at (y_j, a_j) pick
/// b in I_h(a_j) minimising (1 - lambda h) value(y_{j+1}, b) + h f(y_j, a_j)
/// (smallest b on ties), then commit a_{j+1} = b. Throws OutOfDomainError
/// naming the step if the state leaves omega_k.
Trajectory simulate(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid,
                    const GridFunction& value, std::span<const double> x0, std::size_t a0, double h,
                    std::size_t steps);

/// |total + (1 - lambda h)^n value(y_n, a_n) - value(y_0, a_0)|: the
/// telescoped Bellman identity along the trajectory.
double cost_consistency(const GridFunction& value, const Triangulation& tri, const Trajectory& trajectory);

/// CSV "step,x1,..,xnu,a,stage_cost,discounted_cumulative"; the last row is
/// the terminal state with its committed control and an empty stage cost.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, const ControlGrid& grid);

}  // namespace mhjb
