// SPDX-License-Identifier: MIT
#include "mhjb/policy.hpp"

#include "mhjb/bellman.hpp"
#include "mhjb/error.hpp"
#include "mhjb/io.hpp"
#include "mhjb/kernels/kernels.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace mhjb {

Trajectory simulate(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid,
                    const GridFunction& value, std::span<const double> x0, std::size_t a0, double h,
                    std::size_t steps) {
    require_contractive_step(spec, h);
    if (value.node_count() != tri.vertex_count() || value.level_count() != grid.level_count()) {
        throw DimensionError("value function does not match the mesh/control grid");
    }
    if (a0 > grid.top()) throw DimensionError("initial control index out of range");
    const std::size_t nu = tri.dimension();
    if (x0.size() != nu) throw DimensionError("initial state has the wrong dimension");
    tri.locate(x0);  // x0 must lie in omega_k

    Trajectory traj;
    traj.discount_factor = 1.0 - spec.discount * h;
    traj.states.emplace_back(x0.begin(), x0.end());
    const kernels::KernelTable& k = kernels::active();

    std::size_t level = a0;
    double weight = 1.0;
    std::vector<double> velocity(nu);
    std::vector<const double*> rows(nu + 1);
    for (std::size_t j = 0; j < steps; ++j) {
        const std::vector<double>& y = traj.states.back();
        const double a = grid.level(level);
        spec.dynamics(y, a, velocity);
        std::vector<double> next(nu);
        for (std::size_t d = 0; d < nu; ++d) next[d] = y[d] + h * velocity[d];

        BarycentricCoords bc;
        try {
            bc = tri.locate(next);
        } catch (const OutOfDomainError& e) {
            std::ostringstream os;
            os << "trajectory leaves omega_k at step " << j + 1 << ": " << e.what();
            throw OutOfDomainError(os.str(), e.axis(), e.coordinate());
        }
        const double stage = h * spec.cost(y, a);
        for (std::size_t v = 0; v <= nu; ++v) rows[v] = value.row(bc.vertices[v]).data();
        const kernels::ArgMin best = k.blend_argmin(rows.data(), bc.weights.data(), nu + 1, level,
                                                    grid.level_count(), traj.discount_factor, stage);

        traj.controls.push_back(level);
        traj.control_values.push_back(a);
        traj.stage_costs.push_back(stage);
        traj.discounted_total += weight * stage;
        weight *= traj.discount_factor;
        traj.states.push_back(std::move(next));
        level = best.index;
    }
    traj.terminal_control = level;
    return traj;
}

double cost_consistency(const GridFunction& value, const Triangulation& tri, const Trajectory& trajectory) {
    const std::size_t n = trajectory.steps();
    const std::size_t a0 = n > 0 ? trajectory.controls.front() : trajectory.terminal_control;
    const double start = evaluate(value, tri, trajectory.states.front(), a0);
    const double end = evaluate(value, tri, trajectory.states.back(), trajectory.terminal_control);
    const double tail = std::pow(trajectory.discount_factor, static_cast<double>(n)) * end;
    return std::abs(trajectory.discounted_total + tail - start);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, const ControlGrid& grid) {
    const std::size_t nu = trajectory.states.front().size();
    os << "step";
    for (std::size_t d = 0; d < nu; ++d) os << ",x" << d + 1;
    os << ",a,stage_cost,discounted_cumulative\n";
    double cumulative = 0.0;
    double weight = 1.0;
    for (std::size_t j = 0; j < trajectory.states.size(); ++j) {
        os << j;
        for (double c : trajectory.states[j]) os << ',' << format_double(c);
        if (j < trajectory.steps()) {
            cumulative += weight * trajectory.stage_costs[j];
            weight *= trajectory.discount_factor;
            os << ',' << format_double(trajectory.control_values[j]) << ','
               << format_double(trajectory.stage_costs[j]) << ',' << format_double(cumulative) << '\n';
        } else {
            os << ',' << format_double(grid.level(trajectory.terminal_control)) << ",," << format_double(cumulative)
               << '\n';
        }
    }
}

}  // namespace mhjb
