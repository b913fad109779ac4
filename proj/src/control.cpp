// SPDX-License-Identifier: MIT
#include "mhjb/control.hpp"

#include "mhjb/error.hpp"

#include <cmath>
#include <sstream>

namespace mhjb {

ControlGrid::ControlGrid(std::size_t steps) : steps_(steps) {
    if (steps_ == 0) throw ConfigError("control grid needs at least one step (h <= 1)");
}

std::size_t ControlGrid::index_of(double a) const {
    const double scaled = a * static_cast<double>(steps_);
    const double nearest = std::round(scaled);
    if (!(a >= -1e-9 && a <= 1.0 + 1e-9) || std::abs(scaled - nearest) > 1e-9 * static_cast<double>(steps_)) {
        std::ostringstream os;
        os.precision(17);
        os << "control value " << a << " is not a level of I_h with h = 1/" << steps_;
        throw ConfigError(os.str());
    }
    return static_cast<std::size_t>(nearest);
}

ControlGrid control_grid(double h) {
    if (!(h > 0.0) || !(h <= 1.0)) {
        throw ConfigError("time step h must lie in (0, 1]");
    }
    const double inverse = 1.0 / h;
    const double steps = std::round(inverse);
    if (std::abs(inverse - steps) > 1e-9 * steps) {
        std::ostringstream os;
        os.precision(17);
        os << "1/h must be an integer (got h = " << h << ", 1/h = " << inverse << ")";
        throw ConfigError(os.str());
    }
    return ControlGrid(static_cast<std::size_t>(steps));
}

IndexRange admissible(const ControlGrid& grid, std::size_t a_index) {
    if (a_index > grid.top()) {
        throw DimensionError("control index out of range");
    }
    return {a_index, grid.level_count()};
}

}  // namespace mhjb
