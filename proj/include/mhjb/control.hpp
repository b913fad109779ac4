// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>

namespace mhjb {

/// Equispaced control levels I_h = {i/m : i = 0..m}, m = 1/h.
///
/// Levels are always addressed by index; the floating value is derived on
/// demand so membership in I_h(a) never drifts.
class ControlGrid {
public:
    explicit ControlGrid(std::size_t steps);

    std::size_t steps() const noexcept { return steps_; }
    std::size_t level_count() const noexcept { return steps_ + 1; }
    std::size_t top() const noexcept { return steps_; }
    double h() const noexcept { return 1.0 / static_cast<double>(steps_); }
    double level(std::size_t index) const noexcept {
        return static_cast<double>(index) / static_cast<double>(steps_);
    }

    /// Index of the level equal to `a` within 1e-9; ConfigError otherwise.
    std::size_t index_of(double a) const;

    friend bool operator==(const ControlGrid&, const ControlGrid&) = default;

private:
    std::size_t steps_;
};

/// Half-open index range [begin, end).
struct IndexRange {
    std::size_t begin;
    std::size_t end;

    std::size_t size() const noexcept { return end - begin; }
};

/// I_h for time step h; ConfigError unless 1/h is an integer within 1e-9.
ControlGrid control_grid(double h);

/// Indices of I_h(a) = I_h intersected with [a, 1].
IndexRange admissible(const ControlGrid& grid, std::size_t a_index);

}  // namespace mhjb
