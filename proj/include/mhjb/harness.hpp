// SPDX-License-Identifier: MIT
/**
 * @file harness.hpp
 * @brief Error-bound shapes, convergence sweeps, rate fitting, brute force.
 *
 * The bounds of the convergence theory carry existential constants; only
 * their shapes are computed here:
 *
 *   envelope(h, k) = (h + k / sqrt(h))^gamma
 *   phi(T)         = 1 | e^{(L_g - lambda) T} | T        (L_g <, >, = lambda)
 *   phi(n)         = e^{L_g n h} | e^{(L_g - lambda) T + lambda n h} | T e^{L_g n h}
 *   tail(T)        = (M_f / lambda) e^{-lambda T}
 */
#pragma once

#include "mhjb/fespace.hpp"
#include "mhjb/mesh.hpp"
#include "mhjb/problem.hpp"
#include "mhjb/solver.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mhjb {

struct BoundParams {
    std::optional<double> gamma;  // required only when L_g == lambda
    double lip_g = 0.0;
    double discount = 1.0;
    double bound_f = 0.0;
    double horizon = 0.0;  // T
    double h = 0.0;
    double k = 0.0;
};

/// Parameters derived from a problem; gamma comes from holder_exponent
/// when it is defined.
BoundParams bound_params(const ProblemSpec& spec, double h, double k, double horizon = 0.0);

/// (h + k/sqrt(h))^gamma with the exponent picked by the sign of L_g - lambda.
/// ConfigError in the equality case without gamma, or for h <= 0 / k < 0.
double theoretical_envelope(const BoundParams& params);

double phi_T(const ProblemSpec& spec, double horizon);
/// Requires 0 <= n h <= T.
double phi_n(const ProblemSpec& spec, std::size_t n, double h, double horizon);
double tail_bound(const ProblemSpec& spec, double horizon);

struct Coupling {
    enum class Kind {
        equal,       ///< h = c k
        two_thirds,  ///< h = c k^{2/3}
    };
    Kind kind = Kind::equal;
    double c = 1.0;

    std::string tag() const;
};

/// Time step for mesh size k, snapped to 1/round(1/h) so that I_h exists.
double coupled_step(const Coupling& coupling, double k);

struct SweepOptions {
    Coupling coupling;
    Method method = Method::picard;
    StopRule stop;
    std::size_t max_iterations = 100000;
    std::size_t workers = 0;
    bool snap_k = false;
    /// Compare against the finest successful row (otherwise error_ref is NaN).
    bool reference = true;
};

struct SweepRow {
    double k = 0.0;
    double h = 0.0;
    std::string coupling;
    std::size_t iterations = 0;
    double error_ref = 0.0;
    double error_analytic = 0.0;  // NaN when the problem has no closed-form slice
    double envelope = 0.0;
    double guaranteed_error = 0.0;
    std::string failure;  // non-empty when this row's solve failed

    bool ok() const noexcept { return failure.empty(); }
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by decreasing k
    std::optional<double> rate_ref;
    std::optional<double> rate_analytic;
};

/// Solves on every k (coarse to fine), records iteration counts and the
/// errors against the finest solution (at shared nodes and shared control
/// levels) and against the closed-form a = 1 slice. A failing row is
/// recorded and the sweep continues.
SweepResult run_sweep(const ProblemSpec& spec, const std::vector<double>& k_list, const SweepOptions& options);

/// Least-squares slope of log(error) against log(k), skipping rows whose
/// error is not positive and finite. Error if fewer than two remain.
double fit_rate(std::span<const double> ks, std::span<const double> errors);
double fit_rate(const std::vector<SweepRow>& rows);

/// max over nodes of |value(x^i, top) - u(x^i, 1)|; nullopt if the problem
/// has no closed-form top slice.
std::optional<double> analytic_slice_error(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid,
                                           const GridFunction& value);

/// Number of nondecreasing sequences of length mu over m+1 levels, C(mu+m, m).
double monotone_sequence_count(std::size_t mu, std::size_t steps);

inline constexpr double kOracleSequenceBudget = 1e6;
inline constexpr double kOracleWorkBudget = 2e9;

/// Exhaustive finite-horizon oracle. For every (node, starting level) it
/// expands the interpolation tree mu levels deep (the running state
/// x + h g(x, a) splits onto the vertices of its simplex) and, at every
/// branch, tries every admissible next control, i.e. all nondecreasing
/// control sequences along every branch. Nothing is tabulated, so it shares
/// no code with the Bellman sweep. BudgetError above the enumeration budget.
GridFunction brute_force_oracle(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid, double h,
                                std::size_t mu);

/// CSV "k,h,coupling,iterations,error_ref,error_analytic,envelope" plus a
/// footer row "rate,,,,<p_ref>,<p_analytic>,".
void write_sweep_csv(std::ostream& os, const SweepResult& result);

}  // namespace mhjb
