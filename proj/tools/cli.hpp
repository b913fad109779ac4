// SPDX-License-Identifier: MIT
/**
 * @file cli.hpp
 * @brief Run configuration and the command implementations behind `mhjb`.
 *
 * A run is described by one JSON object; the resolved form (every default
 * filled in, k snapped, h derived from the coupling) is embedded in each
 * report and can be fed back through --config to repeat the run.
 */
#pragma once

#include "mhjb/harness.hpp"
#include "mhjb/problem.hpp"
#include "mhjb/solver.hpp"

#include <json.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mhjb::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kNumericalFailure = 2,
    kIoError = 3,
};

/// Builtin id plus optional replacements for its declared constants.
struct ProblemConfig {
    std::string id = "paper_example_2d";
    std::optional<double> discount;
    std::optional<double> lip_g;
    std::optional<double> bound_g;
    std::optional<double> lip_f;
    std::optional<double> bound_f;
    std::optional<double> gamma;
};

struct SimulateConfig {
    std::vector<double> x0;
    double a0 = 0.0;
    std::size_t steps = 100;
};

struct SweepConfig {
    std::vector<double> k_list;
    bool reference = true;
};

struct BoundsConfig {
    double horizon = 0.0;
    std::optional<std::size_t> n;
};

struct MeshCheckConfig {
    std::optional<std::vector<double>> compact_lower;
    std::optional<std::vector<double>> compact_upper;
};

struct RunConfig {
    ProblemConfig problem;
    std::optional<double> k;
    std::optional<double> h;  // derived from k and the coupling when absent
    Coupling coupling;
    Method method = Method::picard;
    StopRule stop;
    std::size_t max_iterations = 100000;
    std::optional<double> eval_tolerance;
    bool clamp = false;
    bool snap_k = false;
    std::size_t workers = 0;
    std::string output_dir = ".";
    SimulateConfig simulate;
    SweepConfig sweep;
    std::size_t oracle_mu = 4;
    BoundsConfig bounds;
    MeshCheckConfig mesh_check;
};

/// Throws ConfigError on unknown keys, wrong types or bad enum values.
RunConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& config);

ProblemSpec resolve_problem(const ProblemConfig& config);
/// Applies snap_k and fills h from the coupling. ConfigError if k is missing.
void resolve_discretisation(RunConfig& config, const ProblemSpec& spec);

int cmd_solve(RunConfig config, std::ostream& out, std::ostream& err);
int cmd_simulate(RunConfig config, std::ostream& out, std::ostream& err);
int cmd_sweep(RunConfig config, std::ostream& out, std::ostream& err);
int cmd_check_mesh(RunConfig config, std::ostream& out, std::ostream& err);
int cmd_oracle_check(RunConfig config, std::ostream& out, std::ostream& err);
int cmd_bounds(RunConfig config, std::ostream& out, std::ostream& err);

/// Full command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mhjb::cli
