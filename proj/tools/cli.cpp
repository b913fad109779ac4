// SPDX-License-Identifier: MIT
#include "cli.hpp"

#include "mhjb/bellman.hpp"
#include "mhjb/error.hpp"
#include "mhjb/fespace.hpp"
#include "mhjb/io.hpp"
#include "mhjb/kernels/kernels.hpp"
#include "mhjb/mesh.hpp"
#include "mhjb/parallel.hpp"
#include "mhjb/policy.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace mhjb::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Output file could not be created or written.
class IoError : public Error {
public:
    using Error::Error;
};

void reject_unknown_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!keys.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T read(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("'" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

double read_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.at(key).is_number()) throw ConfigError("'" + std::string(key) + "' in " + where + " must be a number");
    return obj.at(key).get<double>();
}

std::size_t read_count(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::vector<double> read_vector(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_array()) throw ConfigError("'" + std::string(key) + "' in " + where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("'" + std::string(key) + "' in " + where + " must hold numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

void parse_problem(const json& v, ProblemConfig& p) {
    if (v.is_string()) {
        p.id = v.get<std::string>();
        return;
    }
    reject_unknown_keys(v, "problem", {"id", "discount", "lip_g", "bound_g", "lip_f", "bound_f", "gamma"});
    if (!v.contains("id")) throw ConfigError("problem object needs an 'id'");
    p.id = read<std::string>(v, "id", "problem");
    const std::pair<const char*, std::optional<double>*> fields[] = {
        {"discount", &p.discount}, {"lip_g", &p.lip_g},     {"bound_g", &p.bound_g},
        {"lip_f", &p.lip_f},       {"bound_f", &p.bound_f}, {"gamma", &p.gamma},
    };
    for (auto [key, slot] : fields) {
        if (v.contains(key)) *slot = read_number(v, key, "problem");
    }
}

Coupling parse_coupling(const json& v) {
    reject_unknown_keys(v, "coupling", {"kind", "c"});
    Coupling c;
    if (v.contains("kind")) {
        const auto kind = read<std::string>(v, "kind", "coupling");
        if (kind == "equal") {
            c.kind = Coupling::Kind::equal;
        } else if (kind == "two_thirds") {
            c.kind = Coupling::Kind::two_thirds;
        } else {
            throw ConfigError("coupling kind must be 'equal' or 'two_thirds'");
        }
    }
    if (v.contains("c")) c.c = read_number(v, "c", "coupling");
    if (!(c.c > 0.0)) throw ConfigError("coupling constant c must be positive");
    return c;
}

json coupling_json(const Coupling& c) {
    return {{"kind", c.kind == Coupling::Kind::equal ? "equal" : "two_thirds"}, {"c", c.c}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

RunConfig parse_config(const json& doc) {
    reject_unknown_keys(doc, "config",
                        {"problem", "k", "h", "coupling", "method", "stop_rule", "target_bound", "max_iterations",
                         "eval_tolerance", "clamp", "snap_k", "workers", "output_dir", "simulate", "sweep", "oracle",
                         "bounds", "mesh_check"});
    RunConfig c;
    const std::string top = "config";
    auto present = [&](const char* key) { return doc.contains(key) && !doc.at(key).is_null(); };
    if (present("problem")) parse_problem(doc.at("problem"), c.problem);
    if (present("k")) c.k = read_number(doc, "k", top);
    if (present("h")) c.h = read_number(doc, "h", top);
    if (present("coupling")) c.coupling = parse_coupling(doc.at("coupling"));
    if (present("method")) {
        const auto m = read<std::string>(doc, "method", top);
        if (m == "picard") {
            c.method = Method::picard;
        } else if (m == "howard") {
            c.method = Method::howard;
        } else {
            throw ConfigError("method must be 'picard' or 'howard'");
        }
    }
    if (present("stop_rule")) {
        const auto s = read<std::string>(doc, "stop_rule", top);
        if (s == "h_squared") {
            c.stop.kind = StopRule::Kind::h_squared;
        } else if (s == "target_bound") {
            c.stop.kind = StopRule::Kind::target_bound;
        } else {
            throw ConfigError("stop_rule must be 'h_squared' or 'target_bound'");
        }
    }
    if (present("target_bound")) c.stop.epsilon = read_number(doc, "target_bound", top);
    if (c.stop.kind == StopRule::Kind::target_bound && !(c.stop.epsilon > 0.0)) {
        throw ConfigError("stop_rule 'target_bound' needs a positive 'target_bound'");
    }
    if (present("max_iterations")) c.max_iterations = read_count(doc, "max_iterations", top);
    if (present("eval_tolerance")) c.eval_tolerance = read_number(doc, "eval_tolerance", top);
    if (present("clamp")) c.clamp = read<bool>(doc, "clamp", top);
    if (present("snap_k")) c.snap_k = read<bool>(doc, "snap_k", top);
    if (present("workers")) c.workers = read_count(doc, "workers", top);
    if (present("output_dir")) c.output_dir = read<std::string>(doc, "output_dir", top);

    if (present("simulate")) {
        const json& s = doc.at("simulate");
        reject_unknown_keys(s, "simulate", {"x0", "a0", "steps"});
        if (s.contains("x0")) c.simulate.x0 = read_vector(s, "x0", "simulate");
        if (s.contains("a0")) c.simulate.a0 = read_number(s, "a0", "simulate");
        if (s.contains("steps")) c.simulate.steps = read_count(s, "steps", "simulate");
    }
    if (present("sweep")) {
        const json& s = doc.at("sweep");
        reject_unknown_keys(s, "sweep", {"k_list", "reference", "coupling"});
        if (s.contains("k_list")) c.sweep.k_list = read_vector(s, "k_list", "sweep");
        if (s.contains("reference")) c.sweep.reference = read<bool>(s, "reference", "sweep");
        if (s.contains("coupling")) c.coupling = parse_coupling(s.at("coupling"));
    }
    if (present("oracle")) {
        const json& s = doc.at("oracle");
        reject_unknown_keys(s, "oracle", {"mu"});
        if (s.contains("mu")) c.oracle_mu = read_count(s, "mu", "oracle");
    }
    if (present("bounds")) {
        const json& s = doc.at("bounds");
        reject_unknown_keys(s, "bounds", {"T", "n"});
        if (s.contains("T")) c.bounds.horizon = read_number(s, "T", "bounds");
        if (s.contains("n") && !s.at("n").is_null()) c.bounds.n = read_count(s, "n", "bounds");
    }
    if (present("mesh_check")) {
        const json& s = doc.at("mesh_check");
        reject_unknown_keys(s, "mesh_check", {"compact_lower", "compact_upper"});
        if (s.contains("compact_lower") && !s.at("compact_lower").is_null()) {
            c.mesh_check.compact_lower = read_vector(s, "compact_lower", "mesh_check");
        }
        if (s.contains("compact_upper") && !s.at("compact_upper").is_null()) {
            c.mesh_check.compact_upper = read_vector(s, "compact_upper", "mesh_check");
        }
        if (c.mesh_check.compact_lower.has_value() != c.mesh_check.compact_upper.has_value()) {
            throw ConfigError("mesh_check needs both compact_lower and compact_upper");
        }
    }
    return c;
}

json to_json(const RunConfig& c) {
    json problem = {{"id", c.problem.id}};
    const std::pair<const char*, const std::optional<double>*> fields[] = {
        {"discount", &c.problem.discount}, {"lip_g", &c.problem.lip_g},     {"bound_g", &c.problem.bound_g},
        {"lip_f", &c.problem.lip_f},       {"bound_f", &c.problem.bound_f}, {"gamma", &c.problem.gamma},
    };
    for (auto [key, slot] : fields) {
        if (*slot) problem[key] = **slot;
    }
    json doc = {
        {"problem", problem},
        {"k", optional_json(c.k)},
        {"h", optional_json(c.h)},
        {"coupling", coupling_json(c.coupling)},
        {"method", method_name(c.method)},
        {"stop_rule", c.stop.kind == StopRule::Kind::h_squared ? "h_squared" : "target_bound"},
        {"target_bound", c.stop.epsilon},
        {"max_iterations", c.max_iterations},
        {"eval_tolerance", optional_json(c.eval_tolerance)},
        {"clamp", c.clamp},
        {"snap_k", c.snap_k},
        {"workers", c.workers},
        {"output_dir", c.output_dir},
        {"simulate", {{"x0", c.simulate.x0}, {"a0", c.simulate.a0}, {"steps", c.simulate.steps}}},
        {"sweep", {{"k_list", c.sweep.k_list}, {"reference", c.sweep.reference}}},
        {"oracle", {{"mu", c.oracle_mu}}},
        {"bounds", {{"T", c.bounds.horizon}, {"n", c.bounds.n ? json(*c.bounds.n) : json(nullptr)}}},
        {"mesh_check",
         {{"compact_lower", c.mesh_check.compact_lower ? json(*c.mesh_check.compact_lower) : json(nullptr)},
          {"compact_upper", c.mesh_check.compact_upper ? json(*c.mesh_check.compact_upper) : json(nullptr)}}},
    };
    return doc;
}

ProblemSpec resolve_problem(const ProblemConfig& config) {
    ProblemSpec spec = builtin(config.id);
    if (config.discount) spec.discount = *config.discount;
    if (config.lip_g) spec.lip_g = *config.lip_g;
    if (config.bound_g) spec.bound_g = *config.bound_g;
    if (config.lip_f) spec.lip_f = *config.lip_f;
    if (config.bound_f) spec.bound_f = *config.bound_f;
    if (config.gamma) spec.gamma_override = *config.gamma;
    spec.validate();
    return spec;
}

void resolve_discretisation(RunConfig& config, const ProblemSpec& spec) {
    if (!config.k) throw ConfigError("mesh size 'k' is required");
    if (config.snap_k) config.k = snap_mesh_size(spec.domain, *config.k);
    if (!config.h) config.h = coupled_step(config.coupling, *config.k);
}

namespace {

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

fs::path output_path(const RunConfig& config, const std::string& name) { return fs::path(config.output_dir) / name; }

void ensure_output_dir(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec || !fs::is_directory(config.output_dir)) {
        throw IoError("cannot create output directory '" + config.output_dir + "'");
    }
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    body(os);
    os.flush();
    if (!os) throw IoError("write to '" + path.string() + "' failed");
}

/// report.json = {header: volatile run facts, config: resolved config, result}.
class Report {
public:
    explicit Report(std::string command) : command_(std::move(command)), started_(utc_now()) {}

    void write(const RunConfig& config, const json& result, int exit_code) const {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_).count();
        json doc = {
            {"header",
             {{"command", command_},
              {"started_utc", started_},
              {"finished_utc", utc_now()},
              {"wall_time_seconds", wall},
              {"kernel", std::string(kernels::active().name)},
              {"workers_resolved", resolve_workers(config.workers)},
              {"exit_code", exit_code}}},
            {"config", to_json(config)},
            {"result", result},
        };
        write_file(output_path(config, "report.json"), [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    }

private:
    std::string command_;
    std::string started_;
    std::chrono::steady_clock::time_point clock_ = std::chrono::steady_clock::now();
};

json solve_report_json(const SolveReport& r) {
    return {
        {"method", method_name(r.method)},
        {"iterations", r.iterations},
        {"converged", r.converged},
        {"residual_history", r.residual_history},
        {"final_residual", r.final_residual},
        {"guaranteed_error", r.guaranteed_error},
        {"evaluation_sweeps", r.evaluation_sweeps},
    };
}

SolveOptions solve_options(const RunConfig& c) {
    SolveOptions o;
    o.h = *c.h;
    o.method = c.method;
    o.stop = c.stop;
    o.max_iterations = c.max_iterations;
    o.eval_tolerance = c.eval_tolerance;
    o.workers = c.workers;
    o.clamp = c.clamp;
    return o;
}

void write_policy_csv(std::ostream& os, const PolicyField& policy, const Triangulation& tri, const ControlGrid& grid) {
    os << "node";
    for (std::size_t d = 0; d < tri.dimension(); ++d) os << ",x" << d + 1;
    os << ",a,b\n";
    for (std::size_t i = 0; i < tri.vertex_count(); ++i) {
        for (std::size_t a = 0; a < grid.level_count(); ++a) {
            os << i;
            for (double x : tri.vertex(i)) os << ',' << format_double(x);
            os << ',' << format_double(grid.level(a)) << ',' << format_double(grid.level(policy.at(i, a))) << '\n';
        }
    }
}

void write_solution(const RunConfig& config, const SolveResult& result, const Triangulation& tri,
                    const ControlGrid& grid) {
    write_file(output_path(config, "values.csv"),
               [&](std::ostream& os) { write_nodal_csv(os, result.value, tri, grid); });
    write_file(output_path(config, "policy.csv"),
               [&](std::ostream& os) { write_policy_csv(os, result.policy, tri, grid); });
}

/// Runs `body` and maps library exceptions onto exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const NonConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
}

}  // namespace

int cmd_solve(RunConfig config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Report report("solve");
        const ProblemSpec spec = resolve_problem(config.problem);
        resolve_discretisation(config, spec);
        const Triangulation tri = build_uniform(spec.domain, *config.k);
        const ControlGrid grid = control_grid(*config.h);
        const SolveOptions opts = solve_options(config);
        opts.validate(spec);
        ensure_output_dir(config);

        SolveResult result;
        int code = kOk;
        try {
            result = solve(spec, tri, grid, opts);
        } catch (const NonConvergenceError& e) {
            err << "error: " << e.what() << " (partial results written)\n";
            result = e.partial();
            code = kNumericalFailure;
        }
        write_solution(config, result, tri, grid);
        json res = solve_report_json(result.report);
        res["nodes"] = tri.vertex_count();
        res["levels"] = grid.level_count();
        res["sup_norm"] = sup_norm(result.value);
        report.write(config, res, code);
        out << method_name(result.report.method) << ": " << result.report.iterations << " iterations, residual "
            << format_double(result.report.final_residual) << ", guaranteed error "
            << format_double(result.report.guaranteed_error) << '\n';
        return code;
    });
}

int cmd_simulate(RunConfig config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Report report("simulate");
        const ProblemSpec spec = resolve_problem(config.problem);
        resolve_discretisation(config, spec);
        if (config.simulate.x0.size() != spec.dimension()) {
            throw ConfigError("simulate.x0 must have one entry per state dimension");
        }
        const Triangulation tri = build_uniform(spec.domain, *config.k);
        const ControlGrid grid = control_grid(*config.h);
        const std::size_t a0 = grid.index_of(config.simulate.a0);
        tri.locate(config.simulate.x0);
        const SolveOptions opts = solve_options(config);
        opts.validate(spec);
        ensure_output_dir(config);

        SolveResult solved;
        try {
            solved = solve(spec, tri, grid, opts);
        } catch (const NonConvergenceError& e) {
            json res = {{"solve", solve_report_json(e.partial().report)}};
            report.write(config, res, kNumericalFailure);
            throw;
        }
        const Trajectory traj =
            simulate(spec, tri, grid, solved.value, config.simulate.x0, a0, *config.h, config.simulate.steps);
        write_file(output_path(config, "trajectory.csv"),
                   [&](std::ostream& os) { write_trajectory_csv(os, traj, grid); });
        const double gap = cost_consistency(solved.value, tri, traj);
        json res = {
            {"solve", solve_report_json(solved.report)},
            {"steps", traj.steps()},
            {"discounted_total", traj.discounted_total},
            {"terminal_control", grid.level(traj.terminal_control)},
            {"cost_consistency_gap", gap},
            {"value_at_x0", evaluate(solved.value, tri, config.simulate.x0, a0)},
        };
        report.write(config, res, kOk);
        out << "discounted total " << format_double(traj.discounted_total) << " over " << traj.steps()
            << " steps, consistency gap " << format_double(gap) << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_sweep(RunConfig config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Report report("sweep");
        const ProblemSpec spec = resolve_problem(config.problem);
        if (config.sweep.k_list.empty()) throw ConfigError("sweep.k_list must not be empty");
        std::vector<double> ks;
        for (double k : config.sweep.k_list) {
            const double kk = config.snap_k ? snap_mesh_size(spec.domain, k) : k;
            build_uniform(spec.domain, kk);  // rejects non-commensurate k before any solve
            ks.push_back(kk);
        }
        config.sweep.k_list = ks;
        config.snap_k = false;
        ensure_output_dir(config);

        SweepOptions so;
        so.coupling = config.coupling;
        so.method = config.method;
        so.stop = config.stop;
        so.max_iterations = config.max_iterations;
        so.workers = config.workers;
        so.reference = config.sweep.reference;
        const SweepResult sweep = run_sweep(spec, ks, so);
        write_file(output_path(config, "sweep.csv"), [&](std::ostream& os) { write_sweep_csv(os, sweep); });

        int code = kOk;
        json rows = json::array();
        auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
        for (const auto& row : sweep.rows) {
            rows.push_back({{"k", row.k},
                            {"h", row.h},
                            {"iterations", row.iterations},
                            {"error_ref", finite(row.error_ref)},
                            {"error_analytic", finite(row.error_analytic)},
                            {"envelope", finite(row.envelope)},
                            {"guaranteed_error", row.guaranteed_error},
                            {"failure", row.ok() ? json(nullptr) : json(row.failure)}});
            if (!row.ok()) {
                err << "error: row k=" << format_double(row.k) << ": " << row.failure << '\n';
                code = kNumericalFailure;
            }
        }
        json res = {{"rows", rows},
                    {"rate_ref", sweep.rate_ref ? json(*sweep.rate_ref) : json(nullptr)},
                    {"rate_analytic", sweep.rate_analytic ? json(*sweep.rate_analytic) : json(nullptr)}};
        report.write(config, res, code);
        for (const auto& row : sweep.rows) {
            out << "k=" << format_double(row.k) << " h=" << format_double(row.h);
            if (row.ok()) {
                out << " iterations=" << row.iterations << " error_ref=" << format_double(row.error_ref);
            } else {
                out << " failed";
            }
            out << '\n';
        }
        if (sweep.rate_ref) out << "rate_ref=" << format_double(*sweep.rate_ref) << '\n';
        if (sweep.rate_analytic) out << "rate_analytic=" << format_double(*sweep.rate_analytic) << '\n';
        return code;
    });
}

int cmd_check_mesh(RunConfig config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Report report("check-mesh");
        const ProblemSpec spec = resolve_problem(config.problem);
        resolve_discretisation(config, spec);
        const Triangulation tri = build_uniform(spec.domain, *config.k);
        const ControlGrid grid = control_grid(*config.h);
        std::optional<Box> compact;
        if (config.mesh_check.compact_lower) {
            compact = Box{*config.mesh_check.compact_lower, *config.mesh_check.compact_upper};
            if (compact->lower.size() != spec.dimension() || compact->upper.size() != spec.dimension()) {
                throw ConfigError("mesh_check compact corners must match the state dimension");
            }
        }
        ensure_output_dir(config);
        const MeshReport m = check_hypotheses(tri, spec, *config.h, grid, compact);
        write_file(output_path(config, "mesh_vertices.txt"), [&](std::ostream& os) { write_vertices(os, tri); });
        write_file(output_path(config, "mesh_simplices.txt"), [&](std::ostream& os) { write_simplices(os, tri); });

        const int code = m.all_ok() ? kOk : kNumericalFailure;
        json res = {
            {"vertices", tri.vertex_count()},
            {"simplices", tri.simplex_count()},
            {"hip1_ok", m.hip1_ok},
            {"max_diameter", m.max_diameter},
            {"min_diameter", m.min_diameter},
            {"hip2_ok", m.hip2_ok},
            {"hip2_h", m.hip2_h},
            {"hip2_levels", m.hip2_levels},
            {"hip2_violations", m.hip2_violations},
            {"hip2_first_violation", m.hip2_first_violation},
            {"hip3_margin", m.hip3_margin ? json(*m.hip3_margin) : json(nullptr)},
            {"chi1", m.chi1},
            {"hip4_ok", m.hip4_ok},
            {"k_over_d_max", m.k_over_d_max},
            {"hip5_ok", m.hip5_ok},
            {"all_ok", m.all_ok()},
        };
        report.write(config, res, code);
        auto flag = [](bool ok) { return ok ? "ok" : "FAILED"; };
        out << "HIP1 " << flag(m.hip1_ok) << " (max diameter " << format_double(m.max_diameter) << ")\n"
            << "HIP2 " << flag(m.hip2_ok) << " (" << m.hip2_violations << " images outside omega_k)\n";
        if (m.hip3_margin) out << "HIP3 margin " << format_double(*m.hip3_margin) << '\n';
        out << "HIP4 " << flag(m.hip4_ok) << " (chi1 " << format_double(m.chi1) << ")\n"
            << "HIP5 " << flag(m.hip5_ok) << " (k/d max " << format_double(m.k_over_d_max) << ")\n";
        if (!m.all_ok()) err << "error: mesh hypotheses violated\n";
        return code;
    });
}

int cmd_oracle_check(RunConfig config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Report report("oracle-check");
        const ProblemSpec spec = resolve_problem(config.problem);
        resolve_discretisation(config, spec);
        const Triangulation tri = build_uniform(spec.domain, *config.k);
        const ControlGrid grid = control_grid(*config.h);
        const std::size_t mu = config.oracle_mu;
        const GridFunction oracle = brute_force_oracle(spec, tri, grid, *config.h, mu);
        const GridFunction dp = solve_finite_horizon(spec, tri, grid, *config.h, mu, config.workers);
        ensure_output_dir(config);
        const double diff = sup_norm_diff(oracle, dp);
        constexpr double kTolerance = 1e-10;
        const bool ok = diff <= kTolerance;
        const int code = ok ? kOk : kNumericalFailure;
        write_file(output_path(config, "oracle_values.csv"),
                   [&](std::ostream& os) { write_nodal_csv(os, oracle, tri, grid); });
        json res = {{"mu", mu},
                    {"sequences_per_start", monotone_sequence_count(mu, grid.steps())},
                    {"max_abs_diff", diff},
                    {"tolerance", kTolerance},
                    {"equivalent", ok}};
        report.write(config, res, code);
        out << "oracle vs finite-horizon recursion, mu=" << mu << ": max |diff| = " << format_double(diff)
            << (ok ? " (equivalent)" : " (MISMATCH)") << '\n';
        if (!ok) err << "error: oracle mismatch\n";
        return code;
    });
}

int cmd_bounds(RunConfig config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Report report("bounds");
        const ProblemSpec spec = resolve_problem(config.problem);
        resolve_discretisation(config, spec);
        ensure_output_dir(config);
        const double T = config.bounds.horizon;
        if (!(T >= 0.0)) throw ConfigError("bounds.T must be non-negative");
        const BoundParams params = bound_params(spec, *config.h, *config.k, T);

        json res;
        auto line = [&](const std::string& key, double value) {
            res[key] = value;
            out << key << " = " << format_double(value) << '\n';
        };
        res["gamma"] = params.gamma ? json(*params.gamma) : json(nullptr);
        if (params.gamma) line("gamma", *params.gamma);
        try {
            line("envelope", theoretical_envelope(params));
        } catch (const ConfigError& e) {
            res["envelope"] = nullptr;
            out << "envelope undefined: " << e.what() << '\n';
        }
        line("phi_T", phi_T(spec, T));
        line("tail", tail_bound(spec, T));
        if (config.bounds.n) line("phi_n", phi_n(spec, *config.bounds.n, *config.h, T));
        report.write(config, res, kOk);
        return static_cast<int>(kOk);
    });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monotone-control HJB solver: semi-Lagrangian finite-element scheme", "mhjb"};
    app.require_subcommand(1);

    struct Flags {
        std::string config;
        std::string out;
        std::optional<std::size_t> workers;
        bool snap_k = false;
    } flags;

    using Command = int (*)(RunConfig, std::ostream&, std::ostream&);
    const std::pair<const char*, Command> commands[] = {
        {"solve", cmd_solve},           {"simulate", cmd_simulate},         {"sweep", cmd_sweep},
        {"check-mesh", cmd_check_mesh}, {"oracle-check", cmd_oracle_check}, {"bounds", cmd_bounds},
    };
    const char* descriptions[] = {
        "solve the fixed-point problem; writes values.csv, policy.csv",
        "solve, then run the greedy feedback; writes trajectory.csv",
        "convergence study over a list of k; writes sweep.csv",
        "check the triangulation hypotheses for (k, h)",
        "compare the brute-force oracle with the finite-horizon recursion",
        "evaluate the error-bound shapes",
    };
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].first, descriptions[i]);
        sub->add_option("--config", flags.config, "JSON run configuration")->required();
        sub->add_option("--out", flags.out, "output directory (overrides output_dir)");
        sub->add_option("--workers", flags.workers, "worker threads, 0 = all");
        sub->add_flag("--snap-k", flags.snap_k, "round k to the nearest commensurate mesh size");
        subs.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int rc = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return rc == 0 ? kOk : kConfigError;
    }

    RunConfig config;
    {
        std::ifstream in(flags.config, std::ios::binary);
        if (!in) {
            err << "error: cannot read config file '" << flags.config << "'\n";
            return kIoError;
        }
        try {
            config = parse_config(json::parse(in));
        } catch (const json::parse_error& e) {
            err << "error: config is not valid JSON: " << e.what() << '\n';
            return kConfigError;
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return kConfigError;
        }
    }
    if (!flags.out.empty()) config.output_dir = flags.out;
    if (flags.workers) config.workers = *flags.workers;
    if (flags.snap_k) config.snap_k = true;

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (subs[i]->parsed()) return commands[i].second(std::move(config), out, err);
    }
    return kConfigError;
}

}  // namespace mhjb::cli
