// SPDX-License-Identifier: MIT
#include "mhjb/harness.hpp"

#include "mhjb/error.hpp"
#include "mhjb/io.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

namespace mhjb {

namespace {

// -1, 0, +1 for L_g <, ==, > lambda.
int growth_regime(double lip_g, double discount) {
    const double scale = std::max(std::abs(lip_g), std::abs(discount));
    if (std::abs(lip_g - discount) <= 1e-12 * scale) return 0;
    return lip_g < discount ? -1 : 1;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

BoundParams bound_params(const ProblemSpec& spec, double h, double k, double horizon) {
    BoundParams p;
    p.lip_g = spec.lip_g;
    p.discount = spec.discount;
    p.bound_f = spec.bound_f;
    p.horizon = horizon;
    p.h = h;
    p.k = k;
    if (growth_regime(spec.lip_g, spec.discount) != 0 || spec.gamma_override) p.gamma = holder_exponent(spec);
    return p;
}

double theoretical_envelope(const BoundParams& params) {
    if (!(params.h > 0.0) || !(params.k >= 0.0)) throw ConfigError("envelope needs h > 0 and k >= 0");
    double exponent = 1.0;
    switch (growth_regime(params.lip_g, params.discount)) {
        case -1: exponent = 1.0; break;
        case 1: exponent = params.discount / params.lip_g; break;
        default:
            if (!params.gamma) throw ConfigError("L_g equals lambda: the envelope needs a configured gamma");
            exponent = *params.gamma;
    }
    return std::pow(params.h + params.k / std::sqrt(params.h), exponent);
}

double phi_T(const ProblemSpec& spec, double horizon) {
    switch (growth_regime(spec.lip_g, spec.discount)) {
        case -1: return 1.0;
        case 1: return std::exp((spec.lip_g - spec.discount) * horizon);
        default: return horizon;
    }
}

double phi_n(const ProblemSpec& spec, std::size_t n, double h, double horizon) {
    const double t = static_cast<double>(n) * h;
    if (!(horizon >= 0.0) || t > horizon * (1.0 + 1e-12) + 1e-15) throw ConfigError("phi_n needs 0 <= n h <= T");
    switch (growth_regime(spec.lip_g, spec.discount)) {
        case -1: return std::exp(spec.lip_g * t);
        case 1: return std::exp((spec.lip_g - spec.discount) * horizon + spec.discount * t);
        default: return horizon * std::exp(spec.lip_g * t);
    }
}

double tail_bound(const ProblemSpec& spec, double horizon) {
    return spec.bound_f / spec.discount * std::exp(-spec.discount * horizon);
}

std::string Coupling::tag() const {
    std::ostringstream os;
    const bool unit = c == 1.0;
    if (kind == Kind::equal) {
        os << (unit ? "h=k" : "h=" + format_double(c) + "*k");
    } else {
        os << (unit ? "h=k^(2/3)" : "h=" + format_double(c) + "*k^(2/3)");
    }
    return os.str();
}

double coupled_step(const Coupling& coupling, double k) {
    if (!(k > 0.0) || !(coupling.c > 0.0)) throw ConfigError("coupling needs k > 0 and c > 0");
    const double raw = coupling.kind == Coupling::Kind::equal ? coupling.c * k : coupling.c * std::cbrt(k * k);
    const double steps = std::max(1.0, std::round(1.0 / raw));
    return 1.0 / steps;
}

std::optional<double> analytic_slice_error(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid,
                                           const GridFunction& value) {
    if (!spec.top_level_value) return std::nullopt;
    double worst = 0.0;
    for (std::size_t i = 0; i < tri.vertex_count(); ++i) {
        worst = std::max(worst, std::abs(value.at(i, grid.top()) - spec.top_level_value(tri.vertex(i))));
    }
    return worst;
}

namespace {

struct SolvedRow {
    Triangulation tri;
    ControlGrid grid;
    GridFunction value;
};

// Sup distance between a coarse solution and the reference, over coarse
// nodes inside the reference omega_k and control levels present in both grids.
double reference_distance(const SolvedRow& coarse, const SolvedRow& fine) {
    const std::size_t mc = coarse.grid.steps();
    const std::size_t mf = fine.grid.steps();
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.tri.vertex_count(); ++i) {
        BarycentricCoords where;
        try {
            where = fine.tri.locate(coarse.tri.vertex(i));
        } catch (const OutOfDomainError&) {
            continue;
        }
        for (std::size_t l = 0; l <= mc; ++l) {
            if ((l * mf) % mc != 0) continue;
            const std::size_t lf = l * mf / mc;
            worst = std::max(worst, std::abs(coarse.value.at(i, l) - evaluate(fine.value, where, lf)));
        }
    }
    return worst;
}

}  // namespace

SweepResult run_sweep(const ProblemSpec& spec, const std::vector<double>& k_list, const SweepOptions& options) {
    std::vector<double> ks = k_list;
    std::sort(ks.begin(), ks.end(), std::greater<>());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    SweepResult result;
    std::vector<std::unique_ptr<SolvedRow>> solved;
    for (double k : ks) {
        SweepRow row;
        row.k = k;
        row.coupling = options.coupling.tag();
        row.error_ref = kNaN;
        row.error_analytic = kNaN;
        row.envelope = kNaN;
        std::unique_ptr<SolvedRow> data;
        try {
            if (options.snap_k) row.k = snap_mesh_size(spec.domain, k);
            row.h = coupled_step(options.coupling, row.k);
            Triangulation tri = build_uniform(spec.domain, row.k);
            ControlGrid grid = control_grid(row.h);
            SolveOptions so;
            so.h = row.h;
            so.method = options.method;
            so.stop = options.stop;
            so.max_iterations = options.max_iterations;
            so.workers = options.workers;
            SolveResult sr = solve(spec, tri, grid, so);
            row.iterations = sr.report.iterations;
            row.guaranteed_error = sr.report.guaranteed_error;
            if (auto e = analytic_slice_error(spec, tri, grid, sr.value)) row.error_analytic = *e;
            try {
                row.envelope = theoretical_envelope(bound_params(spec, row.h, row.k));
            } catch (const ConfigError&) {
                row.envelope = kNaN;
            }
            data = std::make_unique<SolvedRow>(SolvedRow{std::move(tri), grid, std::move(sr.value)});
        } catch (const Error& e) {
            row.failure = e.what();
        }
        result.rows.push_back(std::move(row));
        solved.push_back(std::move(data));
    }

    if (options.reference) {
        const SolvedRow* reference = nullptr;
        for (const auto& s : solved) {
            if (s) reference = s.get();
        }
        for (std::size_t r = 0; r < result.rows.size(); ++r) {
            if (solved[r] && reference) result.rows[r].error_ref = reference_distance(*solved[r], *reference);
        }
    }

    std::vector<double> k_ok, ref_ok, analytic_ok;
    for (const auto& row : result.rows) {
        if (!row.ok()) continue;
        k_ok.push_back(row.k);
        ref_ok.push_back(row.error_ref);
        analytic_ok.push_back(row.error_analytic);
    }
    try {
        result.rate_ref = fit_rate(k_ok, ref_ok);
    } catch (const Error&) {
    }
    try {
        result.rate_analytic = fit_rate(k_ok, analytic_ok);
    } catch (const Error&) {
    }
    return result;
}

double fit_rate(std::span<const double> ks, std::span<const double> errors) {
    if (ks.size() != errors.size()) throw DimensionError("fit_rate: k and error lists differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] > 0.0 && errors[i] > 0.0 && std::isfinite(errors[i])) {
            lx.push_back(std::log(ks[i]));
            ly.push_back(std::log(errors[i]));
        }
    }
    if (lx.size() < 2) throw Error("fit_rate needs at least two rows with positive errors");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw Error("fit_rate needs at least two distinct k values");
    return sxy / sxx;
}

double fit_rate(const std::vector<SweepRow>& rows) {
    std::vector<double> ks, errors;
    for (const auto& row : rows) {
        if (!row.ok()) continue;
        ks.push_back(row.k);
        errors.push_back(row.error_ref);
    }
    return fit_rate(ks, errors);
}

double monotone_sequence_count(std::size_t mu, std::size_t steps) {
    // C(mu + m, m) computed incrementally in floating point (exact for the
    // magnitudes the budget admits).
    double c = 1.0;
    for (std::size_t i = 1; i <= steps; ++i) c = c * static_cast<double>(mu + i) / static_cast<double>(i);
    return std::round(c);
}

namespace {

class TreeOracle {
public:
    TreeOracle(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid, double h)
        : grid_(grid), levels_(grid.level_count()), scale_(1.0 - spec.discount * h) {
        const std::size_t nu = tri.dimension();
        images_.resize(tri.vertex_count() * levels_);
        costs_.resize(tri.vertex_count() * levels_);
        std::vector<double> velocity(nu), image(nu);
        for (std::size_t i = 0; i < tri.vertex_count(); ++i) {
            const auto x = tri.vertex(i);
            for (std::size_t a = 0; a < levels_; ++a) {
                spec.dynamics(x, grid.level(a), velocity);
                for (std::size_t d = 0; d < nu; ++d) image[d] = x[d] + h * velocity[d];
                images_[i * levels_ + a] = tri.locate(image);
                costs_[i * levels_ + a] = h * spec.cost(x, grid.level(a));
            }
        }
    }

    // Optimal cost of `remaining` steps from vertex `node` with current level `a`.
    double value(std::size_t node, std::size_t a, std::size_t remaining) const {
        if (remaining == 0) return 0.0;
        const BarycentricCoords& where = images_[node * levels_ + a];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t b = a; b < levels_; ++b) {
            double acc = where.weights[0] * branch(where, 0, b, remaining);
            for (std::size_t j = 1; j < where.vertices.size(); ++j) {
                acc = acc + where.weights[j] * branch(where, j, b, remaining);
            }
            const double cand = scale_ * acc + costs_[node * levels_ + a];
            if (cand < best) best = cand;
        }
        return best;
    }

private:
    double branch(const BarycentricCoords& where, std::size_t j, std::size_t b, std::size_t remaining) const {
        // A zero-weight vertex contributes nothing; skip its subtree.
        if (where.weights[j] == 0.0) return 0.0;
        return value(where.vertices[j], b, remaining - 1);
    }

    const ControlGrid& grid_;
    std::size_t levels_;
    double scale_;
    std::vector<BarycentricCoords> images_;
    std::vector<double> costs_;
};

}  // namespace

GridFunction brute_force_oracle(const ProblemSpec& spec, const Triangulation& tri, const ControlGrid& grid, double h,
                                std::size_t mu) {
    require_contractive_step(spec, h);
    const double sequences = monotone_sequence_count(mu, grid.steps());
    if (sequences > kOracleSequenceBudget) {
        std::ostringstream os;
        os << "oracle refused: " << format_double(sequences) << " monotone control sequences exceed the budget of "
           << format_double(kOracleSequenceBudget);
        throw BudgetError(os.str());
    }
    const double branching = static_cast<double>(grid.level_count() * (tri.dimension() + 1));
    const double work = static_cast<double>(tri.vertex_count() * grid.level_count()) *
                        std::pow(branching, static_cast<double>(mu));
    if (work > kOracleWorkBudget) {
        std::ostringstream os;
        os << "oracle refused: tree expansion of about " << format_double(work) << " leaves exceeds the budget of "
           << format_double(kOracleWorkBudget);
        throw BudgetError(os.str());
    }

    GridFunction out(tri, grid);
    if (mu == 0) return out;
    const TreeOracle oracle(spec, tri, grid, h);
    for (std::size_t i = 0; i < tri.vertex_count(); ++i) {
        for (std::size_t a = 0; a < grid.level_count(); ++a) out.at(i, a) = oracle.value(i, a, mu);
    }
    return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
    os << "k,h,coupling,iterations,error_ref,error_analytic,envelope\n";
    for (const auto& row : result.rows) {
        os << format_double(row.k) << ',' << format_double(row.h) << ',' << row.coupling << ',';
        if (row.ok()) {
            os << row.iterations << ',' << num(row.error_ref) << ',' << num(row.error_analytic) << ','
               << num(row.envelope);
        } else {
            os << ",,,";
        }
        os << '\n';
    }
    os << "rate,,,," << (result.rate_ref ? format_double(*result.rate_ref) : "") << ','
       << (result.rate_analytic ? format_double(*result.rate_analytic) : "") << ",\n";
}

}  // namespace mhjb
